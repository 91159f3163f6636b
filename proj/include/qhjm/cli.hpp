// SPDX-License-Identifier: Apache-2.0
//
// Batch command-line front end. Every command returns a JSON report that
// validates against schema/report.schema.json.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhjm/linalg.hpp"

namespace qhjm::cli {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kSeedEnv = "QHJM_SEED";

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct DecomposeOptions {
    std::string source;  // builtin name or matrix file
    int r = 1;
    std::vector<double> tenors;  // empty: builtin tenors or 1..N months
};

struct QpcaOptions {
    std::string source;
    int bits = 2;
    std::uint64_t shots = 8192;
    int iterations = 10;
    double tol = 0.01;
    double time = 0.0;  // 0: 2 pi
    std::optional<std::string> target;
    double noise_p = 0.0;
    std::uint64_t noise_seed = 0;
    int refine_bits = 0;
    std::uint64_t seed = 0;
};

struct HjmOptions {
    std::optional<std::string> history;       // CSV
    std::optional<std::string> factors_from;  // builtin name or covariance matrix file
    int r = 1;
    bool quantum = false;
    int quantum_bits = 3;
    std::optional<double> sigma;  // one flat factor, replaces any covariance source
    double f0 = 0.03;
    std::uint64_t paths = 10000;
    double dt = 1.0 / 252.0;
    double horizon = 1.0;
    double annualization = 252.0;
    std::vector<double> maturities;  // empty: horizon / 2 and horizon
    std::uint64_t seed = 0;
};

struct IngestOptions {
    std::string path;
    double annualization = 252.0;
};

/// Seed from --seed, else the QHJM_SEED environment variable; a
/// ValidationError when neither is set.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::string* source = nullptr);

/// Builtin fixture or a text file with one matrix row per line (whitespace
/// or comma separated, '#' starts a comment).
struct MatrixSource {
    std::string name;
    Eigen::MatrixXd matrix;
    std::vector<double> tenors;
};
MatrixSource load_matrix(const std::string& source, const std::vector<double>& tenors = {});

json cmd_decompose(const DecomposeOptions& o);
json cmd_qpca(const QpcaOptions& o);
json cmd_hjm(const HjmOptions& o);
json cmd_ingest_check(const IngestOptions& o);

/// Parses argv, runs the command and writes the report to --output or
/// `out`. Diagnostics go to `err`. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qhjm::cli
