// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qhjm/linalg.hpp"

// Reference covariance of one-, three- and six-month forward-rate changes
// and the matrices derived from it.
namespace qhjm::fixtures {

/// 3x3 covariance for maturities 1m, 3m, 6m.
linalg::RealMatrix sigma3();
/// Leading 2x2 block of sigma3 (1m, 3m).
linalg::RealMatrix sigma2();
/// sigma3 zero-padded to 4x4.
linalg::RealMatrix sigma4();

linalg::DensityMatrix rho2();
linalg::DensityMatrix rho4();

/// Tenors (years) matching sigma3's rows.
std::vector<double> sigma3_tenors();

/// Looks up a builtin by name: sigma2, sigma3, sigma4, rho2, rho4,
/// identityN (N = 1..16).
std::optional<linalg::RealMatrix> builtin(std::string_view name);
std::vector<double> builtin_tenors(std::string_view name, Eigen::Index dim);

std::vector<std::string> builtin_names();

}  // namespace qhjm::fixtures
