// SPDX-License-Identifier: Apache-2.0
#include "qhjm/fixtures.hpp"

#include <charconv>

namespace qhjm::fixtures {

linalg::RealMatrix sigma3() {
    linalg::RealMatrix m(3, 3);
    m << 0.000189, 0.000097, 0.000091,  //
        0.000097, 0.000106, 0.000101,   //
        0.000091, 0.000101, 0.000126;
    return m;
}

linalg::RealMatrix sigma2() { return sigma3().topLeftCorner(2, 2); }

linalg::RealMatrix sigma4() {
    linalg::RealMatrix m = linalg::RealMatrix::Zero(4, 4);
    m.topLeftCorner(3, 3) = sigma3();
    return m;
}

linalg::DensityMatrix rho2() { return linalg::normalize_to_density(linalg::HermitianMatrix(sigma2())); }

linalg::DensityMatrix rho4() { return linalg::normalize_to_density(linalg::HermitianMatrix(sigma4())); }

std::vector<double> sigma3_tenors() { return {1.0 / 12.0, 3.0 / 12.0, 6.0 / 12.0}; }

std::optional<linalg::RealMatrix> builtin(std::string_view name) {
    if (name == "sigma3") return sigma3();
    if (name == "sigma2") return sigma2();
    if (name == "sigma4") return sigma4();
    if (name == "rho2") return rho2().matrix().real();
    if (name == "rho4") return rho4().matrix().real();
    constexpr std::string_view prefix = "identity";
    if (name.substr(0, prefix.size()) == prefix) {
        const auto digits = name.substr(prefix.size());
        int n = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1 && n <= 16)
            return linalg::RealMatrix::Identity(n, n);
    }
    return std::nullopt;
}

std::vector<double> builtin_tenors(std::string_view name, Eigen::Index dim) {
    auto t = sigma3_tenors();
    if (name == "sigma3" || name == "sigma2" || name == "rho2") {
        t.resize(static_cast<std::size_t>(dim));
        return t;
    }
    // Padded fixtures carry a phantom fourth maturity; other matrices get a
    // monthly grid.
    if (name == "sigma4" || name == "rho4") return {1.0 / 12.0, 3.0 / 12.0, 6.0 / 12.0, 9.0 / 12.0};
    std::vector<double> grid(static_cast<std::size_t>(dim));
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = static_cast<double>(j + 1) / 12.0;
    return grid;
}

std::vector<std::string> builtin_names() {
    return {"sigma2", "sigma3", "sigma4", "rho2", "rho4", "identityN"};
}

}  // namespace qhjm::fixtures
