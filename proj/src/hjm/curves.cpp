// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "qhjm/error.hpp"
#include "qhjm/hjm.hpp"

namespace qhjm::hjm {

namespace {

void require_increasing(const std::vector<double>& xs, const char* what) {
    if (xs.empty()) throw ValidationError(std::string(what) + ": empty grid");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i])) throw ValidationError(std::string(what) + ": non-finite grid point");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError(std::string(what) + ": grid not strictly increasing");
    }
}

}  // namespace

MaturityGrid::MaturityGrid(std::vector<double> tenors) : tenors_(std::move(tenors)) {
    require_increasing(tenors_, "maturity grid");
    if (!(tenors_.front() > 0.0)) throw ValidationError("maturity grid: first tenor must be positive");
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

double integrate(const std::vector<double>& xs, const std::vector<double>& ys, double a, double b) {
    if (b < a) return -integrate(xs, ys, b, a);
    // The interpolant is linear between consecutive breakpoints, so the
    // trapezoid over them is exact.
    double sum = 0.0;
    double x0 = a;
    double y0 = interpolate(xs, ys, a);
    const auto first = std::upper_bound(xs.begin(), xs.end(), a);
    for (auto it = first; it != xs.end() && *it < b; ++it) {
        const double y1 = ys[static_cast<std::size_t>(it - xs.begin())];
        sum += 0.5 * (y0 + y1) * (*it - x0);
        x0 = *it;
        y0 = y1;
    }
    sum += 0.5 * (y0 + interpolate(xs, ys, b)) * (b - x0);
    return sum;
}

void ForwardCurve::validate() const {
    if (!std::isfinite(time)) throw ValidationError("forward curve: non-finite observation time");
    require_increasing(maturities, "forward curve");
    if (rates.size() != maturities.size())
        throw ValidationError("forward curve: " + std::to_string(rates.size()) + " rates for " +
                              std::to_string(maturities.size()) + " maturities");
    for (double r : rates)
        if (!std::isfinite(r)) throw ValidationError("forward curve: non-finite rate");
}

double ForwardCurve::rate(double maturity) const { return interpolate(maturities, rates, maturity); }

ForwardCurve flat_curve(double f, const std::vector<double>& maturities) {
    ForwardCurve c{0.0, maturities, std::vector<double>(maturities.size(), f)};
    c.validate();
    return c;
}

double bond_price(const ForwardCurve& curve, double maturity) {
    curve.validate();
    if (!std::isfinite(maturity) || maturity < curve.time)
        throw ValidationError("bond_price: maturity precedes the observation time");
    if (maturity > curve.maturities.back() * (1.0 + 1e-12))
        throw ValidationError("bond_price: maturity beyond the last curve point");
    if (maturity == curve.time) return 1.0;
    return std::exp(-integrate(curve.maturities, curve.rates, curve.time, maturity));
}

}  // namespace qhjm::hjm
