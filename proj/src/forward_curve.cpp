#include "spikelab/forward_curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spikelab {

void validate(const TwoFactorParams& p) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("two-factor alpha must be > 0");
    if (!(p.sigma_s >= 0.0) || !(p.sigma_l >= 0.0))
        throw std::invalid_argument("two-factor vols must be >= 0");
    if (!(std::abs(p.rho) <= 1.0)) throw std::invalid_argument("two-factor rho must lie in [-1, 1]");
}

double two_factor_log_variance(const TwoFactorParams& p, double t, double maturity) {
    const double a = p.alpha;
    const double lag = std::exp(-a * (maturity - t));
    const double short_var = -std::expm1(-2.0 * a * t) / (2.0 * a);
    const double cross = -std::expm1(-a * t) / a;
    return p.sigma_l * p.sigma_l * t + p.sigma_s * p.sigma_s * lag * lag * short_var +
           2.0 * p.rho * p.sigma_l * p.sigma_s * lag * cross;
}

ForwardCurve::ForwardCurve(std::vector<double> starts, std::vector<double> levels)
    : starts_(std::move(starts)), levels_(std::move(levels)) {
    if (levels_.empty() || starts_.size() != levels_.size())
        throw std::invalid_argument("forward curve needs one start per level");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (!(levels_[k] > 0.0) || !std::isfinite(levels_[k]))
            throw std::invalid_argument("forward curve levels must be positive, got " +
                                        std::to_string(levels_[k]));
        if (k > 0 && !(starts_[k] > starts_[k - 1]))
            throw std::invalid_argument("forward curve starts must be increasing");
    }
}

ForwardCurve ForwardCurve::flat(double level) { return ForwardCurve({0.0}, {level}); }

ForwardCurve ForwardCurve::piecewise(std::vector<double> starts, std::vector<double> levels) {
    return ForwardCurve(std::move(starts), std::move(levels));
}

double ForwardCurve::operator()(double maturity) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), maturity);
    if (it == starts_.begin()) return levels_.front();
    return levels_[static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1];
}

}  // namespace spikelab
