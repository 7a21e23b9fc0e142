#pragma once

#include <vector>

namespace spikelab {

// Two-factor lognormal forward dynamics:
//   df(t,T) = f(t,T) (sigma_l dW^l_t + sigma_s e^{-alpha (T-t)} dW^s_t),  d<W^l,W^s> = rho dt.
struct TwoFactorParams {
    double alpha = 1.0;    // short-factor reversion, per unit time
    double sigma_s = 0.0;  // short-factor vol
    double sigma_l = 0.0;  // long-factor vol
    double rho = 0.0;
};

void validate(const TwoFactorParams& params);

// Variance of log f(t,T) accumulated over [0, t]; maturity >= t.
double two_factor_log_variance(const TwoFactorParams& params, double t, double maturity);

// Initial forward curve T -> f^c(0, T). Piecewise constant on
// [start_k, start_{k+1}); the last level extends to +infinity and the first
// level is used for maturities before start_0.
class ForwardCurve {
public:
    static ForwardCurve flat(double level);
    static ForwardCurve piecewise(std::vector<double> starts, std::vector<double> levels);

    double operator()(double maturity) const;

    const std::vector<double>& starts() const { return starts_; }
    const std::vector<double>& levels() const { return levels_; }

private:
    ForwardCurve(std::vector<double> starts, std::vector<double> levels);

    std::vector<double> starts_;
    std::vector<double> levels_;
};

}  // namespace spikelab
