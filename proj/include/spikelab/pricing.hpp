#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spikelab/forward_curve.hpp"
#include "spikelab/model.hpp"

namespace spikelab {

// Arithmetic model S = X^c + Z: spike part of f(t, T),
//   e^{-beta (T-t)} Z_t + (lambda x*nu / beta)(1 - e^{-beta (T-t)}).
double forward_spike_arith(double z_now, const SpikeParams& params, double t, double maturity);

// Spike part of the delivery-period contract over [start, start + theta].
double forward_spike_delivery(double z_now, const SpikeParams& params, double t, double start, double theta);

// Log model log S = X^c + Z: multiplicative spike factor of f(t, T),
//   exp(e^{-beta (T-t)} Z_t) exp((lambda / beta) int_{e^{-beta (T-t)}}^1 (phi(u) - 1) / u du)
// with phi the exponential moment of the jump law.
double forward_spike_log(double z_now, const SpikeParams& params, double t, double maturity,
                         double quad_tol = 1e-10);

// Spike forward built from its compensated dynamics started at Z_0 = 0:
//   f(0,T) + e^{-beta (T-t)} Z_t - lambda x*nu (e^{-beta (T-t)} - e^{-beta T}) / beta.
// Agrees with forward_spike_arith and gives Z_T at t = T.
double forward_spike_compensated(double z_now, const SpikeParams& params, double t, double maturity);

// Continuous two-factor forward f^c(t, T) given factor values at t.
double forward_continuous(const TwoFactorParams& params, const ForwardCurve& curve, double t, double maturity,
                          double long_factor, double short_factor);

struct StripModel {
    TwoFactorParams factors;
    ForwardCurve curve = ForwardCurve::flat(40.0);
    std::optional<SpikeParams> spikes;
};

struct StripOptionSpec {
    std::vector<double> exercise_times;
    double strike = 0.0;
    std::int64_t num_sims = 10000;
    std::uint64_t seed = 0;
};

struct PriceWithCI {
    double estimate = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    std::int64_t num_sims = 0;
    double std_error = 0.0;
};

std::vector<double> hourly_exercises(const GridSpec& grid);

// Strip of calls sum_i (S_{t_i} - K)^+ under the Merton measure, with
// S_t = f^c(t, t) + Z_t. Path p uses the stream derive_seed(seed, p).
// With `antithetic`, num_sims must be even and path pairs share their seed,
// the second one taking mirrored Gaussian factor shocks; the pair average is
// one i.i.d. sample for the interval.
PriceWithCI price_strip_mc(const StripModel& model, const StripOptionSpec& spec, const GridSpec& grid,
                           unsigned threads = 1, bool antithetic = false);

// Several strikes on common paths.
std::vector<PriceWithCI> price_strips_mc(const StripModel& model, const std::vector<double>& exercise_times,
                                         const std::vector<double>& strikes, std::int64_t num_sims,
                                         std::uint64_t seed, const GridSpec& grid, unsigned threads = 1,
                                         bool antithetic = false);

PriceWithCI summarize_payoffs(const std::vector<double>& payoffs);

}  // namespace spikelab
