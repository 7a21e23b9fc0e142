#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <utility>

#include "spikelab/detect.hpp"
#include "spikelab/model.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

struct LambdaEstimate {
    double lambda_hat = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
};

// Output of the slope-based reversion estimator. When no jump is usable the
// value is 0 and `undefined` is set; a negative beta_hat is reported as is.
struct BetaEstimate {
    double beta_hat = 0.0;
    double slope_hat = 0.0;  // s_hat; exp(-Delta beta_hat) = max{1 - s_hat, Delta}
    bool undefined = false;
    bool floored = false;    // the max{., Delta} floor was active
    Index boundary_drops = 0;  // flagged index at i = n, successor term taken as 0
    Index used = 0;            // number of jumps entering the ratio
};

struct MomentSet {
    std::optional<double> signed_first;    // x * nu
    std::optional<double> absolute_first;  // |x| * nu
    std::optional<double> absolute_second; // |x|^2 * nu
    std::optional<double> sign_mass;       // sgn(x) * nu
};

MomentSet moments_of(const JumpLaw& law);

struct AsymptoticDiagnostics {
    double bias_term = 0.0;                       // M_n
    std::array<double, 4> error_components{};     // V_n^(1..4)
    double relative_error_bound = 0.0;            // lambda Delta + 1/(beta sqrt(lambda Delta)) + min{1/sqrt(beta), lambda/beta}
    double first_component_radicand = 0.0;        // raw value under the root of V_n^(1)
};

struct SpikeEstimates {
    Index count = 0;
    double lambda_hat = 0.0;
    std::pair<double, double> lambda_ci{0.0, 0.0};
    double beta_hat = 0.0;
    double slope_hat = 0.0;
    bool beta_undefined = true;
    bool floored = false;
    Index boundary_drops = 0;
    std::map<int, double> moment_estimates;  // order m -> estimate of x^m * nu
    std::optional<double> sign_mass;
    std::optional<AsymptoticDiagnostics> diagnostics;
};

// count / horizon with a normal 95% interval; for zero counts the exact
// Poisson upper bound 3.69 / horizon.
LambdaEstimate estimate_lambda(const DetectionReport& report, const GridSpec& grid);

BetaEstimate estimate_beta(const SampledPath& path, const DetectionReport& report);

// Reversion estimate from the true jump times and sizes. Uses only jumps
// alone in their interval whose next interval holds no jump.
BetaEstimate oracle_estimate_beta(const SampledPath& path, std::span<const JumpRecord> truth);

// m beta Delta / ((1 - e^{-m beta Delta}) count) * sum_q (Delta_{I(q)} X)^m, or the
// same with |.|^m for MomentKind::Absolute. Empty when count = 0 or beta_hat <= 0.
std::optional<double> estimate_jump_moments(const SampledPath& path, const DetectionReport& report, double beta_hat,
                                            int order, MomentKind kind = MomentKind::Signed);

// Average sign of the flagged increments.
std::optional<double> estimate_sign_mass(const DetectionReport& report);

AsymptoticDiagnostics asymptotic_diagnostics(double lambda, double beta, const GridSpec& grid, const MomentSet& moments,
                                             double sigma_sq_integral);

struct EstimationResult {
    DetectionReport detection;
    SpikeEstimates estimates;
};

// Detection, lambda, beta, moments of order 1 and 2 and plug-in diagnostics
// (integrated variance taken as sigma_hat^2).
EstimationResult estimate_spikes(const SampledPath& path, const DetectionConfig& config);

}  // namespace spikelab
