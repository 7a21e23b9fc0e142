#include "spikelab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spikelab {

namespace {

double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// exp(-Delta beta) = max{1 + ratio, Delta}.
BetaEstimate invert_ratio(double ratio, double delta) {
    BetaEstimate out;
    const double raw = 1.0 + ratio;
    out.floored = raw < delta;
    out.beta_hat = -std::log(std::max(raw, delta)) / delta;
    out.slope_hat = -ratio;
    return out;
}

}  // namespace

MomentSet moments_of(const JumpLaw& law) {
    return MomentSet{law_moment(law, MomentKind::Signed, 1), law_moment(law, MomentKind::Absolute, 1),
                     law_moment(law, MomentKind::Absolute, 2), law_moment(law, MomentKind::SignMass)};
}

LambdaEstimate estimate_lambda(const DetectionReport& report, const GridSpec& grid) {
    const double horizon = grid.horizon();
    LambdaEstimate out;
    out.lambda_hat = static_cast<double>(report.count) / horizon;
    if (report.count == 0) {
        out.ci95 = {0.0, 3.69 / horizon};
        return out;
    }
    const double half = 1.96 * std::sqrt(out.lambda_hat / horizon);
    out.ci95 = {std::max(out.lambda_hat - half, 0.0), out.lambda_hat + half};
    return out;
}

BetaEstimate estimate_beta(const SampledPath& path, const DetectionReport& report) {
    if (report.count == 0) {
        BetaEstimate out;
        out.undefined = true;
        return out;
    }
    const double delta = path.grid().mesh();
    const Index n = path.n();
    double numerator = 0.0;
    double denominator = 0.0;
    double earlier = 0.0;  // sum of previously flagged increments
    Index drops = 0;
    for (Index i : report.indices) {
        const double d = path.increment(i);
        double successor = 0.0;
        if (i < n)
            successor = path.increment(i + 1);
        else
            ++drops;
        numerator += sgn(d) * (successor + 2.0 * delta * earlier);
        denominator += std::abs(d);
        earlier += d;
    }
    BetaEstimate out = invert_ratio(numerator / denominator, delta);
    out.boundary_drops = drops;
    out.used = report.count;
    return out;
}

BetaEstimate oracle_estimate_beta(const SampledPath& path, std::span<const JumpRecord> truth) {
    BetaEstimate out;
    if (truth.empty()) {
        out.undefined = true;
        return out;
    }
    const GridSpec& grid = path.grid();
    const Index n = grid.n();
    const double delta = grid.mesh();

    std::vector<Index> interval(truth.size());
    std::vector<char> has_jump(static_cast<std::size_t>(n + 2), 0);
    for (std::size_t q = 0; q < truth.size(); ++q) {
        interval[q] = grid.interval_of(truth[q].time);
        has_jump[static_cast<std::size_t>(interval[q])] = 1;
    }

    double numerator = 0.0;
    double denominator = 0.0;
    double earlier = 0.0;  // sum of true sizes of all previous jumps
    for (std::size_t q = 0; q < truth.size(); ++q) {
        const Index i = interval[q];
        const bool next_is_free = i + 1 <= n && !has_jump[static_cast<std::size_t>(i + 1)];
        const bool alone = q + 1 == truth.size() || i < interval[q + 1];
        if (next_is_free && alone) {
            const double s = sgn(truth[q].size);
            numerator += s * (path.increment(i + 1) + 2.0 * delta * earlier);
            denominator += s * path.increment(i);
            ++out.used;
        }
        earlier += truth[q].size;
    }
    if (out.used == 0 || denominator == 0.0) {
        out.undefined = true;
        return out;
    }
    BetaEstimate inverted = invert_ratio(numerator / denominator, delta);
    inverted.used = out.used;
    return inverted;
}

std::optional<double> estimate_jump_moments(const SampledPath& path, const DetectionReport& report, double beta_hat,
                                            int order, MomentKind kind) {
    if (report.count == 0 || !(beta_hat > 0.0)) return std::nullopt;
    if (order <= 0) throw std::invalid_argument("moment order must be positive");
    double sum = 0.0;
    for (Index i : report.indices) {
        const double d = path.increment(i);
        sum += kind == MomentKind::Absolute ? std::pow(std::abs(d), order) : std::pow(d, order);
    }
    const double x = order * beta_hat * path.grid().mesh();
    const double correction = x / -std::expm1(-x);
    return correction * sum / static_cast<double>(report.count);
}

std::optional<double> estimate_sign_mass(const DetectionReport& report) {
    if (report.count == 0) return std::nullopt;
    double acc = 0.0;
    for (double d : report.increments) acc += sgn(d);
    return acc / static_cast<double>(report.count);
}

AsymptoticDiagnostics asymptotic_diagnostics(double lambda, double beta, const GridSpec& grid, const MomentSet& moments,
                                             double sigma_sq_integral) {
    auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) throw std::invalid_argument(std::string("diagnostics need the moment ") + name);
        return *v;
    };
    const double m1 = need(moments.signed_first, "x*nu");
    const double a1 = need(moments.absolute_first, "|x|*nu");
    const double a2 = need(moments.absolute_second, "|x|^2*nu");
    const double s = need(moments.sign_mass, "sgn(x)*nu");
    if (!(lambda > 0.0) || !(beta > 0.0) || !(a1 > 0.0) || !(a2 > 0.0) || !(sigma_sq_integral > 0.0))
        throw std::invalid_argument("diagnostics need positive lambda, beta, |x|*nu, |x|^2*nu and integrated variance");

    const double delta = grid.mesh();
    const double bd = beta * delta;
    const double grow = std::exp(bd);
    const double sqrt_lambda = std::sqrt(lambda);
    const double sqrt_iv = std::sqrt(sigma_sq_integral);

    AsymptoticDiagnostics out;
    out.bias_term = grow * (lambda / beta) * (m1 * s / a1) * (std::expm1(bd) / bd - 1.0);

    // The radicand can come out negative; V^(1) is then reported as 0.
    out.first_component_radicand = s * s * a2 + m1 * m1 - 2.0 * s * a2;
    out.error_components[0] =
        grow * sqrt_lambda / (std::sqrt(3.0) * beta * a1) * std::sqrt(std::max(out.first_component_radicand, 0.0));

    const double spread = std::sqrt(a2 / (a1 * a1) / (2.0 * beta) * (-std::expm1(-2.0 * bd)) / (2.0 * bd));
    out.error_components[1] = grow * std::min(spread, lambda / beta);
    out.error_components[2] = grow * (bd / -std::expm1(-bd)) * sqrt_iv / (a1 * sqrt_lambda * beta * std::sqrt(delta));
    out.error_components[3] = grow * sqrt_iv * std::sqrt(delta) / (a1 * sqrt_lambda);

    out.relative_error_bound = lambda * delta + 1.0 / (beta * std::sqrt(lambda * delta)) +
                               std::min(1.0 / std::sqrt(beta), lambda / beta);
    return out;
}

EstimationResult estimate_spikes(const SampledPath& path, const DetectionConfig& config) {
    EstimationResult result;
    result.detection = detect_jumps(path, config);
    const DetectionReport& report = result.detection;
    SpikeEstimates& est = result.estimates;

    const LambdaEstimate lambda = estimate_lambda(report, path.grid());
    est.count = report.count;
    est.lambda_hat = lambda.lambda_hat;
    est.lambda_ci = lambda.ci95;

    const BetaEstimate beta = estimate_beta(path, report);
    est.beta_hat = beta.beta_hat;
    est.slope_hat = beta.slope_hat;
    est.beta_undefined = beta.undefined;
    est.floored = beta.floored;
    est.boundary_drops = beta.boundary_drops;

    for (int m : {1, 2}) {
        if (auto v = estimate_jump_moments(path, report, beta.beta_hat, m)) est.moment_estimates[m] = *v;
    }
    est.sign_mass = estimate_sign_mass(report);

    if (!beta.undefined && beta.beta_hat > 0.0) {
        MomentSet plug;
        plug.signed_first = est.moment_estimates.at(1);
        plug.absolute_first = estimate_jump_moments(path, report, beta.beta_hat, 1, MomentKind::Absolute);
        plug.absolute_second = est.moment_estimates.at(2);
        plug.sign_mass = est.sign_mass;
        est.diagnostics =
            asymptotic_diagnostics(est.lambda_hat, est.beta_hat, path.grid(), plug, report.sigma_hat * report.sigma_hat);
    }
    return result;
}

}  // namespace spikelab
