#include "spikelab/simulate.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spikelab {

SampledPath spike_path_from_records(std::span<const JumpRecord> records, double reversion, const GridSpec& grid) {
    const Index n = grid.n();
    const double decay = std::exp(-reversion * grid.mesh());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);

    std::size_t q = 0;
    double prev_time = 0.0;
    double current = 0.0;
    for (Index i = 1; i <= n; ++i) {
        current *= decay;
        const double t_i = grid.time(i);
        while (q < records.size()) {
            const JumpRecord& r = records[q];
            if (r.time < prev_time) throw std::invalid_argument("jump records must be sorted by time");
            if (grid.interval_of(r.time) != i) break;
            current += r.size * std::exp(-reversion * (t_i - r.time));
            prev_time = r.time;
            ++q;
        }
        z[i] = current;
    }
    if (q != records.size()) throw std::invalid_argument("jump records extend past the grid horizon");
    return SampledPath(grid, std::move(z));
}

SpikeSimulation simulate_spikes(const SpikeParams& params, const GridSpec& grid, RandomSource& rng) {
    validate(params);
    const auto count = rng.poisson(params.intensity * grid.horizon());
    std::vector<double> times(static_cast<std::size_t>(count));
    for (double& t : times) t = grid.horizon() * rng.uniform_open();
    std::sort(times.begin(), times.end());

    std::vector<JumpRecord> truth;
    truth.reserve(times.size());
    for (double t : times) {
        // Keep jumps off grid points so the interval index is unambiguous.
        if (t == grid.time(grid.interval_of(t))) t = std::nextafter(t, 0.0);
        truth.push_back({t, sample_jump(params.law, rng)});
    }
    SampledPath spike = spike_path_from_records(truth, params.reversion, grid);
    return {std::move(spike), std::move(truth)};
}

SampledPath simulate_exp_ou(const ExpOUSpec& spec, const GridSpec& grid, RandomSource& rng) {
    if (!(spec.vol > 0.0) || !(spec.initial > 0.0))
        throw std::invalid_argument("exp-OU needs vol > 0 and initial > 0");
    const Index n = grid.n();
    const double dt = grid.mesh();
    const double kappa = spec.reversion;
    const double a = std::exp(-kappa * dt);
    const double var = kappa == 0.0 ? dt : -std::expm1(-2.0 * kappa * dt) / (2.0 * kappa);
    const double sd = spec.vol * std::sqrt(var);

    Eigen::VectorXd values(n + 1);
    double y = std::log(spec.initial);
    values[0] = spec.initial;
    for (Index i = 1; i <= n; ++i) {
        y = a * y + sd * rng.normal();
        values[i] = std::exp(y);
    }
    return SampledPath(grid, std::move(values));
}

TwoFactorSimulator::TwoFactorSimulator(const TwoFactorParams& params, const ForwardCurve& curve,
                                       const GridSpec& grid)
    : params_(params), grid_(grid) {
    validate(params);
    const double dt = grid.mesh();
    const double alpha = params.alpha;
    decay_ = std::exp(-alpha * dt);

    // Covariance of (W^l increment, OU innovation) over one step.
    Eigen::Matrix2d cov;
    cov(0, 0) = dt;
    cov(1, 1) = -std::expm1(-2.0 * alpha * dt) / (2.0 * alpha);
    cov(0, 1) = cov(1, 0) = params.rho * (-std::expm1(-alpha * dt)) / alpha;

    chol_ = Eigen::Matrix2d::Zero();
    chol_(0, 0) = std::sqrt(cov(0, 0));
    chol_(1, 0) = cov(1, 0) / chol_(0, 0);
    chol_(1, 1) = std::sqrt(std::max(cov(1, 1) - chol_(1, 0) * chol_(1, 0), 0.0));

    const Index n = grid.n();
    base_.resize(n + 1);
    for (Index i = 0; i <= n; ++i) {
        const double t = grid.time(i);
        base_[i] = curve(t) * std::exp(-0.5 * two_factor_log_variance(params, t, t));
    }
}

TwoFactorPath TwoFactorSimulator::run(RandomSource& rng, bool mirror) const {
    const double sign = mirror ? -1.0 : 1.0;
    const Index n = grid_.n();
    Eigen::VectorXd w(n + 1), y(n + 1), spot(n + 1);
    w[0] = 0.0;
    y[0] = 0.0;
    spot[0] = base_[0];
    for (Index i = 1; i <= n; ++i) {
        const Eigen::Vector2d shock = sign * (chol_ * Eigen::Vector2d(rng.normal(), rng.normal()));
        w[i] = w[i - 1] + shock[0];
        y[i] = decay_ * y[i - 1] + shock[1];
        spot[i] = base_[i] * std::exp(params_.sigma_l * w[i] + params_.sigma_s * y[i]);
    }
    return {SampledPath(grid_, std::move(spot)), std::move(w), std::move(y)};
}

TwoFactorPath simulate_two_factor(const TwoFactorParams& params, const ForwardCurve& curve, const GridSpec& grid,
                                  RandomSource& rng) {
    return TwoFactorSimulator(params, curve, grid).run(rng);
}

SampledPath simulate_continuous(const ContinuousSpec& spec, const GridSpec& grid, RandomSource& rng) {
    if (const auto* ou = std::get_if<ExpOUSpec>(&spec)) return simulate_exp_ou(*ou, grid, rng);
    if (const auto* tf = std::get_if<TwoFactorSpec>(&spec))
        return simulate_two_factor(tf->params, tf->curve, grid, rng).spot;
    const auto& flat = std::get<FlatSpec>(spec);
    return SampledPath(grid, Eigen::VectorXd::Constant(grid.n() + 1, flat.constant));
}

SimulatedPath assemble_path(const SampledPath& continuous, std::vector<JumpRecord> records, double reversion) {
    SampledPath spike = spike_path_from_records(records, reversion, continuous.grid());
    SampledPath observed(continuous.grid(), continuous.values() + spike.values());
    return {std::move(observed), continuous, std::move(spike), std::move(records)};
}

SimulatedPath simulate_spot(const ModelSpec& model, const GridSpec& grid, const RandomSource& rng) {
    RandomSource cont_rng = rng.derive(1);
    RandomSource jump_rng = rng.derive(2);
    SampledPath continuous = simulate_continuous(model.continuous, grid, cont_rng);
    if (!model.spikes) return assemble_path(continuous, {}, 1.0);
    SpikeSimulation spikes = simulate_spikes(*model.spikes, grid, jump_rng);
    SampledPath observed(grid, continuous.values() + spikes.spike.values());
    return {std::move(observed), std::move(continuous), std::move(spikes.spike), std::move(spikes.truth)};
}

}  // namespace spikelab
