#include "spikelab/pricing.hpp"

#include <cmath>
#include <stdexcept>

#include "spikelab/parallel.hpp"
#include "spikelab/quadrature.hpp"
#include "spikelab/simulate.hpp"

namespace spikelab {

namespace {

void check_times(double t, double maturity) {
    if (!(maturity >= t)) throw std::invalid_argument("maturity must not precede the valuation time");
}

double mean_jump(const SpikeParams& params) { return law_moment(params.law, MomentKind::Signed, 1); }

}  // namespace

double forward_spike_arith(double z_now, const SpikeParams& params, double t, double maturity) {
    validate(params);
    check_times(t, maturity);
    const double beta = params.reversion;
    const double decay = std::exp(-beta * (maturity - t));
    return decay * z_now + params.intensity * mean_jump(params) / beta * (-std::expm1(-beta * (maturity - t)));
}

double forward_spike_delivery(double z_now, const SpikeParams& params, double t, double start, double theta) {
    validate(params);
    check_times(t, start);
    if (!(theta > 0.0)) throw std::invalid_argument("delivery length must be positive");
    const double beta = params.reversion;
    const double averaged = -std::expm1(-beta * theta) / (beta * theta);
    const double weight = std::exp(-beta * (start - t)) * averaged;
    return weight * z_now + params.intensity * mean_jump(params) / beta * (1.0 - weight);
}

double forward_spike_log(double z_now, const SpikeParams& params, double t, double maturity, double quad_tol) {
    validate(params);
    check_times(t, maturity);
    law_exp_moment(params.law, 1.0);  // throws when the moment diverges

    const double beta = params.reversion;
    const double decay = std::exp(-beta * (maturity - t));
    const double first = mean_jump(params);
    // E[exp(sum of decayed jumps over (t, T])] = exp((lambda / beta) int_decay^1 (phi(u) - 1) / u du).
    auto integrand = [&](double u) { return u == 0.0 ? first : (law_exp_moment(params.law, u) - 1.0) / u; };
    const double integral = decay < 1.0 ? adaptive_simpson(integrand, decay, 1.0, quad_tol).value : 0.0;
    return std::exp(decay * z_now) * std::exp(params.intensity / beta * integral);
}

double forward_spike_compensated(double z_now, const SpikeParams& params, double t, double maturity) {
    check_times(t, maturity);
    const double beta = params.reversion;
    const double initial = forward_spike_arith(0.0, params, 0.0, maturity);
    const double drift =
        params.intensity * mean_jump(params) * (std::exp(-beta * (maturity - t)) - std::exp(-beta * maturity)) / beta;
    return initial + std::exp(-beta * (maturity - t)) * z_now - drift;
}

double forward_continuous(const TwoFactorParams& params, const ForwardCurve& curve, double t, double maturity,
                          double long_factor, double short_factor) {
    validate(params);
    check_times(t, maturity);
    const double loading = std::exp(-params.alpha * (maturity - t));
    return curve(maturity) * std::exp(params.sigma_l * long_factor + params.sigma_s * loading * short_factor -
                                      0.5 * two_factor_log_variance(params, t, maturity));
}

std::vector<double> hourly_exercises(const GridSpec& grid) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(grid.n()));
    for (Index i = 1; i <= grid.n(); ++i) times.push_back(grid.time(i));
    return times;
}

PriceWithCI summarize_payoffs(const std::vector<double>& payoffs) {
    if (payoffs.empty()) throw std::invalid_argument("no payoffs to summarize");
    const auto count = static_cast<double>(payoffs.size());
    double sum = 0.0;
    for (double p : payoffs) sum += p;
    const double mean = sum / count;
    double ss = 0.0;
    for (double p : payoffs) ss += (p - mean) * (p - mean);
    const double sd = payoffs.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    const double se = sd / std::sqrt(count);
    PriceWithCI out;
    out.estimate = mean;
    out.std_error = se;
    out.ci95 = {mean - 1.96 * se, mean + 1.96 * se};
    out.num_sims = static_cast<std::int64_t>(payoffs.size());
    return out;
}

std::vector<PriceWithCI> price_strips_mc(const StripModel& model, const std::vector<double>& exercise_times,
                                         const std::vector<double>& strikes, std::int64_t num_sims,
                                         std::uint64_t seed, const GridSpec& grid, unsigned threads,
                                         bool antithetic) {
    if (num_sims < 1) throw std::invalid_argument("num_sims must be at least 1");
    if (antithetic && num_sims % 2 != 0) throw std::invalid_argument("antithetic pricing needs an even num_sims");
    if (strikes.empty()) throw std::invalid_argument("at least one strike is required");
    if (exercise_times.empty()) throw std::invalid_argument("at least one exercise time is required");
    if (model.spikes) validate(*model.spikes);

    std::vector<Index> exercise_index;
    exercise_index.reserve(exercise_times.size());
    for (double t : exercise_times) {
        const double position = t / grid.mesh();
        const auto i = static_cast<Index>(std::llround(position));
        if (i < 1 || i > grid.n() || std::abs(position - static_cast<double>(i)) > 1e-9)
            throw std::invalid_argument("exercise time " + std::to_string(t) + " is not on the simulation grid");
        if (!exercise_index.empty() && i <= exercise_index.back())
            throw std::invalid_argument("exercise times must be increasing");
        exercise_index.push_back(i);
    }

    const TwoFactorSimulator simulator(model.factors, model.curve, grid);
    const std::size_t k = strikes.size();
    std::vector<double> payoffs(static_cast<std::size_t>(num_sims) * k);

    parallel_for(num_sims, threads, [&](std::int64_t p) {
        const std::int64_t stream = antithetic ? p / 2 : p;
        RandomSource rng(derive_seed(seed, static_cast<std::uint64_t>(stream)));
        RandomSource factor_rng = rng.derive(1);
        RandomSource jump_rng = rng.derive(2);
        const TwoFactorPath factors = simulator.run(factor_rng, antithetic && p % 2 == 1);
        Eigen::VectorXd spot = factors.spot.values();
        if (model.spikes) spot += simulate_spikes(*model.spikes, grid, jump_rng).spike.values();
        for (std::size_t s = 0; s < k; ++s) {
            double payoff = 0.0;
            for (Index i : exercise_index) payoff += std::max(spot[i] - strikes[s], 0.0);
            payoffs[static_cast<std::size_t>(p) * k + s] = payoff;
        }
    });

    std::vector<PriceWithCI> out;
    out.reserve(k);
    const std::int64_t samples = antithetic ? num_sims / 2 : num_sims;
    std::vector<double> column(static_cast<std::size_t>(samples));
    auto payoff = [&](std::int64_t p, std::size_t s) { return payoffs[static_cast<std::size_t>(p) * k + s]; };
    for (std::size_t s = 0; s < k; ++s) {
        for (std::int64_t j = 0; j < samples; ++j)
            column[static_cast<std::size_t>(j)] =
                antithetic ? 0.5 * (payoff(2 * j, s) + payoff(2 * j + 1, s)) : payoff(j, s);
        PriceWithCI price = summarize_payoffs(column);
        price.num_sims = num_sims;
        out.push_back(price);
    }
    return out;
}

PriceWithCI price_strip_mc(const StripModel& model, const StripOptionSpec& spec, const GridSpec& grid,
                           unsigned threads, bool antithetic) {
    return price_strips_mc(model, spec.exercise_times, {spec.strike}, spec.num_sims, spec.seed, grid, threads,
                           antithetic)
        .front();
}

}  // namespace spikelab
