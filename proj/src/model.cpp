#include "spikelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spikelab {

GridSpec::GridSpec(Index n, double horizon) : n_(n), horizon_(horizon), mesh_(horizon / static_cast<double>(n)) {
    if (n < 2) throw std::invalid_argument("grid needs n >= 2 increments, got " + std::to_string(n));
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("grid horizon must be positive and finite");
}

Index GridSpec::interval_of(double t) const {
    if (!(t > 0.0) || t > horizon_ * (1.0 + 1e-15))
        throw std::out_of_range("time " + std::to_string(t) + " outside (0, horizon]");
    auto i = static_cast<Index>(std::ceil(t / mesh_));
    i = std::clamp<Index>(i, 1, n_);
    while (i > 1 && t <= time(i - 1)) --i;
    while (i < n_ && t > time(i)) ++i;
    return i;
}

SampledPath::SampledPath(GridSpec grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n() + 1)
        throw std::invalid_argument("path needs n + 1 = " + std::to_string(grid_.n() + 1) + " values, got " +
                                    std::to_string(values_.size()));
    if (!values_.allFinite()) throw std::invalid_argument("path values must be finite");
}

Eigen::VectorXd SampledPath::increments() const {
    const Index n = grid_.n();
    return values_.tail(n) - values_.head(n);
}

JumpLaw JumpLaw::exponential_mixture(const std::vector<double>& weights, const std::vector<double>& rates,
                                     const std::vector<int>& signs) {
    if (weights.empty() || weights.size() != rates.size() || weights.size() != signs.size())
        throw std::invalid_argument("mixture needs matching, non-empty weights/rates/signs");
    ExponentialMixture mix;
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0)) throw std::invalid_argument("mixture weights must be >= 0");
        if (!(rates[k] > 0.0) || !std::isfinite(rates[k]))
            throw std::invalid_argument("mixture rates must be positive");
        if (signs[k] != 1 && signs[k] != -1) throw std::invalid_argument("mixture signs must be +1 or -1");
        total += weights[k];
        mix.components.push_back({weights[k], rates[k], signs[k]});
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mixture weights must sum to 1, got " + std::to_string(total));
    return JumpLaw(std::move(mix));
}

JumpLaw JumpLaw::empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical law needs at least one sample");
    for (double x : samples) {
        if (x == 0.0 || !std::isfinite(x))
            throw std::invalid_argument("empirical jump samples must be finite and nonzero");
    }
    return JumpLaw(EmpiricalLaw{std::move(samples)});
}

JumpLaw JumpLaw::point_mass(double size) {
    if (size == 0.0 || !std::isfinite(size)) throw std::invalid_argument("point-mass jump size must be nonzero");
    return JumpLaw(PointMass{size});
}

JumpLaw study_jump_law() { return JumpLaw::exponential_mixture({0.4, 0.6}, {1.0 / 15.0, 1.0 / 10.0}, {-1, 1}); }

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double factorial(int m) { return std::tgamma(static_cast<double>(m) + 1.0); }

double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

double transformed(double x, MomentKind kind, int order) {
    switch (kind) {
        case MomentKind::Signed: return std::pow(x, order);
        case MomentKind::Absolute: return std::pow(std::abs(x), order);
        case MomentKind::SignMass: return sgn(x);
    }
    return 0.0;
}

}  // namespace

double law_moment(const JumpLaw& law, MomentKind kind, int order) {
    return std::visit(
        Overloaded{
            [&](const ExponentialMixture& mix) {
                if (kind != MomentKind::SignMass && order < 0)
                    throw std::domain_error("moment of order " + std::to_string(order) +
                                            " is infinite for an exponential mixture");
                double acc = 0.0;
                for (const auto& c : mix.components) {
                    if (kind == MomentKind::SignMass) {
                        acc += c.weight * c.sign;
                        continue;
                    }
                    // E[Exp(rate)^m] = m! / rate^m
                    double m = factorial(order) / std::pow(c.rate, order);
                    if (kind == MomentKind::Signed && c.sign < 0 && order % 2 != 0) m = -m;
                    acc += c.weight * m;
                }
                return acc;
            },
            [&](const EmpiricalLaw& emp) {
                double acc = 0.0;
                for (double x : emp.samples) acc += transformed(x, kind, order);
                return acc / static_cast<double>(emp.samples.size());
            },
            [&](const PointMass& pm) { return transformed(pm.size, kind, order); },
        },
        law.variant());
}

double law_exp_moment(const JumpLaw& law, double u) {
    return std::visit(
        Overloaded{
            [&](const ExponentialMixture& mix) {
                double acc = 0.0;
                for (std::size_t k = 0; k < mix.components.size(); ++k) {
                    const auto& c = mix.components[k];
                    const double shifted = c.rate - u * c.sign;
                    if (!(shifted > 0.0))
                        throw std::domain_error("exponential moment diverges at u = " + std::to_string(u) +
                                                " for mixture component " + std::to_string(k + 1) + " (rate " +
                                                std::to_string(c.rate) + ")");
                    acc += c.weight * c.rate / shifted;
                }
                return acc;
            },
            [&](const EmpiricalLaw& emp) {
                double acc = 0.0;
                for (double x : emp.samples) acc += std::exp(u * x);
                return acc / static_cast<double>(emp.samples.size());
            },
            [&](const PointMass& pm) { return std::exp(u * pm.size); },
        },
        law.variant());
}

double sample_jump(const JumpLaw& law, RandomSource& rng) {
    return std::visit(
        Overloaded{
            [&](const ExponentialMixture& mix) {
                const double pick = rng.uniform();
                double cum = 0.0;
                const ExponentialComponent* chosen = &mix.components.back();
                for (const auto& c : mix.components) {
                    cum += c.weight;
                    if (pick < cum) {
                        chosen = &c;
                        break;
                    }
                }
                // -log of a (0,1] uniform; redraw the measure-zero exact 1.
                double e = 0.0;
                while (e == 0.0) e = -std::log(rng.uniform_open());
                return chosen->sign * e / chosen->rate;
            },
            [&](const EmpiricalLaw& emp) { return emp.samples[rng.index(emp.samples.size())]; },
            [&](const PointMass& pm) { return pm.size; },
        },
        law.variant());
}

void validate(const SpikeParams& p) {
    if (!(p.intensity > 0.0) || !std::isfinite(p.intensity))
        throw std::invalid_argument("spike intensity must be > 0");
    if (!(p.reversion > 0.0) || !std::isfinite(p.reversion))
        throw std::invalid_argument("spike reversion must be > 0");
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::I: return "I";
        case Regime::II: return "II";
        case Regime::Both: return "both";
        case Regime::Neither: return "neither";
    }
    return "neither";
}

AssumptionReport check_assumptions(const SpikeParams& params, const GridSpec& grid, double varpi,
                                   std::optional<Index> window, AssumptionThresholds th) {
    if (!(varpi > 0.0 && varpi < 0.5)) throw std::invalid_argument("varpi must lie in (0, 1/2)");
    const double lambda = params.intensity;
    const double beta = params.reversion;
    const double delta = grid.mesh();

    AssumptionReport r;
    r.lambda_delta = lambda * delta;
    r.beta_delta = beta * delta;
    r.lambda_over_beta = lambda / beta;
    r.lambda_sq_delta = lambda * lambda * delta;
    r.beta_delta_pow = beta * std::pow(delta, 1.0 - varpi);
    r.reversion_escape = lambda * std::exp(-r.beta_delta_pow * r.beta_delta_pow);

    r.lambda_delta_small = r.lambda_delta < th.small;
    r.beta_delta_small = r.beta_delta < th.small;
    r.lambda_over_beta_bounded = r.lambda_over_beta < th.large;
    r.lambda_sq_delta_small = r.lambda_sq_delta < th.small;
    r.beta_delta_pow_large = r.beta_delta_pow > th.large;
    r.reversion_escape_small = r.reversion_escape < th.small;

    bool window_ok = true;
    if (window) {
        const double k = static_cast<double>(*window);
        r.lambda_sq_delta_window_sq = r.lambda_sq_delta * k * k;
        window_ok = *r.lambda_sq_delta_window_sq < th.small;
    }

    r.regime_one = r.lambda_sq_delta_small && r.beta_delta_small;
    r.regime_two = r.reversion_escape_small && window_ok;
    if (r.regime_one && r.regime_two)
        r.regime = Regime::Both;
    else if (r.regime_one)
        r.regime = Regime::I;
    else if (r.regime_two)
        r.regime = Regime::II;
    else
        r.regime = Regime::Neither;
    return r;
}

}  // namespace spikelab
