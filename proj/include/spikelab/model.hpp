#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "spikelab/forward_curve.hpp"
#include "spikelab/random.hpp"

namespace spikelab {

using Index = Eigen::Index;

// Regular observation grid t_i = i * mesh, i = 0..n, mesh = horizon / n.
class GridSpec {
public:
    GridSpec(Index n, double horizon = 1.0);

    Index n() const { return n_; }
    double horizon() const { return horizon_; }
    double mesh() const { return mesh_; }
    double time(Index i) const { return static_cast<double>(i) * mesh_; }

    // The i in [1, n] with t_{i-1} < t <= t_i. Requires 0 < t <= horizon.
    Index interval_of(double t) const;

    bool operator==(const GridSpec& other) const = default;

private:
    Index n_;
    double horizon_;
    double mesh_;
};

// Observations X_{t_0}, ..., X_{t_n}.
class SampledPath {
public:
    SampledPath(GridSpec grid, Eigen::VectorXd values);

    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    Index n() const { return grid_.n(); }

    // Delta_i X = X_{t_i} - X_{t_{i-1}}, 1-based, i in [1, n].
    double increment(Index i) const { return values_[i] - values_[i - 1]; }
    // All n increments; entry k holds Delta_{k+1} X.
    Eigen::VectorXd increments() const;

private:
    GridSpec grid_;
    Eigen::VectorXd values_;
};

struct ExponentialComponent {
    double weight;
    double rate;  // exponential with mean 1/rate
    int sign;     // +1 or -1: the component draws sign * Exp(rate)
};

struct ExponentialMixture {
    std::vector<ExponentialComponent> components;
};

struct EmpiricalLaw {
    std::vector<double> samples;
};

struct PointMass {
    double size;
};

// Jump-size distribution. No atom at zero and a finite second moment.
class JumpLaw {
public:
    using Variant = std::variant<ExponentialMixture, EmpiricalLaw, PointMass>;

    static JumpLaw exponential_mixture(const std::vector<double>& weights,
                                       const std::vector<double>& rates,
                                       const std::vector<int>& signs);
    static JumpLaw empirical(std::vector<double> samples);
    static JumpLaw point_mass(double size);

    const Variant& variant() const { return law_; }

private:
    explicit JumpLaw(Variant law) : law_(std::move(law)) {}
    Variant law_;
};

// 0.4 (-Exp(mean 15)) + 0.6 Exp(mean 10): the simulation-study law.
JumpLaw study_jump_law();

enum class MomentKind { Signed, Absolute, SignMass };

// Signed: x^m * nu. Absolute: |x|^m * nu. SignMass: sgn(x) * nu (order ignored).
// Throws std::domain_error when the moment is infinite (negative order on a
// law with mass near zero).
double law_moment(const JumpLaw& law, MomentKind kind, int order = 1);

// Integral of e^{u x} nu(dx). Throws std::domain_error outside the strip.
double law_exp_moment(const JumpLaw& law, double u);

double sample_jump(const JumpLaw& law, RandomSource& rng);

struct SpikeParams {
    double intensity;  // lambda
    double reversion;  // beta
    JumpLaw law;
};

void validate(const SpikeParams& params);

struct ExpOUSpec {
    double reversion = 100.0;  // kappa: log X^c reverts to 0 at this rate
    double vol = 2.0;
    double initial = 1.0;
};

struct TwoFactorSpec {
    TwoFactorParams params;
    ForwardCurve curve = ForwardCurve::flat(1.0);
};

struct FlatSpec {
    double constant = 0.0;
};

using ContinuousSpec = std::variant<ExpOUSpec, TwoFactorSpec, FlatSpec>;

struct ModelSpec {
    ContinuousSpec continuous = ExpOUSpec{};
    std::optional<SpikeParams> spikes;
};

enum class Regime { I, II, Both, Neither };

const char* to_string(Regime regime);

struct AssumptionThresholds {
    double small = 0.1;
    double large = 10.0;
};

struct AssumptionReport {
    double lambda_delta = 0.0;         // lambda * Delta
    double beta_delta = 0.0;           // beta * Delta
    double lambda_over_beta = 0.0;     // lambda / beta
    double lambda_sq_delta = 0.0;      // lambda^2 * Delta
    std::optional<double> lambda_sq_delta_window_sq;  // lambda^2 * Delta * k^2
    double beta_delta_pow = 0.0;       // beta * Delta^(1 - varpi)
    double reversion_escape = 0.0;     // lambda * exp(-(beta * Delta^(1 - varpi))^2)

    bool lambda_delta_small = false;
    bool beta_delta_small = false;
    bool lambda_over_beta_bounded = false;
    bool lambda_sq_delta_small = false;
    bool beta_delta_pow_large = false;
    bool reversion_escape_small = false;

    bool regime_one = false;
    bool regime_two = false;
    Regime regime = Regime::Neither;
};

AssumptionReport check_assumptions(const SpikeParams& params, const GridSpec& grid, double varpi,
                                   std::optional<Index> window = std::nullopt,
                                   AssumptionThresholds thresholds = {});

}  // namespace spikelab
