#pragma once

#include <span>
#include <vector>

#include "spikelab/model.hpp"

namespace spikelab {

struct JumpRecord {
    double time;  // in (0, horizon]
    double size;  // nonzero
};

struct SpikeSimulation {
    SampledPath spike;
    std::vector<JumpRecord> truth;
};

// X = X^c + Z, sample by sample, with the jump records that generated Z.
struct SimulatedPath {
    SampledPath observed;
    SampledPath continuous;
    SampledPath spike;
    std::vector<JumpRecord> truth;
};

struct TwoFactorPath {
    SampledPath spot;              // f^c(t, t) on the grid
    Eigen::VectorXd long_factor;   // W^l_{t_i}
    Eigen::VectorXd short_factor;  // Y_{t_i} = int_0^t e^{-alpha (t-u)} dW^s_u
};

// Shot-noise values Z_{t_i} = sum_{T_q <= t_i} size_q e^{-beta (t_i - T_q)}, built
// as Z_{t_i} = Z_{t_{i-1}} e^{-beta mesh} + (jumps inside ((i-1) mesh, i mesh]).
// Records must be sorted by time.
SampledPath spike_path_from_records(std::span<const JumpRecord> records, double reversion, const GridSpec& grid);

// Poisson(lambda * horizon) jumps at uniform order statistics, sizes from the law.
SpikeSimulation simulate_spikes(const SpikeParams& params, const GridSpec& grid, RandomSource& rng);

// Exact AR(1) transition of log X^c: Y' = e^{-kappa mesh} Y + N(0, vol^2 (1 - e^{-2 kappa mesh}) / (2 kappa)).
SampledPath simulate_exp_ou(const ExpOUSpec& spec, const GridSpec& grid, RandomSource& rng);

// Exact joint Gaussian recursion for (W^l, Y); spot = curve(t) exp(-v(t)/2 + sigma_l W^l + sigma_s Y).
// The deterministic parts are computed once so many paths can share them.
class TwoFactorSimulator {
public:
    TwoFactorSimulator(const TwoFactorParams& params, const ForwardCurve& curve, const GridSpec& grid);

    // `mirror` negates every Gaussian shock, giving the antithetic partner path.
    TwoFactorPath run(RandomSource& rng, bool mirror = false) const;
    const GridSpec& grid() const { return grid_; }

private:
    TwoFactorParams params_;
    GridSpec grid_;
    double decay_;
    Eigen::Matrix2d chol_;
    Eigen::VectorXd base_;  // curve(t_i) exp(-v(t_i)/2)
};

TwoFactorPath simulate_two_factor(const TwoFactorParams& params, const ForwardCurve& curve, const GridSpec& grid,
                                  RandomSource& rng);

SampledPath simulate_continuous(const ContinuousSpec& spec, const GridSpec& grid, RandomSource& rng);

// Continuous part from rng.derive(1), jumps from rng.derive(2).
SimulatedPath simulate_spot(const ModelSpec& model, const GridSpec& grid, const RandomSource& rng);

// Adds a spike process built from given records to a continuous path.
SimulatedPath assemble_path(const SampledPath& continuous, std::vector<JumpRecord> records, double reversion);

}  // namespace spikelab
