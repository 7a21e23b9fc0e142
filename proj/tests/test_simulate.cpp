#include "catch_amalgamated.hpp"

#include <cmath>

#include "oracles.hpp"
#include "spikelab/simulate.hpp"

using namespace spikelab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("no jumps gives an identically zero spike path", "[simulate]") {
    RandomSource rng(3);
    const auto sim = simulate_spikes({1e-12, 50.0, JumpLaw::point_mass(1.0)}, GridSpec(1000), rng);
    CHECK(sim.truth.empty());
    CHECK(sim.spike.values().isZero(0.0));
}

TEST_CASE("single jump unrolls to exponential decay", "[simulate]") {
    const GridSpec grid(100, 1.0);
    const double beta = 30.0, a = 2.0, tau = 0.123;
    const std::vector<JumpRecord> records{{tau, a}};
    const SampledPath z = spike_path_from_records(records, beta, grid);
    const Index i = grid.interval_of(tau);
    REQUIRE(i == 13);
    for (Index j = 0; j < i; ++j) CHECK(z.values()[j] == 0.0);
    CHECK_THAT(z.values()[i], WithinRel(a * std::exp(-beta * (grid.time(i) - tau)), 1e-14));
    for (Index j = i + 1; j <= grid.n(); ++j)
        CHECK_THAT(z.values()[j], WithinRel(z.values()[i] * std::exp(-beta * (j - i) * grid.mesh()), 1e-12));
}

TEST_CASE("records must be sorted and inside the horizon", "[simulate]") {
    const GridSpec grid(10);
    CHECK_THROWS(spike_path_from_records(std::vector<JumpRecord>{{0.5, 1.0}, {0.2, 1.0}}, 1.0, grid));
    CHECK_THROWS(spike_path_from_records(std::vector<JumpRecord>{{1.5, 1.0}}, 1.0, grid));
}

TEST_CASE("spike path agrees with the shot-noise sum and decays exactly between jumps", "[simulate]") {
    const GridSpec grid(10000);
    const SpikeParams params{40.0, 200.0, study_jump_law()};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RandomSource rng(seed);
        const auto sim = simulate_spikes(params, grid, rng);
        const double decay = std::exp(-params.reversion * grid.mesh());

        // Rebuilding from the records is bit-identical.
        const SampledPath again = spike_path_from_records(sim.truth, params.reversion, grid);
        CHECK(again.values() == sim.spike.values());

        std::vector<bool> has_jump(static_cast<std::size_t>(grid.n()) + 1, false);
        for (std::size_t q = 0; q < sim.truth.size(); ++q) {
            const auto& r = sim.truth[q];
            CHECK(r.size != 0.0);
            CHECK(r.time > 0.0);
            CHECK(r.time <= 1.0);
            if (q > 0) CHECK(r.time > sim.truth[q - 1].time);
            CHECK(r.time != grid.time(grid.interval_of(r.time)));
            has_jump[static_cast<std::size_t>(grid.interval_of(r.time))] = true;
        }
        for (Index i = 1; i <= grid.n(); ++i) {
            if (!has_jump[static_cast<std::size_t>(i)])
                REQUIRE(sim.spike.values()[i] == sim.spike.values()[i - 1] * decay);
        }
        for (Index i : {Index{1}, Index{2500}, Index{7777}, Index{10000}}) {
            const double brute = oracle::shot_noise_at(sim.truth, params.reversion, grid.time(i));
            CHECK_THAT(sim.spike.values()[i], WithinAbs(brute, 1e-9 * (1.0 + std::abs(brute))));
        }
    }
}

TEST_CASE("variance of Z_1 matches the stationary formula", "[simulate]") {
    const double lambda = 10.0, beta = 200.0;
    const SpikeParams params{lambda, beta, study_jump_law()};
    const GridSpec grid(2);
    std::vector<double> z1;
    for (std::uint64_t p = 0; p < 20000; ++p) {
        RandomSource rng(derive_seed(11, p));
        z1.push_back(simulate_spikes(params, grid, rng).spike.values()[2]);
    }
    const auto s = oracle::mean_se(z1);
    const double second = law_moment(params.law, MomentKind::Absolute, 2);
    const double expected = lambda / (2.0 * beta) * (1.0 - std::exp(-2.0 * beta)) * second;
    // Standard error of a sample variance from the fourth central moment.
    double m4 = 0.0;
    for (double v : z1) m4 += std::pow(v - s.mean, 4);
    m4 /= static_cast<double>(z1.size());
    const double var_se = std::sqrt((m4 - s.var * s.var) / static_cast<double>(z1.size()));
    CHECK(std::abs(s.var - expected) < 3.0 * var_se);
}

TEST_CASE("exp-OU noiseless limits", "[simulate]") {
    const GridSpec grid(1000);
    RandomSource rng(5);
    const SampledPath one = simulate_exp_ou({100.0, 1e-300, 1.0}, grid, rng);
    CHECK((one.values().array() == 1.0).all());

    const SampledPath decay = simulate_exp_ou({100.0, 1e-300, std::exp(1.0)}, grid, rng);
    for (Index i = 0; i <= grid.n(); i += 50)
        CHECK_THAT(std::log(decay.values()[i]), WithinAbs(std::exp(-100.0 * grid.time(i)), 1e-14));

    CHECK_THROWS(simulate_exp_ou({100.0, 0.0, 1.0}, grid, rng));
    CHECK_THROWS(simulate_exp_ou({100.0, 1.0, -1.0}, grid, rng));
}

TEST_CASE("exp-OU log variance at t = 1", "[simulate]") {
    const ExpOUSpec spec{100.0, 2.0, 1.0};
    const GridSpec grid(4);
    std::vector<double> logs;
    for (std::uint64_t p = 0; p < 100000; ++p) {
        RandomSource rng(derive_seed(21, p));
        const SampledPath path = simulate_exp_ou(spec, grid, rng);
        REQUIRE((path.values().array() > 0.0).all());
        logs.push_back(std::log(path.values()[4]));
    }
    const auto s = oracle::mean_se(logs);
    const double expected = 4.0 * (1.0 - std::exp(-200.0)) / 200.0;
    CHECK_THAT(expected, WithinAbs(0.02, 1e-15));
    CHECK(std::abs(s.var - expected) < 3.0 * expected * std::sqrt(2.0 / (logs.size() - 1.0)));
    CHECK(std::abs(s.mean) < 3.0 * s.se);
}

TEST_CASE("simulated spot is the exact sum of its parts", "[simulate]") {
    const GridSpec grid(5000);
    const ModelSpec model{ExpOUSpec{}, SpikeParams{20.0, 500.0, study_jump_law()}};
    const SimulatedPath a = simulate_spot(model, grid, RandomSource(99));
    const SimulatedPath b = simulate_spot(model, grid, RandomSource(99));
    CHECK(a.spike.values()[0] == 0.0);
    CHECK(a.observed.values() == (a.continuous.values() + a.spike.values()).eval());
    CHECK(a.observed.values() == b.observed.values());
    CHECK(a.truth.size() == b.truth.size());
    const SimulatedPath c = simulate_spot(model, grid, RandomSource(100));
    CHECK(a.observed.values() != c.observed.values());
}

TEST_CASE("tiny intensity leaves the continuous part", "[simulate]") {
    const GridSpec grid(2000);
    const ModelSpec model{ExpOUSpec{}, SpikeParams{1e-9, 200.0, JumpLaw::point_mass(1.0)}};
    const SimulatedPath path = simulate_spot(model, grid, RandomSource(1));
    CHECK(path.truth.empty());
    CHECK(path.observed.values() == path.continuous.values());
}

TEST_CASE("flat continuous part with a forced jump", "[simulate]") {
    const GridSpec grid(100);
    const SampledPath flat(grid, Eigen::VectorXd::Constant(101, 5.0));
    const SimulatedPath path = assemble_path(flat, {{0.305, 2.0}}, 50.0);
    CHECK(path.observed.values() == (path.spike.values().array() + 5.0).matrix());
    CHECK(path.spike.values()[30] == 0.0);
    CHECK(path.spike.values()[31] > 0.0);
}

TEST_CASE("two-factor without volatility reproduces the curve", "[simulate]") {
    const GridSpec grid(12, 1.0);
    const ForwardCurve curve = ForwardCurve::piecewise({0.0, 0.25, 0.5}, {40.0, 55.0, 35.0});
    RandomSource rng(8);
    const TwoFactorPath path = simulate_two_factor({5.0, 0.0, 0.0, 0.0}, curve, grid, rng);
    for (Index i = 0; i <= grid.n(); ++i) CHECK(path.spot.values()[i] == curve(grid.time(i)));
}

TEST_CASE("two-factor spot is a martingale with Gaussian logs of the right variance", "[simulate]") {
    const TwoFactorParams params{12.56, 1.03, 0.25, -0.11};
    const ForwardCurve curve = ForwardCurve::flat(40.0);
    const GridSpec grid(24, 1.0);
    const TwoFactorSimulator sim(params, curve, grid);
    const Index check = 12;
    const double t = grid.time(check);
    const double v = two_factor_log_variance(params, t, t);

    std::vector<double> spot, logs;
    for (std::uint64_t p = 0; p < 20000; ++p) {
        RandomSource rng(derive_seed(5, p));
        const TwoFactorPath path = sim.run(rng);
        spot.push_back(path.spot.values()[check]);
        logs.push_back(std::log(path.spot.values()[check]));
    }
    const auto s = oracle::mean_se(spot);
    CHECK(std::abs(s.mean - 40.0) < 3.0 * s.se);

    const double mu = std::log(40.0) - 0.5 * v;
    const double p = oracle::ks_pvalue(logs, [&](double x) { return oracle::normal_cdf((x - mu) / std::sqrt(v)); });
    CHECK(p > 0.01);
}

TEST_CASE("two-factor log variance formula", "[simulate]") {
    const TwoFactorParams params{12.56, 1.03, 0.25, -0.11};
    // Direct quadrature of the instantaneous variance of log f(s, T) over [0, t].
    const double t = 0.4, maturity = 0.7;
    auto inst = [&](double s) {
        const double e = std::exp(-params.alpha * (maturity - s));
        return params.sigma_l * params.sigma_l + params.sigma_s * params.sigma_s * e * e +
               2.0 * params.rho * params.sigma_l * params.sigma_s * e;
    };
    CHECK_THAT(two_factor_log_variance(params, t, maturity), WithinRel(oracle::simpson(inst, 0.0, t, 2000), 1e-10));
    CHECK(two_factor_log_variance(params, 0.0, maturity) == 0.0);
}

TEST_CASE("calibrated two-factor model runs on an hourly year", "[simulate]") {
    RandomSource rng(1);
    const TwoFactorPath path =
        simulate_two_factor({12.56, 1.03, 0.25, -0.11}, ForwardCurve::flat(40.0), GridSpec(8760), rng);
    CHECK(path.spot.values().allFinite());
    CHECK((path.spot.values().array() > 0.0).all());
}
