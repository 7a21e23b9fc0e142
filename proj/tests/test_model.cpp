#include "catch_amalgamated.hpp"

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "spikelab/model.hpp"

using namespace spikelab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

JumpLaw rate_mixture() { return JumpLaw::exponential_mixture({0.4, 0.6}, {15.0, 10.0}, {-1, 1}); }

}  // namespace

TEST_CASE("grid mesh and interval lookup", "[model]") {
    const GridSpec grid(10000, 1.0);
    CHECK(grid.mesh() == 1.0 / 10000.0);
    CHECK(grid.time(10000) == 1.0);
    CHECK(grid.interval_of(1e-9) == 1);
    CHECK(grid.interval_of(grid.time(7)) == 7);
    CHECK(grid.interval_of(std::nextafter(grid.time(7), 1.0)) == 8);
    CHECK(grid.interval_of(1.0) == 10000);
    CHECK_THROWS(grid.interval_of(0.0));
    CHECK_THROWS(grid.interval_of(1.5));
    CHECK_THROWS(GridSpec(1, 1.0));
    CHECK_THROWS(GridSpec(10, 0.0));
    CHECK(GridSpec(4, 2.0).mesh() == 0.5);
}

TEST_CASE("sampled path validates size and finiteness", "[model]") {
    const GridSpec grid(3);
    CHECK_THROWS(SampledPath(grid, Eigen::VectorXd::Zero(3)));
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    bad[2] = std::nan("");
    CHECK_THROWS(SampledPath(grid, bad));
    Eigen::VectorXd v(4);
    v << 1.0, 3.0, 2.0, 7.0;
    const SampledPath path(grid, v);
    CHECK(path.increment(1) == 2.0);
    CHECK(path.increment(3) == 5.0);
    const Eigen::VectorXd inc = path.increments();
    REQUIRE(inc.size() == 3);
    CHECK(inc[1] == -1.0);
}

TEST_CASE("jump law construction rules", "[model]") {
    CHECK_THROWS(JumpLaw::exponential_mixture({0.5, 0.4}, {1.0, 1.0}, {1, -1}));
    CHECK_THROWS(JumpLaw::exponential_mixture({0.5, 0.5}, {1.0, -1.0}, {1, -1}));
    CHECK_THROWS(JumpLaw::exponential_mixture({0.5, 0.5}, {1.0, 1.0}, {1, 0}));
    CHECK_THROWS(JumpLaw::empirical({1.0, 0.0}));
    CHECK_THROWS(JumpLaw::empirical({}));
    CHECK_THROWS(JumpLaw::point_mass(0.0));
    CHECK_THROWS(validate(SpikeParams{0.0, 1.0, JumpLaw::point_mass(1.0)}));
    CHECK_THROWS(validate(SpikeParams{1.0, -1.0, JumpLaw::point_mass(1.0)}));
}

TEST_CASE("point mass sampling and moments", "[model]") {
    RandomSource rng(1);
    const JumpLaw law = JumpLaw::point_mass(2.5);
    for (int i = 0; i < 100; ++i) CHECK(sample_jump(law, rng) == 2.5);

    const JumpLaw neg = JumpLaw::point_mass(-3.0);
    CHECK(law_moment(neg, MomentKind::Signed, 1) == -3.0);
    CHECK(law_moment(neg, MomentKind::Absolute, 2) == 9.0);
    CHECK(law_moment(neg, MomentKind::SignMass) == -1.0);

    for (double a : {-2.0, -0.5, 0.3, 1.0, 4.0})
        for (int m = 1; m <= 4; ++m)
            CHECK_THAT(law_moment(JumpLaw::point_mass(a), MomentKind::Signed, m), WithinRel(std::pow(a, m), 1e-15));
}

TEST_CASE("mixture moments in closed form", "[model]") {
    const JumpLaw law = rate_mixture();
    CHECK_THAT(law_moment(law, MomentKind::Signed, 1), WithinAbs(-0.4 / 15 + 0.6 / 10, 1e-15));
    CHECK_THAT(law_moment(law, MomentKind::Absolute, 1), WithinAbs(0.4 / 15 + 0.6 / 10, 1e-15));
    CHECK_THAT(law_moment(law, MomentKind::Absolute, 1), WithinAbs(0.086667, 1e-6));
    CHECK_THAT(law_moment(law, MomentKind::SignMass), WithinAbs(0.2, 1e-15));
    CHECK_THAT(law_moment(law, MomentKind::Absolute, 2), WithinAbs(0.4 * 2 / 225 + 0.6 * 2 / 100, 1e-15));
    CHECK_THROWS_AS(law_moment(law, MomentKind::Absolute, -1), std::domain_error);

    const JumpLaw study = study_jump_law();
    CHECK_THAT(law_moment(study, MomentKind::Signed, 1), WithinAbs(-0.4 * 15 + 0.6 * 10, 1e-12));
    CHECK_THAT(law_moment(study, MomentKind::Absolute, 2), WithinAbs(300.0, 1e-10));
}

TEST_CASE("empirical law moments are plain sample averages", "[model]") {
    const std::vector<double> s{1.0, -2.0, 3.0, 0.5};
    const JumpLaw law = JumpLaw::empirical(s);
    CHECK(law_moment(law, MomentKind::Signed, 1) == (1.0 - 2.0 + 3.0 + 0.5) / 4.0);
    CHECK(law_moment(law, MomentKind::Absolute, 2) == (1.0 + 4.0 + 9.0 + 0.25) / 4.0);
    CHECK(law_moment(law, MomentKind::SignMass) == 0.5);
    CHECK_THAT(law_exp_moment(law, 0.7),
               WithinRel((std::exp(0.7) + std::exp(-1.4) + std::exp(2.1) + std::exp(0.35)) / 4.0, 1e-15));
}

TEST_CASE("exponential moments", "[model]") {
    CHECK(law_exp_moment(rate_mixture(), 0.0) == 1.0);
    CHECK(law_exp_moment(JumpLaw::point_mass(-2.0), 0.0) == 1.0);
    CHECK(law_exp_moment(JumpLaw::empirical({1.0, 5.0}), 0.0) == 1.0);
    CHECK_THAT(law_exp_moment(JumpLaw::point_mass(1.7), 0.6), WithinRel(std::exp(1.02), 1e-15));

    const double expected = 0.4 * 15.0 / 16.0 + 0.6 * 10.0 / 9.0;
    CHECK_THAT(law_exp_moment(rate_mixture(), 1.0), WithinRel(expected, 1e-14));
    CHECK_THAT(law_exp_moment(rate_mixture(), 1.0), WithinAbs(1.04167, 1e-5));

    // Component 2 is +Exp(rate 10): diverges for u >= 10.
    try {
        law_exp_moment(rate_mixture(), 10.0);
        FAIL("expected divergence");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("component 2") != std::string::npos);
    }

    // Convexity on a grid inside the strip.
    const JumpLaw law = rate_mixture();
    for (double u = -5.0; u < 9.0; u += 0.5) {
        const double h = 0.25;
        CHECK(law_exp_moment(law, u - h) + law_exp_moment(law, u + h) >= 2.0 * law_exp_moment(law, u));
    }
}

TEST_CASE("mixture sampling matches the analytic mean", "[model]") {
    RandomSource rng(42);
    const JumpLaw law = rate_mixture();
    const int n = 1000000;
    std::vector<double> draws(n);
    for (double& d : draws) {
        d = sample_jump(law, rng);
        REQUIRE(d != 0.0);
    }
    const auto stats = oracle::mean_se(draws);
    CHECK(std::abs(stats.mean - (-0.4 / 15 + 0.6 / 10)) < 3.0 * stats.se);
    CHECK(std::abs(stats.mean - law_moment(law, MomentKind::Signed, 1)) < 4.0 * stats.se);
}

TEST_CASE("empirical sampling resamples uniformly", "[model]") {
    RandomSource rng(7);
    const JumpLaw law = JumpLaw::empirical({1.0, -2.0, 3.0});
    const int n = 1000000;
    std::map<double, int> counts;
    for (int i = 0; i < n; ++i) ++counts[sample_jump(law, rng)];
    REQUIRE(counts.size() == 3);
    const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
    for (const auto& [value, c] : counts) CHECK(std::abs(c / double(n) - 1.0 / 3.0) < 4.0 * se);
}

TEST_CASE("assumption diagnostics", "[model]") {
    const GridSpec grid(10000, 1.0);
    const JumpLaw law = study_jump_law();

    const auto moderate = check_assumptions({10.0, 200.0, law}, grid, 0.01);
    CHECK_THAT(moderate.beta_delta, WithinRel(0.02, 1e-12));
    CHECK_THAT(moderate.lambda_sq_delta, WithinRel(0.01, 1e-12));
    CHECK(moderate.regime_one);
    CHECK(moderate.regime == Regime::I);

    const auto fast = check_assumptions({10.0, 20000.0, law}, grid, 0.01);
    CHECK_THAT(fast.beta_delta, WithinRel(2.0, 1e-12));
    CHECK_FALSE(fast.beta_delta_small);
    CHECK(fast.regime_two);
    CHECK(fast.regime == Regime::II);

    const auto tiny = check_assumptions({0.5, 1.0, law}, grid, 0.01);
    CHECK(tiny.lambda_delta_small);
    CHECK(tiny.beta_delta_small);
    CHECK(tiny.lambda_sq_delta_small);
    CHECK(tiny.regime == Regime::I);

    const auto windowed = check_assumptions({10.0, 20000.0, law}, grid, 0.01, Index{5});
    REQUIRE(windowed.lambda_sq_delta_window_sq);
    CHECK_THAT(*windowed.lambda_sq_delta_window_sq, WithinRel(0.25, 1e-12));
    CHECK_FALSE(windowed.regime_two);

    CHECK_THROWS(check_assumptions({10.0, 200.0, law}, grid, 0.0));
    CHECK_THROWS(check_assumptions({10.0, 200.0, law}, grid, 0.5));
}
