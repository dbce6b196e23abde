#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "disg/engine.hpp"
#include "disg/game.hpp"
#include "disg/verify.hpp"
#include "helpers.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("two-user enumeration finds exactly the distinct-channel equilibria") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const auto equilibria = disg::brute_force_ne(sc, sc.power_levels);
    REQUIRE(equilibria.size() == 2);
    for (const auto& prof : equilibria) {
        REQUIRE(prof[0].channel != prof[1].channel);
        // Both users sit on the level bracketing the interference-free optimum.
        REQUIRE(prof[0].power == 50.69);
        REQUIRE(prof[1].power == 50.69);
    }
}

TEST_CASE("single-user enumeration equals independent minimization") {
    const disg::Scenario sc = testutil::single_scenario();
    const auto equilibria = disg::brute_force_ne(sc, sc.power_levels);
    REQUIRE(equilibria.size() == 1);
    REQUIRE(equilibria[0][0].channel == 0);

    // Independent scan over channels x levels for the same user.
    double best_u = 1e300;
    double best_p = 0.0;
    for (double p : sc.power_levels) {
        const double u = disg::utility(sc, 0, p, sc.users[0].eta);
        if (u < best_u) {
            best_u = u;
            best_p = p;
        }
    }
    REQUIRE(equilibria[0][0].power == best_p);
}

TEST_CASE("oversized instances are refused with a dedicated error") {
    const disg::Scenario sc = testutil::default_scenario();
    // 5 channels, 8 levels, 5 users: (5*8)^5 > the enumeration guard.
    REQUIRE_THROWS_AS(disg::brute_force_ne(sc, sc.power_levels), disg::instance_too_large);
}

TEST_CASE("every enumerated equilibrium survives the profile check") {
    const disg::Scenario sc = testutil::two_user_scenario();
    for (const auto& prof : disg::brute_force_ne(sc, sc.power_levels)) {
        const auto report = disg::check_profile(sc, prof, 0);
        REQUIRE(report.max_improvement_abs == 0.0);
        REQUIRE(report.max_improvement_rel == 0.0);
    }
}

TEST_CASE("a colliding profile shows a strictly positive improvement") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::StrategyProfile colliding = {{0, 50.69}, {0, 50.69}};
    const auto report = disg::check_profile(sc, colliding, 0);
    REQUIRE(report.max_improvement_abs > 0.0);
    REQUIRE(report.max_improvement_rel > 0.0);
    // Both users gain by fleeing to the empty channel.
    REQUIRE(report.per_user_abs[0] > 0.0);
    REQUIRE(report.per_user_abs[1] > 0.0);
}

TEST_CASE("single user at its argmin has exactly zero improvement") {
    const disg::Scenario sc = testutil::single_scenario();
    const disg::StrategyProfile prof = {{0, 50.69}};
    const auto report = disg::check_profile(sc, prof, 0);
    REQUIRE(report.max_improvement_abs == 0.0);
}

TEST_CASE("deviation power set merges levels with the uniform grid") {
    const disg::Scenario sc = testutil::single_scenario();
    const auto levels_only = disg::deviation_powers(sc, 0);
    REQUIRE(levels_only == sc.power_levels);

    const auto merged = disg::deviation_powers(sc, 64);
    REQUIRE(merged.size() >= 64);
    REQUIRE(merged.front() == sc.p_min);
    REQUIRE(merged.back() == sc.p_max);
    for (std::size_t i = 1; i < merged.size(); ++i) REQUIRE(merged[i] > merged[i - 1]);
    for (double level : sc.power_levels)
        REQUIRE(std::find(merged.begin(), merged.end(), level) != merged.end());
}

TEST_CASE("empirical distribution over a trace window is normalized") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::Trace trace = disg::run_disg(sc, 7, 500, 0.9);
    REQUIRE(trace.converged);
    const auto dist = disg::empirical_distribution(trace, 1, trace.convergence_iter);
    REQUIRE(dist.profiles.size() == dist.weights.size());
    REQUIRE(dist.profiles.size() <= trace.convergence_iter);
    double sum = 0.0;
    for (double w : dist.weights) {
        REQUIRE(w > 0.0);
        sum += w;
    }
    REQUIRE_THAT(sum, WithinAbs(1.0, 1e-12));
}

TEST_CASE("point mass on an equilibrium is an exact correlated equilibrium") {
    const disg::Scenario sc = testutil::two_user_scenario();
    for (const auto& prof : disg::brute_force_ne(sc, sc.power_levels)) {
        const auto ce = disg::check_ce(disg::point_mass(prof), sc);
        REQUIRE(ce.epsilon_abs == 0.0);
        REQUIRE(ce.epsilon_rel == 0.0);
    }
}

TEST_CASE("point mass on a colliding profile matches its best deviation") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::StrategyProfile colliding = {{0, 50.69}, {0, 50.69}};
    const auto ce = disg::check_ce(disg::point_mass(colliding), sc);
    const auto report = disg::check_profile(sc, colliding, 0);
    REQUIRE(ce.epsilon_abs > 0.0);
    REQUIRE_THAT(ce.epsilon_abs, WithinRel(report.max_improvement_abs, 1e-12));
}

TEST_CASE("check_ce rejects an unnormalized distribution") {
    const disg::Scenario sc = testutil::two_user_scenario();
    disg::EmpiricalDistribution dist;
    dist.profiles = {{{0, 50.69}, {1, 50.69}}};
    dist.weights = {0.7};
    REQUIRE_THROWS_AS(disg::check_ce(dist, sc), std::invalid_argument);
}

TEST_CASE("epsilon from real play is finite and nonnegative") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::Trace trace = disg::run_disg(sc, 11, 500, 0.9);
    REQUIRE(trace.converged);
    const auto dist = disg::empirical_distribution(trace, 1, trace.convergence_iter);
    const auto ce = disg::check_ce(dist, sc);
    REQUIRE(ce.epsilon_abs >= 0.0);
    REQUIRE(std::isfinite(ce.epsilon_abs));
    REQUIRE(ce.epsilon_rel >= 0.0);
}
