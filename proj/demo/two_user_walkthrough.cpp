// Walkthrough on a two-user, two-channel scenario: run the learning loop,
// print the play round by round, then enumerate the pure equilibria of the
// same instance and check the final profile against them.
#include <cstdio>

#include "disg/engine.hpp"
#include "disg/scenario.hpp"
#include "disg/verify.hpp"

static disg::Scenario make_two_user() {
    disg::Scenario sc;
    sc.channels = {11, 12};
    sc.p_min = 29.04;
    sc.p_max = 57.42;
    sc.power_levels = {29.04, 32.67, 36.3, 42.24, 46.2, 50.69, 55.18, 57.42};
    sc.delta = 2.4;
    sc.snap_mode = disg::SnapMode::nearest_level;
    disg::UserConfig a;
    a.id = 1; a.x = 0.0; a.y = 0.0;
    disg::UserConfig b;
    b.id = 2; b.x = 1.0; b.y = 0.0;
    sc.users = {a, b};
    disg::finalize_scenario(sc);
    return sc;
}

int main() {
    const disg::Scenario sc = make_two_user();
    const disg::Trace trace = disg::run_disg(sc, /*seed=*/7, /*max_iterations=*/200,
                                             /*lock_threshold=*/0.9);

    std::printf("round  u1:ch  u1:p(mW)  u2:ch  u2:p(mW)  avg SINR (dB)\n");
    for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
        const auto& rec = trace.rounds[r];
        std::printf("%5llu  %5d  %8.4f  %5d  %8.4f  %12.4f\n",
                    static_cast<unsigned long long>(rec.iter),
                    sc.channels[rec.actions[0].channel], rec.actions[0].power,
                    sc.channels[rec.actions[1].channel], rec.actions[1].power,
                    trace.avg_sinr_db_per_round[r]);
    }
    std::printf("converged=%s convergence_iter=%llu avg_sinr_db_last_quartile=%.4f\n",
                trace.converged ? "yes" : "no",
                static_cast<unsigned long long>(trace.convergence_iter),
                trace.avg_sinr_db_last_quartile);

    // Enumerate pure equilibria over the discrete power set and compare.
    const auto equilibria = disg::brute_force_ne(sc, sc.power_levels);
    std::printf("pure equilibria over the level set: %zu\n", equilibria.size());
    for (const auto& prof : equilibria)
        std::printf("  u1 ch%d @ %.2f mW, u2 ch%d @ %.2f mW\n",
                    sc.channels[prof[0].channel], prof[0].power,
                    sc.channels[prof[1].channel], prof[1].power);

    disg::StrategyProfile final_profile(sc.num_users());
    for (std::size_t i = 0; i < sc.num_users(); ++i)
        final_profile[i] = disg::Action{trace.final_channels[i], trace.final_powers[i]};
    const auto report = disg::check_profile(sc, final_profile, /*power_grid_size=*/0);
    std::printf("final profile max relative improvement over the level set: %.3g\n",
                report.max_improvement_rel);
    return 0;
}
