// Round orchestration: runs the decentralized game (all users acting
// synchronously on the previous round's observations), the no-learning
// baselines, convergence detection, the post-lock power settling pass, and
// trace recording.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "disg/game.hpp"
#include "disg/learning.hpp"
#include "disg/radio.hpp"
#include "disg/rng.hpp"
#include "disg/scenario.hpp"

namespace disg {

// Everything recorded about one synchronous round.
struct RoundRecord {
    std::uint64_t iter = 0;                         // 1-based round index
    StrategyProfile actions;                        // per user
    std::vector<double> sinr_linear;                // per user
    std::vector<double> sinr_db;                    // per user
    std::vector<double> utility;                    // per user
    std::vector<double> max_omega;                  // per user, end-of-round
    std::vector<bool> locked;                       // per user, end-of-round
    std::vector<std::vector<double>> observations;  // per user, per channel (mW)
};

struct Trace {
    std::string scenario_fingerprint;
    std::uint64_t seed = 0;
    std::string mode;                 // "disg", "baseline", or "baseline-shared"
    double lock_threshold = 0.0;
    std::uint64_t max_iterations = 0;
    std::vector<RoundRecord> rounds;

    bool converged = false;
    std::uint64_t convergence_iter = 0;      // round at which every user was locked
    std::vector<std::size_t> final_channels; // channel indices, per user
    std::vector<double> final_powers;        // mW, per user
    std::vector<double> avg_sinr_db_per_round;
    double avg_sinr_db_full = 0.0;
    double avg_sinr_db_last_quartile = 0.0;

    // Feasibility bookkeeping: (user, round, channel) observations that
    // violated the interference budget / reachability bounds, plus the static
    // weighting-ratio condition (per-user AND).
    std::uint64_t budget_violations = 0;
    std::uint64_t target_violations = 0;
    bool ratio_ok = true;
};

// Mean SINR over the trailing window of a trace: per round the *linear* SINR
// is averaged across users, those per-round means are averaged over the last
// ceil(window * rounds) rounds, and only the final result moves to dB.
// Averaging in the dB domain would understate the mean and is avoided
// throughout.
inline double average_sinr(const Trace& trace, double window) {
    if (trace.rounds.empty()) throw std::invalid_argument("average_sinr: empty trace");
    if (!(window > 0.0) || !(window <= 1.0))
        throw std::invalid_argument("average_sinr: window must lie in (0, 1]");
    const std::size_t n = trace.rounds.size();
    const std::size_t take =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(window * static_cast<double>(n))));
    double acc = 0.0;
    for (std::size_t r = n - take; r < n; ++r) {
        const auto& rec = trace.rounds[r];
        double mean = 0.0;
        for (double v : rec.sinr_linear) mean += v;
        acc += mean / static_cast<double>(rec.sinr_linear.size());
    }
    return to_db(acc / static_cast<double>(take));
}

struct SettleResult {
    std::vector<double> powers;
    bool converged = false;
    double residual = 0.0;
    std::uint64_t iterations = 0;
};

// Fixed-point power iteration on a frozen channel assignment: every user
// simultaneously replaces its power with the clamped closed-form optimum
// against the previous iterate's interference, until the largest per-user
// change drops below `tolerance`.  The interference map is a standard
// interference function (positive, monotone, scalable), so the iteration
// contracts to the unique fixed point from any starting vector.
//
// Powers are continuous here regardless of snap mode: this is the limit the
// power subgame settles to once channels stop moving.
inline SettleResult settle_powers(const Scenario& sc, const std::vector<std::size_t>& assignment,
                                  std::vector<double> start, double tolerance,
                                  std::uint64_t max_rounds) {
    const std::size_t m = sc.num_users();
    if (assignment.size() != m || start.size() != m)
        throw std::invalid_argument("settle_powers: need one channel and one power per user");

    SettleResult out;
    out.powers = std::move(start);
    StrategyProfile prof(m);
    for (std::size_t i = 0; i < m; ++i) prof[i] = {assignment[i], out.powers[i]};

    for (std::uint64_t round = 1; round <= max_rounds; ++round) {
        double max_change = 0.0;
        std::vector<double> next(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double I = interference(sc, prof, i, assignment[i]);
            const auto& u = sc.users[i];
            double p = u.gamma0 * I / sc.gain[i] -
                       u.xi * I * I / (2.0 * u.tau * sc.gain[i] * sc.gain[i]);
            p = std::min(std::max(p, sc.p_min), sc.p_max);
            next[i] = p;
            max_change = std::max(max_change, std::abs(p - out.powers[i]));
        }
        out.powers = next;
        for (std::size_t i = 0; i < m; ++i) prof[i].power = next[i];
        out.iterations = round;
        out.residual = max_change;
        if (max_change < tolerance) {
            out.converged = true;
            break;
        }
    }
    return out;
}

namespace detail {

inline void record_round(const Scenario& sc, Trace& trace, std::uint64_t iter,
                         const StrategyProfile& prof,
                         const std::vector<std::vector<double>>& obs,
                         const std::vector<double>& max_omega,
                         const std::vector<bool>& locked) {
    const std::size_t m = sc.num_users();
    RoundRecord rec;
    rec.iter = iter;
    rec.actions = prof;
    rec.observations = obs;
    rec.max_omega = max_omega;
    rec.locked = locked;
    rec.sinr_linear.resize(m);
    rec.sinr_db.resize(m);
    rec.utility.resize(m);
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double I = obs[i][prof[i].channel];
        rec.sinr_linear[i] = sc.gain[i] * prof[i].power / I;
        rec.sinr_db[i] = to_db(rec.sinr_linear[i]);
        rec.utility[i] = utility(sc, i, prof[i].power, I);
        mean += rec.sinr_linear[i];
    }
    trace.avg_sinr_db_per_round.push_back(to_db(mean / static_cast<double>(m)));
    trace.rounds.push_back(std::move(rec));
}

inline void tally_feasibility(const Scenario& sc, Trace& trace,
                              const std::vector<std::vector<double>>& obs) {
    for (std::size_t i = 0; i < sc.num_users(); ++i) {
        InterferenceObservation o{i, obs[i]};
        const FeasibilityReport rep = check_feasibility(sc, o, i);
        if (!rep.ratio_ok) trace.ratio_ok = false;
        for (std::size_t j = 0; j < obs[i].size(); ++j) {
            if (!rep.budget_ok[j]) ++trace.budget_violations;
            if (!rep.target_ok[j]) ++trace.target_violations;
        }
    }
}

inline void finish_summary(Trace& trace) {
    trace.avg_sinr_db_full = average_sinr(trace, 1.0);
    trace.avg_sinr_db_last_quartile = average_sinr(trace, 0.25);
}

} // namespace detail

// Runs the full decentralized game.
//
// Per round, synchronously:
//   1. every user selects a channel (exploration / regret sampling / locked);
//   2. every user optimizes its power for that channel against the *previous*
//      round's observation (round 1 bootstraps with a noise-only view);
//   3. the joint profile is realized, all-channel interference is observed,
//      realized and counterfactual costs are computed, and regrets update.
//
// The run terminates once every user is locked, then performs one settling
// pass: the locked assignment's continuous power fixed point is computed and
// recorded as one final round, so the trace ends at the equilibrium the
// locked channels induce.  Hitting max_iterations without a full lock is a
// reported outcome (converged = false), not an error.
inline Trace run_disg(const Scenario& sc, std::uint64_t seed, std::uint64_t max_iterations,
                      double lock_threshold) {
    if (max_iterations < 1) throw std::invalid_argument("run_disg: max_iterations must be >= 1");
    const std::size_t m = sc.num_users();
    const std::size_t n = sc.num_channels();

    Trace trace;
    trace.scenario_fingerprint = fingerprint(sc);
    trace.seed = seed;
    trace.mode = "disg";
    trace.lock_threshold = lock_threshold;
    trace.max_iterations = max_iterations;

    Rng rng(seed);
    std::vector<RegretState> states;
    states.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        states.push_back(make_regret_state(i, n, lock_threshold));

    // Noise-only bootstrap observation.
    std::vector<std::vector<double>> obs_prev(m);
    for (std::size_t i = 0; i < m; ++i) obs_prev[i].assign(n, sc.users[i].eta);

    for (std::uint64_t iter = 1; iter <= max_iterations; ++iter) {
        StrategyProfile prof(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t ch = select_channel(states[i], rng);
            prof[i] = {ch, best_power(sc, i, obs_prev[i][ch]).power};
        }

        std::vector<std::vector<double>> obs(m);
        for (std::size_t i = 0; i < m; ++i) obs[i] = observe(sc, prof, i).per_channel;
        detail::tally_feasibility(sc, trace, obs);

        std::vector<double> max_omega(m);
        std::vector<bool> locked(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t ch = prof[i].channel;
            const double actual = utility(sc, i, prof[i].power, obs[i][ch]);
            std::vector<double> counterfactual(n);
            for (std::size_t j = 0; j < n; ++j) {
                counterfactual[j] =
                    j == ch ? actual
                            : utility(sc, i, best_power(sc, i, obs[i][j]).power, obs[i][j]);
            }
            update_round(states[i], ch, actual, counterfactual);
            max_omega[i] = *std::max_element(states[i].omega.begin(), states[i].omega.end());
            locked[i] = states[i].locked;
        }

        detail::record_round(sc, trace, iter, prof, obs, max_omega, locked);
        obs_prev = std::move(obs);

        const bool all_locked =
            std::all_of(states.begin(), states.end(), [](const RegretState& s) { return s.locked; });
        if (all_locked) {
            trace.converged = true;
            trace.convergence_iter = iter;
            break;
        }
    }

    // Final channels/powers default to the last recorded round.
    const RoundRecord& last = trace.rounds.back();
    trace.final_channels.resize(m);
    trace.final_powers.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        trace.final_channels[i] = last.actions[i].channel;
        trace.final_powers[i] = last.actions[i].power;
    }

    if (trace.converged) {
        // Settle the power subgame on the locked assignment and record the
        // fixed point as the final state (appended as its own round when the
        // iteration budget allows).
        const SettleResult settled =
            settle_powers(sc, trace.final_channels, trace.final_powers, 1e-9, 100);
        trace.final_powers = settled.powers;
        if (trace.convergence_iter < max_iterations) {
            StrategyProfile prof(m);
            for (std::size_t i = 0; i < m; ++i)
                prof[i] = {trace.final_channels[i], settled.powers[i]};
            std::vector<std::vector<double>> obs(m);
            for (std::size_t i = 0; i < m; ++i) obs[i] = observe(sc, prof, i).per_channel;
            detail::tally_feasibility(sc, trace, obs);
            std::vector<double> max_omega(m, 1.0);
            std::vector<bool> locked(m, true);
            detail::record_round(sc, trace, trace.convergence_iter + 1, prof, obs, max_omega,
                                 locked);
        }
    }

    detail::finish_summary(trace);
    return trace;
}

namespace detail {

// Shared skeleton of the no-learning comparison modes: a fixed channel per
// user, maximum power, identical trace bookkeeping.
inline Trace run_fixed_assignment(const Scenario& sc, std::uint64_t seed, std::string mode,
                                  const std::vector<std::size_t>& assignment,
                                  std::uint64_t iterations) {
    if (iterations < 1)
        throw std::invalid_argument("baseline: iterations must be >= 1");
    const std::size_t m = sc.num_users();

    Trace trace;
    trace.scenario_fingerprint = fingerprint(sc);
    trace.seed = seed;
    trace.mode = std::move(mode);
    trace.lock_threshold = 0.0;
    trace.max_iterations = iterations;

    StrategyProfile prof(m);
    for (std::size_t i = 0; i < m; ++i) prof[i] = {assignment[i], sc.p_max};

    // The assignment never changes: every user is effectively locked from
    // round one and the strategy is a point mass on its fixed channel.
    const std::vector<double> max_omega(m, 1.0);
    const std::vector<bool> locked(m, true);

    for (std::uint64_t iter = 1; iter <= iterations; ++iter) {
        std::vector<std::vector<double>> obs(m);
        for (std::size_t i = 0; i < m; ++i) obs[i] = observe(sc, prof, i).per_channel;
        detail::tally_feasibility(sc, trace, obs);
        detail::record_round(sc, trace, iter, prof, obs, max_omega, locked);
    }

    trace.converged = true;
    trace.convergence_iter = 1;
    trace.final_channels = assignment;
    trace.final_powers.assign(m, sc.p_max);
    detail::finish_summary(trace);
    return trace;
}

} // namespace detail

// No-coordination comparator: every user draws one uniform-random channel at
// round 1, keeps it for the whole run, and always transmits at maximum power.
inline Trace run_baseline(const Scenario& sc, std::uint64_t seed, std::uint64_t iterations) {
    Rng rng(seed);
    std::vector<std::size_t> assignment(sc.num_users());
    for (auto& a : assignment) a = rng.pick_index(sc.num_channels());
    return detail::run_fixed_assignment(sc, seed, "baseline", assignment, iterations);
}

// Worst-case comparator: every user parks on the first channel at maximum
// power.  Deterministic (seed recorded for bookkeeping only), and the
// sustained-interference reference the coordinated runs are measured against.
inline Trace run_baseline_shared(const Scenario& sc, std::uint64_t seed,
                                 std::uint64_t iterations) {
    const std::vector<std::size_t> assignment(sc.num_users(), 0);
    return detail::run_fixed_assignment(sc, seed, "baseline-shared", assignment, iterations);
}

} // namespace disg
