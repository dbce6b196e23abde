// Per-user no-regret channel learning (regret matching).
//
// After every round a user compares the cost it actually paid with the cost
// it would have paid on each alternative channel (at that channel's optimal
// power, computable because the user observes interference on all channels).
// The positive part of the time-averaged difference is the regret for that
// alternative; normalized regrets form the mixed strategy the next channel is
// sampled from.
//
// The loop has three phases:
//   1. exploration — until every channel has been tried once, pick uniformly
//      among the unvisited ones (regrets are meaningless before a channel has
//      ever been observed as one's own);
//   2. learning — sample the channel from the regret-matching distribution;
//   3. locked — once the distribution concentrates (see below), commit to the
//      modal channel permanently.
//
// Locking is deliberately conservative.  Probability mass alone can be stale:
// two users whose histories are symmetric can concentrate on the same channel
// simultaneously and would lock into a permanent collision.  A user therefore
// locks only when the modal channel (a) has just been played and (b) was the
// cheapest channel in the round just observed.  A channel that currently
// collides can never satisfy (b), so the race resolves instead of freezing.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "disg/rng.hpp"

namespace disg {

struct RegretState {
    std::size_t user = 0;
    std::uint64_t t = 0;                  // completed rounds
    std::vector<double> cumulative_diff;  // per channel: sum of (actual - alternative) cost
    std::vector<bool> visited;            // exploration bookkeeping
    std::vector<double> omega;            // current mixed strategy
    bool locked = false;
    std::size_t locked_channel = 0;
    double lock_threshold = 0.9;

    // Context of the most recent round, maintained by the simulation loop:
    // the channel this user just played, and the channel that had the lowest
    // cost in the round's counterfactual vector.  Both gate the lock.
    std::optional<std::size_t> last_channel;
    std::optional<std::size_t> last_best_alternative;

    std::size_t num_channels() const { return omega.size(); }
};

inline RegretState make_regret_state(std::size_t user, std::size_t num_channels,
                                     double lock_threshold) {
    if (num_channels == 0)
        throw std::invalid_argument("make_regret_state: need at least one channel");
    // The threshold must be reachable (<= 1) and unreachable by an
    // uninformative uniform strategy (> 1/N); with a single channel the
    // uniform strategy is already a point mass, so any positive value works.
    const double lo = num_channels == 1 ? 0.0 : 1.0 / static_cast<double>(num_channels);
    if (!(lock_threshold > lo) || !(lock_threshold <= 1.0))
        throw std::invalid_argument("make_regret_state: lock_threshold must lie in (1/N, 1]");
    RegretState st;
    st.user = user;
    st.cumulative_diff.assign(num_channels, 0.0);
    st.visited.assign(num_channels, false);
    st.omega.assign(num_channels, 1.0 / static_cast<double>(num_channels));
    st.lock_threshold = lock_threshold;
    return st;
}

// Time-averaged positive regret for alternative channel j.
inline double regret(const RegretState& st, std::size_t j) {
    if (st.t == 0) throw std::logic_error("regret: no rounds recorded yet");
    if (j >= st.num_channels()) throw std::out_of_range("regret: channel index out of range");
    return std::max(st.cumulative_diff[j] / static_cast<double>(st.t), 0.0);
}

inline std::vector<double> regret_vector(const RegretState& st) {
    std::vector<double> out(st.num_channels());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = regret(st, j);
    return out;
}

// Normalizes non-negative regrets into a probability vector.  When every
// regret is zero the normalization is undefined; the unbiased uniform
// distribution is used instead (it is also the natural initial condition).
inline std::vector<double> mixed_strategy(const std::vector<double>& regrets) {
    std::vector<double> out(regrets.size());
    double sum = 0.0;
    for (double r : regrets) {
        if (!(r >= 0.0)) throw std::invalid_argument("mixed_strategy: regrets must be non-negative");
        sum += r;
    }
    if (sum > 0.0) {
        for (std::size_t j = 0; j < regrets.size(); ++j) out[j] = regrets[j] / sum;
    } else {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(regrets.size()));
    }
    return out;
}

// Folds one completed round into the state: `counterfactual[j]` is the cost
// user would have paid on channel j this round (at that channel's optimal
// power), and `counterfactual[actual_channel]` must equal the realized cost.
// Advances t, accumulates cost differences, refreshes the mixed strategy and
// the lock-gate context.  A locked user still accumulates (its record stays
// auditable) but its strategy remains the point mass on the locked channel.
inline void update_round(RegretState& st, std::size_t actual_channel, double actual_utility,
                         const std::vector<double>& counterfactual) {
    if (counterfactual.size() != st.num_channels())
        throw std::invalid_argument("update_round: counterfactual length must equal channel count");
    if (actual_channel >= st.num_channels())
        throw std::out_of_range("update_round: actual channel out of range");
    if (counterfactual[actual_channel] != actual_utility)
        throw std::invalid_argument(
            "update_round: counterfactual at the played channel must equal the realized cost");

    st.t += 1;
    std::size_t best_alt = 0;
    for (std::size_t j = 0; j < st.num_channels(); ++j) {
        st.cumulative_diff[j] += actual_utility - counterfactual[j];
        if (counterfactual[j] < counterfactual[best_alt]) best_alt = j;
    }
    st.last_channel = actual_channel;
    st.last_best_alternative = best_alt;

    if (!st.locked) st.omega = mixed_strategy(regret_vector(st));
}

// Chooses the next channel and performs the lock transition when warranted.
// Marks the returned channel as visited.  Consumes at most one random draw.
inline std::size_t select_channel(RegretState& st, Rng& rng) {
    if (st.locked) return st.locked_channel;

    const bool all_visited =
        std::all_of(st.visited.begin(), st.visited.end(), [](bool v) { return v; });

    if (all_visited) {
        std::size_t modal = 0;
        for (std::size_t j = 1; j < st.num_channels(); ++j)
            if (st.omega[j] > st.omega[modal]) modal = j; // ties keep the lowest index
        const bool concentrated = st.omega[modal] >= st.lock_threshold;
        // Lock gates: the modal channel must be the one just played and must
        // have been the cheapest channel of that round.  A state with no
        // recorded round yet (synthetic or hand-built) has no contrary
        // evidence and may lock on concentration alone.
        const bool played_ok = !st.last_channel || *st.last_channel == modal;
        const bool cheapest_ok = !st.last_best_alternative || *st.last_best_alternative == modal;
        if (concentrated && played_ok && cheapest_ok) {
            st.locked = true;
            st.locked_channel = modal;
            std::fill(st.omega.begin(), st.omega.end(), 0.0);
            st.omega[modal] = 1.0;
            return modal;
        }
    }

    std::size_t choice;
    if (!all_visited) {
        std::vector<std::size_t> unvisited;
        for (std::size_t j = 0; j < st.num_channels(); ++j)
            if (!st.visited[j]) unvisited.push_back(j);
        choice = unvisited[rng.pick_index(unvisited.size())];
    } else {
        choice = rng.sample_discrete(st.omega);
    }
    st.visited[choice] = true;
    return choice;
}

} // namespace disg
