// Independent equilibrium oracles.  Nothing here reuses the learning loop:
// claims about converged profiles are certified by exhaustive enumeration and
// grid search, sharing only the radio/game cost definitions so the oracle can
// disagree with the simulation through search alone, never through model
// drift.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "disg/engine.hpp"
#include "disg/game.hpp"
#include "disg/radio.hpp"
#include "disg/scenario.hpp"

namespace disg {

class instance_too_large : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Joint-action enumeration guard: refuse instances whose pure joint space
// (channels^users * levels^users) exceeds this.
inline constexpr double k_enumeration_guard = 1e8;

// Enumerates every joint (channel, level) profile and returns the pure Nash
// equilibria: profiles where no user can strictly reduce its own cost by any
// unilateral (channel, level) change.  Results are in enumeration order
// (lexicographic in the profile encoding), so the output is deterministic.
inline std::vector<StrategyProfile> brute_force_ne(const Scenario& sc,
                                                   const std::vector<double>& levels) {
    if (levels.empty()) throw std::invalid_argument("brute_force_ne: empty power level set");
    const std::size_t m = sc.num_users();
    const std::size_t n = sc.num_channels();
    const std::size_t L = levels.size();

    const double joint = std::pow(static_cast<double>(n), static_cast<double>(m)) *
                         std::pow(static_cast<double>(L), static_cast<double>(m));
    if (joint > k_enumeration_guard)
        throw instance_too_large(
            "brute_force_ne: joint space of " + std::to_string(joint) +
            " profiles exceeds the enumeration guard; use a smaller instance or "
            "verify a single profile with check_profile instead");

    const std::size_t per_user = n * L; // local action encoding: channel * L + level
    std::vector<std::size_t> code(m, 0);
    StrategyProfile prof(m);
    std::vector<StrategyProfile> equilibria;

    auto decode = [&](std::size_t c) {
        return Action{c / L, levels[c % L]};
    };

    bool done = false;
    while (!done) {
        for (std::size_t i = 0; i < m; ++i) prof[i] = decode(code[i]);

        bool is_ne = true;
        for (std::size_t i = 0; i < m && is_ne; ++i) {
            const double here =
                utility(sc, i, prof[i].power, interference(sc, prof, i, prof[i].channel));
            StrategyProfile dev = prof;
            for (std::size_t c = 0; c < per_user && is_ne; ++c) {
                if (c == code[i]) continue;
                dev[i] = decode(c);
                const double cost =
                    utility(sc, i, dev[i].power, interference(sc, dev, i, dev[i].channel));
                if (cost < here) is_ne = false;
            }
        }
        if (is_ne) equilibria.push_back(prof);

        // Next profile (odometer over per-user action codes).
        done = true;
        for (std::size_t i = m; i-- > 0;) {
            if (++code[i] < per_user) {
                done = false;
                break;
            }
            code[i] = 0;
        }
    }
    return equilibria;
}

// Uniform grid of `grid_size` points spanning [p_min, p_max] (inclusive),
// unioned with the scenario's discrete levels.  grid_size 0 means levels
// only.  Sorted and deduplicated.
inline std::vector<double> deviation_powers(const Scenario& sc, std::size_t grid_size) {
    std::vector<double> pts = sc.power_levels;
    if (grid_size == 1) {
        pts.push_back(sc.p_min);
    } else if (grid_size > 1) {
        const double step = (sc.p_max - sc.p_min) / static_cast<double>(grid_size - 1);
        for (std::size_t k = 0; k < grid_size; ++k)
            pts.push_back(sc.p_min + step * static_cast<double>(k));
    }
    if (pts.empty())
        throw std::invalid_argument("deviation_powers: no levels and no grid requested");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

struct DeviationReport {
    double max_improvement_abs = 0.0;     // best unilateral cost reduction, cost units
    double max_improvement_rel = 0.0;     // same, relative to the deviator's cost
    std::vector<double> per_user_abs;     // per user
    std::vector<double> per_user_rel;     // per user
};

// Scans, for each user in turn with the others held fixed, every channel
// combined with every deviation power, and reports the largest achievable
// cost reduction.  Zero means the profile is an equilibrium at the scanned
// resolution.  Costs scale with the weighting factors, so the reduction is
// reported both in absolute cost units and relative to the deviator's
// current cost.
inline DeviationReport check_profile(const Scenario& sc, const StrategyProfile& profile,
                                     std::size_t power_grid_size = 512) {
    if (profile.size() != sc.num_users())
        throw std::invalid_argument("check_profile: profile must cover every user");
    const std::vector<double> powers = deviation_powers(sc, power_grid_size);

    DeviationReport rep;
    rep.per_user_abs.resize(sc.num_users());
    rep.per_user_rel.resize(sc.num_users());
    for (std::size_t i = 0; i < sc.num_users(); ++i) {
        const double here =
            utility(sc, i, profile[i].power, interference(sc, profile, i, profile[i].channel));
        double best = here;
        StrategyProfile dev = profile;
        for (std::size_t j = 0; j < sc.num_channels(); ++j) {
            // Interference on channel j does not depend on the deviator's own
            // power, so it is computed once per channel.
            dev[i].channel = j;
            dev[i].power = profile[i].power;
            const double I = interference(sc, dev, i, j);
            for (double p : powers) {
                const double cost = utility(sc, i, p, I);
                if (cost < best) best = cost;
            }
        }
        const double gain = std::max(here - best, 0.0);
        rep.per_user_abs[i] = gain;
        rep.per_user_rel[i] = gain / here; // cost is strictly positive
        rep.max_improvement_abs = std::max(rep.max_improvement_abs, rep.per_user_abs[i]);
        rep.max_improvement_rel = std::max(rep.max_improvement_rel, rep.per_user_rel[i]);
    }
    return rep;
}

// A weighted empirical distribution over joint profiles.
struct EmpiricalDistribution {
    std::vector<StrategyProfile> profiles;
    std::vector<double> weights; // match profiles, sum to 1
};

// Collects the joint play of trace rounds [from_round, to_round] (1-based,
// inclusive) into a weighted distribution over distinct profiles.
inline EmpiricalDistribution empirical_distribution(const Trace& trace, std::uint64_t from_round,
                                                    std::uint64_t to_round) {
    if (from_round < 1 || from_round > to_round)
        throw std::invalid_argument("empirical_distribution: bad round range");
    std::map<std::vector<std::pair<std::size_t, double>>, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& rec : trace.rounds) {
        if (rec.iter < from_round || rec.iter > to_round) continue;
        std::vector<std::pair<std::size_t, double>> key;
        key.reserve(rec.actions.size());
        for (const auto& a : rec.actions) key.emplace_back(a.channel, a.power);
        ++counts[key];
        ++total;
    }
    if (total == 0)
        throw std::invalid_argument("empirical_distribution: no rounds in the requested range");
    EmpiricalDistribution dist;
    for (const auto& [key, cnt] : counts) {
        StrategyProfile prof;
        prof.reserve(key.size());
        for (const auto& [ch, p] : key) prof.push_back({ch, p});
        dist.profiles.push_back(std::move(prof));
        dist.weights.push_back(static_cast<double>(cnt) / static_cast<double>(total));
    }
    return dist;
}

struct CeReport {
    double epsilon_abs = 0.0;
    double epsilon_rel = 0.0;
};

// Correlated-equilibrium check on a joint-action distribution: for every user
// i and every ordered channel pair (a -> b), the expected cost reduction from
// switching to b whenever the distribution plays i on a must not be positive.
// The reported epsilon is the largest such expected reduction, floored at 0;
// epsilon 0 means every no-swap-incentive inequality holds.
//
// The deviation power on the target channel is the deviator's optimal choice
// there (restricted to the discrete levels under nearest-level snapping, the
// same action set the play itself uses), holding the opponents' actions
// fixed.  The relative variant normalizes each pair's reduction by the
// conditional expected cost of the recommended play.
inline CeReport check_ce(const EmpiricalDistribution& dist, const Scenario& sc) {
    if (dist.profiles.size() != dist.weights.size())
        throw std::invalid_argument("check_ce: profiles/weights size mismatch");
    double mass = 0.0;
    for (double w : dist.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("check_ce: negative weight");
        mass += w;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("check_ce: distribution is not normalized");

    const std::size_t m = sc.num_users();
    const std::size_t n = sc.num_channels();
    CeReport rep;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                double reduction = 0.0;
                double conditional_cost = 0.0;
                for (std::size_t k = 0; k < dist.profiles.size(); ++k) {
                    const StrategyProfile& prof = dist.profiles[k];
                    if (prof[i].channel != a) continue;
                    const double w = dist.weights[k];
                    const double here =
                        utility(sc, i, prof[i].power, interference(sc, prof, i, a));
                    StrategyProfile dev = prof;
                    dev[i].channel = b;
                    const double I = interference(sc, dev, i, b);
                    double there;
                    if (sc.snap_mode == SnapMode::nearest_level) {
                        there = std::numeric_limits<double>::infinity();
                        for (double p : sc.power_levels)
                            there = std::min(there, utility(sc, i, p, I));
                    } else {
                        there = utility(sc, i, best_power(sc, i, I).power, I);
                    }
                    reduction += w * (here - there);
                    conditional_cost += w * here;
                }
                rep.epsilon_abs = std::max(rep.epsilon_abs, reduction);
                if (conditional_cost > 0.0)
                    rep.epsilon_rel = std::max(rep.epsilon_rel, reduction / conditional_cost);
            }
        }
    }
    rep.epsilon_abs = std::max(rep.epsilon_abs, 0.0);
    rep.epsilon_rel = std::max(rep.epsilon_rel, 0.0);
    return rep;
}

// Point-mass distribution on a single profile (the product-measure case).
inline EmpiricalDistribution point_mass(const StrategyProfile& profile) {
    return EmpiricalDistribution{{profile}, {1.0}};
}

} // namespace disg
