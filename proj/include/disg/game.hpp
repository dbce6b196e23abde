// The per-user decision problem: the SINR/power trade-off cost, its
// closed-form per-channel power minimizer, the per-observation best response
// across channels, and the numeric feasibility conditions under which the
// power game has a unique fixed point.
//
// Each user minimizes
//
//     u(p) = tau * (gamma0 - G*p/I)^2 + xi * p
//
// given the interference-plus-noise level I it observes on a channel.  The
// cost is strictly convex in p for tau > 0, and its unconstrained minimizer
// has the closed form
//
//     p* = gamma0*I/G - xi*I^2 / (2*tau*G^2),
//
// which is then clamped to the power range and, for hardware with a discrete
// power set, snapped to the utility-minimizing adjacent level.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "disg/radio.hpp"
#include "disg/scenario.hpp"

namespace disg {

// Quadratic-target cost of transmitting at power p (mW) against
// interference-plus-noise I (mW), for user i.  Strictly positive whenever
// xi > 0 and p > 0.
inline double utility(const Scenario& sc, std::size_t i, double p, double I) {
    const auto& u = sc.users[i];
    const double gamma = sc.gain[i] * p / I;
    const double miss = u.gamma0 - gamma;
    return u.tau * miss * miss + u.xi * p;
}

// Result of the per-channel power optimization.
struct PowerChoice {
    double power = 0.0;       // final transmit power, mW
    double raw = 0.0;         // unconstrained closed-form minimizer, mW
    bool clamped = false;     // raw fell outside [p_min, p_max]
    bool snapped = false;     // moved to a discrete level
    bool infeasible = false;  // raw was negative: interference exceeds the
                              // level at which any admissible power helps
};

// Closed-form best transmit power against interference level I.
//
// Preconditions: positive inputs and tau/xi >= 2*p_max/gamma0^2 (the
// weighting-ratio condition; without it the clamped minimizer is not
// guaranteed to be the constrained optimum).  A negative unconstrained
// minimizer is reported via `infeasible` and resolved to p_min rather than
// aborting, so a learning loop can continue through transient overload.
inline PowerChoice best_power(double gamma0, double I, double G, double tau, double xi,
                              double p_min, double p_max, SnapMode snap,
                              const std::vector<double>& levels) {
    if (!(gamma0 > 0.0) || !(I > 0.0) || !(G > 0.0) || !(xi > 0.0) ||
        !(p_min > 0.0) || !(p_min <= p_max))
        throw std::domain_error("best_power: inputs must be positive with p_min <= p_max");
    if (!(tau / xi >= 2.0 * p_max / (gamma0 * gamma0)))
        throw std::domain_error(
            "best_power: weighting ratio tau/xi must be at least 2*p_max/gamma0^2");

    PowerChoice out;
    out.raw = gamma0 * I / G - xi * I * I / (2.0 * tau * G * G);

    double p = out.raw;
    if (p < 0.0) {
        out.infeasible = true;
        out.clamped = true;
        p = p_min;
    } else if (p < p_min) {
        out.clamped = true;
        p = p_min;
    } else if (p > p_max) {
        out.clamped = true;
        p = p_max;
    }

    if (snap == SnapMode::nearest_level && !levels.empty()) {
        // Snap by cost, not by distance: evaluate the cost at the level just
        // below and just above the clamped value and keep the cheaper one
        // (ties resolved toward lower power).
        auto hi = std::lower_bound(levels.begin(), levels.end(), p);
        double best = 0.0;
        double best_cost = std::numeric_limits<double>::infinity();
        auto consider = [&](double level) {
            const double gamma = G * level / I;
            const double miss = gamma0 - gamma;
            const double cost = tau * miss * miss + xi * level;
            if (cost < best_cost || (cost == best_cost && level < best)) {
                best_cost = cost;
                best = level;
            }
        };
        if (hi != levels.begin()) consider(*(hi - 1));
        if (hi != levels.end()) consider(*hi);
        if (best != p) out.snapped = true;
        p = best;
    }

    out.power = p;
    return out;
}

// Convenience overload taking the user's parameters from the scenario.
inline PowerChoice best_power(const Scenario& sc, std::size_t i, double I) {
    const auto& u = sc.users[i];
    return best_power(u.gamma0, I, sc.gain[i], u.tau, u.xi, sc.p_min, sc.p_max,
                      sc.snap_mode, sc.power_levels);
}

// Numeric feasibility of the power game for user i under an observation.
//
//  - ratio_ok (static): tau/xi >= 2*p_max/gamma0^2.
//  - budget_ok[j]: I_j <= 2*tau*gamma0/xi — the interference budget beyond
//    which the cost landscape degenerates.
//  - target_ok[j]: I_j < tau*gamma0*G/xi — the SINR target remains reachable
//    in principle on channel j.
//
// These are diagnostics: a run records violations but keeps going.
struct FeasibilityReport {
    bool ratio_ok = true;
    std::vector<bool> budget_ok; // per channel
    std::vector<bool> target_ok; // per channel
};

inline FeasibilityReport check_feasibility(const Scenario& sc,
                                           const InterferenceObservation& obs,
                                           std::size_t i) {
    const auto& u = sc.users[i];
    FeasibilityReport rep;
    rep.ratio_ok = u.tau / u.xi >= 2.0 * sc.p_max / (u.gamma0 * u.gamma0);
    rep.budget_ok.resize(obs.per_channel.size());
    rep.target_ok.resize(obs.per_channel.size());
    const double budget = 2.0 * u.tau * u.gamma0 / u.xi;
    const double target_bound = u.tau * u.gamma0 * sc.gain[i] / u.xi;
    for (std::size_t j = 0; j < obs.per_channel.size(); ++j) {
        rep.budget_ok[j] = obs.per_channel[j] <= budget;
        rep.target_ok[j] = obs.per_channel[j] < target_bound;
    }
    return rep;
}

// A user's optimal (channel, power) pair against a full observation vector.
struct BestResponse {
    std::size_t channel = 0;
    double power = 0.0;
    double utility = 0.0;
    double raw_power = 0.0;
    bool clamped = false;
    bool snapped = false;
    bool infeasible = false;
};

// Scans every channel, optimizes power against that channel's observed
// interference, and returns the pair with minimal cost.  Ties break to the
// lowest channel index, then to the lower power (both for determinism).
inline BestResponse best_response(const Scenario& sc, const InterferenceObservation& obs,
                                  std::size_t i) {
    if (obs.per_channel.size() != sc.num_channels())
        throw std::invalid_argument("best_response: observation must cover every channel");
    BestResponse best;
    bool first = true;
    for (std::size_t j = 0; j < sc.num_channels(); ++j) {
        const PowerChoice pc = best_power(sc, i, obs.per_channel[j]);
        const double cost = utility(sc, i, pc.power, obs.per_channel[j]);
        // Strict improvement only: on an exact cost tie the earlier (lower)
        // channel index is kept.
        const bool better = first || cost < best.utility;
        if (better) {
            best.channel = j;
            best.power = pc.power;
            best.utility = cost;
            best.raw_power = pc.raw;
            best.clamped = pc.clamped;
            best.snapped = pc.snapped;
            best.infeasible = pc.infeasible;
            first = false;
        }
    }
    return best;
}

} // namespace disg
