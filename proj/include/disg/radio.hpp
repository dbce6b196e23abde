// Pure radio-model math: link gain, aggregate same-channel interference plus
// noise, SINR, and the dB reporting conversion.
//
// Everything here works in linear milliwatt units; dB appears only at the
// reporting boundary (to_db).  Channels are non-overlapping, so a transmitter
// contributes interference only to receivers tuned to its own channel.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "disg/scenario.hpp"

namespace disg {

// One user's joint decision for a round.  `channel` is an index into
// Scenario::channels (the public identifier is only used at I/O boundaries).
struct Action {
    std::size_t channel = 0;
    double power = 0.0; // mW

    bool operator==(const Action&) const = default;
};

// The joint decision of all users in one round, indexed by user.
using StrategyProfile = std::vector<Action>;

// Per-user view of the environment: aggregate interference-plus-noise on
// every channel, in mW.  This is the only cross-user information a player
// ever observes.
struct InterferenceObservation {
    std::size_t user = 0;
    std::vector<double> per_channel; // length N, each >= eta of that user
};

// Deterministic link gain s / d^delta of a sensor-to-control-node link.
inline double link_gain(double s, double d, double delta) {
    if (!(s > 0.0)) throw std::domain_error("link_gain: s must be positive");
    if (!(d > 0.0)) throw std::domain_error("link_gain: d must be positive");
    if (!(delta > 0.0)) throw std::domain_error("link_gain: delta must be positive");
    return s / std::pow(d, delta);
}

// Aggregate interference-plus-noise seen by user i on channel index j under
// the given joint profile: noise floor plus the path-loss-attenuated power of
// every *other* user currently transmitting on j.
inline double interference(const Scenario& sc, const StrategyProfile& profile,
                           std::size_t i, std::size_t j) {
    double total = sc.users[i].eta;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (k == i || profile[k].channel != j) continue;
        total += sc.users[k].s * profile[k].power / sc.cross_loss[i][k];
    }
    return total;
}

// Full observation vector for user i (all channels) under a joint profile.
inline InterferenceObservation observe(const Scenario& sc, const StrategyProfile& profile,
                                       std::size_t i) {
    InterferenceObservation obs;
    obs.user = i;
    obs.per_channel.resize(sc.num_channels());
    for (std::size_t j = 0; j < sc.num_channels(); ++j)
        obs.per_channel[j] = interference(sc, profile, i, j);
    return obs;
}

// Signal-to-interference-plus-noise ratio of user i on its own channel.
inline double sinr(const Scenario& sc, const StrategyProfile& profile, std::size_t i) {
    const double I = interference(sc, profile, i, profile[i].channel);
    return sc.gain[i] * profile[i].power / I;
}

inline double to_db(double x) {
    if (!(x > 0.0)) throw std::domain_error("to_db: argument must be positive");
    return 10.0 * std::log10(x);
}

} // namespace disg
