// Immutable simulation scenario: the co-located networks (one player per
// body-area network), the shared channel set, power bounds, and the radio and
// cost constants the game is played with.
//
// A scenario is loaded from a JSON document, validated as a whole (every
// violated rule is reported, not just the first), and never mutated
// afterwards, so it is safe to share read-only across concurrent runs.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "disg/rng.hpp"

namespace disg {

// Thrown when a scenario fails structural validation.  `issues` lists every
// violated rule; what() joins them for convenience.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "scenario validation failed:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

// One player: a body-area network represented by its control node.
struct UserConfig {
    int id = 0;
    double x = 0.0, y = 0.0; // control-node position, meters
    double s = 1.0;          // link attenuation coefficient
    double d = 0.5;          // worst-case sensor-to-control distance, meters
    double eta = 2.6e-7;     // background noise power, mW
    double gamma0 = 1e9;     // ideal SINR target, linear ratio
    double tau = 1.0;        // SINR-miss cost weight
    double xi = 1e-4;        // power cost weight (per mW)

    bool operator==(const UserConfig&) const = default;
};

enum class SnapMode { continuous, nearest_level };

inline const char* to_string(SnapMode m) {
    return m == SnapMode::continuous ? "continuous" : "nearest-level";
}

struct Scenario {
    std::vector<UserConfig> users;          // length M
    std::vector<int> channels;              // distinct identifiers, length N
    double p_min = 0.0, p_max = 0.0;        // transmit power bounds, mW
    std::vector<double> power_levels;       // optional discrete set, strictly increasing
    double delta = 2.0;                     // path-loss exponent
    SnapMode snap_mode = SnapMode::continuous;

    // Derived caches, filled by finalize().
    std::vector<double> gain;                    // per user: s / d^delta
    std::vector<std::vector<double>> cross_loss; // [i][k]: dist(i,k)^delta, 0 on diagonal

    std::size_t num_users() const { return users.size(); }
    std::size_t num_channels() const { return channels.size(); }

    bool operator==(const Scenario& o) const {
        return users == o.users && channels == o.channels && p_min == o.p_min &&
               p_max == o.p_max && power_levels == o.power_levels &&
               delta == o.delta && snap_mode == o.snap_mode;
    }
};

// Euclidean distance between the control nodes of two distinct users.
inline double pairwise_distance(const Scenario& sc, std::size_t i, std::size_t k) {
    if (i >= sc.num_users() || k >= sc.num_users())
        throw std::out_of_range("pairwise_distance: user index out of range");
    if (i == k)
        throw std::invalid_argument("pairwise_distance: distance is defined between distinct users");
    const auto& a = sc.users[i];
    const auto& b = sc.users[k];
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace detail {

// Minimum admissible control-node separation.  The same-channel interference
// term diverges as the separation approaches zero, so co-located (or nearly
// co-located) users are rejected at validation time.
inline constexpr double k_min_separation_m = 0.01;

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace detail

// Validates every structural rule and fills the derived caches.  Collects all
// violations before throwing so a bad file is diagnosed in one pass.
inline void finalize_scenario(Scenario& sc) {
    std::vector<std::string> issues;

    if (sc.users.empty()) issues.push_back("at least one user is required");
    if (sc.channels.empty()) issues.push_back("at least one channel is required");

    for (std::size_t a = 0; a < sc.channels.size(); ++a)
        for (std::size_t b = a + 1; b < sc.channels.size(); ++b)
            if (sc.channels[a] == sc.channels[b])
                issues.push_back("duplicate channel identifier " + std::to_string(sc.channels[a]));

    if (!(sc.p_min > 0.0))
        issues.push_back("p_min_mw must be positive (got " + detail::fmt(sc.p_min) + ")");
    if (!(sc.p_min <= sc.p_max))
        issues.push_back("p_min_mw must not exceed p_max_mw");

    for (std::size_t l = 0; l < sc.power_levels.size(); ++l) {
        const double v = sc.power_levels[l];
        if (v < sc.p_min || v > sc.p_max)
            issues.push_back("power level " + detail::fmt(v) + " lies outside [p_min_mw, p_max_mw]");
        if (l > 0 && !(sc.power_levels[l - 1] < v))
            issues.push_back("power_levels_mw must be strictly increasing at entry " + std::to_string(l));
    }

    if (sc.snap_mode == SnapMode::nearest_level && sc.power_levels.empty())
        issues.push_back("snap_mode \"nearest-level\" requires power_levels_mw");

    if (!(sc.delta > 0.0))
        issues.push_back("delta must be positive (got " + detail::fmt(sc.delta) + ")");

    for (std::size_t a = 0; a < sc.users.size(); ++a)
        for (std::size_t b = a + 1; b < sc.users.size(); ++b)
            if (sc.users[a].id == sc.users[b].id)
                issues.push_back("duplicate user id " + std::to_string(sc.users[a].id));

    for (const auto& u : sc.users) {
        const std::string who = "user " + std::to_string(u.id) + ": ";
        if (!(u.s > 0.0)) issues.push_back(who + "s must be positive");
        if (!(u.d > 0.0)) issues.push_back(who + "d must be positive");
        if (!(u.eta > 0.0)) issues.push_back(who + "eta_mw must be positive");
        if (!(u.gamma0 > 0.0)) issues.push_back(who + "gamma0 must be positive");
        if (!(u.tau >= 0.0)) issues.push_back(who + "tau must be non-negative");
        if (!(u.xi > 0.0)) issues.push_back(who + "xi must be positive");
        // Weighting-ratio condition: tau/xi >= 2*p_max/gamma0^2.  Below this
        // ratio the closed-form per-channel power optimum is not guaranteed to
        // stay inside the power range, and the power game loses its
        // fixed-point guarantee.
        if (u.xi > 0.0 && u.gamma0 > 0.0 && sc.p_max > 0.0) {
            const double lhs = u.tau / u.xi;
            const double rhs = 2.0 * sc.p_max / (u.gamma0 * u.gamma0);
            if (!(lhs >= rhs))
                issues.push_back(who + "weighting ratio tau/xi = " + detail::fmt(lhs) +
                                 " violates tau/xi >= 2*p_max/gamma0^2 = " + detail::fmt(rhs));
        }
    }

    for (std::size_t a = 0; a < sc.users.size(); ++a) {
        for (std::size_t b = a + 1; b < sc.users.size(); ++b) {
            const double dist = std::hypot(sc.users[a].x - sc.users[b].x,
                                           sc.users[a].y - sc.users[b].y);
            if (dist < detail::k_min_separation_m)
                issues.push_back("users " + std::to_string(sc.users[a].id) + " and " +
                                 std::to_string(sc.users[b].id) + " are closer than " +
                                 detail::fmt(detail::k_min_separation_m) +
                                 " m (separation " + detail::fmt(dist) + " m)");
        }
    }

    if (!issues.empty()) throw validation_error(std::move(issues));

    const std::size_t m = sc.users.size();
    sc.gain.resize(m);
    sc.cross_loss.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        sc.gain[i] = sc.users[i].s / std::pow(sc.users[i].d, sc.delta);
        for (std::size_t k = 0; k < m; ++k) {
            if (i == k) continue;
            sc.cross_loss[i][k] = std::pow(pairwise_distance(sc, i, k), sc.delta);
        }
    }
}

// Parses a scenario from its JSON representation.  Omitted per-user fields
// take the documented defaults; positions may be given explicitly or drawn
// uniformly in a rectangular field from a recorded placement seed.
inline Scenario parse_scenario(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("scenario: top-level JSON value must be an object");

    Scenario sc;
    try {
        sc.channels = j.at("channels").get<std::vector<int>>();
        sc.p_min = j.at("p_min_mw").get<double>();
        sc.p_max = j.at("p_max_mw").get<double>();
        sc.delta = j.at("delta").get<double>();
        if (j.contains("power_levels_mw"))
            sc.power_levels = j.at("power_levels_mw").get<std::vector<double>>();

        if (j.contains("snap_mode")) {
            const std::string mode = j.at("snap_mode").get<std::string>();
            if (mode == "continuous") sc.snap_mode = SnapMode::continuous;
            else if (mode == "nearest-level") sc.snap_mode = SnapMode::nearest_level;
            else throw std::runtime_error("scenario: unknown snap_mode \"" + mode + "\"");
        } else {
            // Discrete hardware power sets are the common case; snapping is
            // the default whenever a level set is present.
            sc.snap_mode = sc.power_levels.empty() ? SnapMode::continuous
                                                   : SnapMode::nearest_level;
        }

        std::optional<Rng> placement_rng;
        double field_w = 0.0, field_h = 0.0;
        if (j.contains("placement")) {
            const auto& pl = j.at("placement");
            const auto field = pl.at("field").get<std::vector<double>>();
            if (field.size() != 2)
                throw std::runtime_error("scenario: placement.field must be [width, height]");
            field_w = field[0];
            field_h = field[1];
            placement_rng.emplace(pl.at("seed").get<std::uint64_t>());
        }

        const auto& users = j.at("users");
        if (!users.is_array()) throw std::runtime_error("scenario: \"users\" must be an array");
        int next_id = 0;
        for (const auto& ju : users) {
            UserConfig u;
            u.id = ju.contains("id") ? ju.at("id").get<int>() : next_id;
            next_id = u.id + 1;
            if (ju.contains("position")) {
                const auto pos = ju.at("position").get<std::vector<double>>();
                if (pos.size() != 2)
                    throw std::runtime_error("scenario: user position must be [x, y]");
                u.x = pos[0];
                u.y = pos[1];
            } else if (placement_rng) {
                u.x = placement_rng->uniform01() * field_w;
                u.y = placement_rng->uniform01() * field_h;
            } else {
                throw std::runtime_error("scenario: user " + std::to_string(u.id) +
                                         " has no position and no placement block is given");
            }
            if (ju.contains("s")) u.s = ju.at("s").get<double>();
            if (ju.contains("d")) u.d = ju.at("d").get<double>();
            if (ju.contains("eta_mw")) u.eta = ju.at("eta_mw").get<double>();
            if (ju.contains("gamma0")) u.gamma0 = ju.at("gamma0").get<double>();
            if (ju.contains("tau")) u.tau = ju.at("tau").get<double>();
            if (ju.contains("xi")) u.xi = ju.at("xi").get<double>();
            sc.users.push_back(u);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("scenario: malformed document: ") + e.what());
    }

    finalize_scenario(sc);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open file \"" + path + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("scenario: JSON parse error in \"" + path + "\": " + e.what());
    }
    return parse_scenario(j);
}

// Canonical text form of a resolved scenario (defaults applied, positions
// materialized).  Field order and number formatting are fixed, so equal
// scenarios produce identical text.
inline std::string canonical_text(const Scenario& sc) {
    std::ostringstream os;
    os.precision(17);
    os << "users[";
    for (const auto& u : sc.users)
        os << "{" << u.id << ";" << u.x << "," << u.y << ";" << u.s << ";" << u.d << ";"
           << u.eta << ";" << u.gamma0 << ";" << u.tau << ";" << u.xi << "}";
    os << "];channels[";
    for (int c : sc.channels) os << c << ";";
    os << "];p[" << sc.p_min << "," << sc.p_max << "];levels[";
    for (double v : sc.power_levels) os << v << ";";
    os << "];delta[" << sc.delta << "];snap[" << to_string(sc.snap_mode) << "]";
    return os.str();
}

// 64-bit FNV-1a content hash of the canonical form, as 16 hex digits.
// Identifies which scenario a trace was produced from.
inline std::string fingerprint(const Scenario& sc) {
    const std::string text = canonical_text(sc);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

} // namespace disg
