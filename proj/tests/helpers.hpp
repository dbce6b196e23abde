// Shared scenario builders for the test suite.  These mirror the bundled
// scenario files so tests need no filesystem access.
#pragma once

#include <vector>

#include "disg/scenario.hpp"

namespace testutil {

inline const std::vector<double>& table_levels() {
    static const std::vector<double> levels = {29.04, 32.67, 36.3,  42.24,
                                               46.2,  50.69, 55.18, 57.42};
    return levels;
}

inline disg::UserConfig user_at(int id, double x, double y) {
    disg::UserConfig u;
    u.id = id;
    u.x = x;
    u.y = y;
    return u;
}

inline disg::Scenario base_scenario(std::vector<int> channels,
                                    std::vector<disg::UserConfig> users) {
    disg::Scenario sc;
    sc.channels = std::move(channels);
    sc.p_min = 29.04;
    sc.p_max = 57.42;
    sc.power_levels = table_levels();
    sc.delta = 2.4;
    sc.snap_mode = disg::SnapMode::nearest_level;
    sc.users = std::move(users);
    disg::finalize_scenario(sc);
    return sc;
}

// Five users, five channels: the bundled default.
inline disg::Scenario default_scenario() {
    return base_scenario({11, 12, 13, 14, 15},
                         {user_at(1, 2.0, 2.0), user_at(2, 8.0, 2.0), user_at(3, 5.0, 5.0),
                          user_at(4, 2.0, 8.0), user_at(5, 8.0, 8.0)});
}

// Two users one meter apart, two channels: strong mutual interference.
inline disg::Scenario two_user_scenario() {
    return base_scenario({11, 12}, {user_at(1, 0.0, 0.0), user_at(2, 1.0, 0.0)});
}

// Degenerate single-user, single-channel instance.
inline disg::Scenario single_scenario() {
    return base_scenario({11}, {user_at(1, 5.0, 5.0)});
}

} // namespace testutil
