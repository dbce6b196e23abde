#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "disg/engine.hpp"
#include "disg/rng.hpp"
#include "disg/trace_io.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("disg_test_" + std::to_string(static_cast<std::uint64_t>(
                                   std::chrono::steady_clock::now().time_since_epoch().count())));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("fmt_double produces shortest round-trip forms") {
    REQUIRE(disg::fmt_double(0.1) == "0.1");
    REQUIRE(disg::fmt_double(50.69) == "50.69");
    REQUIRE(disg::fmt_double(1e9) == "1e+09");
    REQUIRE(disg::fmt_double(0.0) == "0");
    disg::Rng rng(55);
    for (int i = 0; i < 1000; ++i) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform01() * 30.0);
        REQUIRE(disg::parse_double(disg::fmt_double(v)) == v);
    }
}

TEST_CASE("atomic_write_text leaves no temporary behind") {
    TempDir dir;
    const std::string target = dir.file("out.txt");
    disg::atomic_write_text(target, "hello\n");
    REQUIRE(fs::exists(target));
    REQUIRE(!fs::exists(target + ".tmp"));
    std::ifstream in(target);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(content == "hello\n");

    // Overwrite works through the same path.
    disg::atomic_write_text(target, "second\n");
    std::ifstream in2(target);
    std::string content2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    REQUIRE(content2 == "second\n");
}

TEST_CASE("atomic_write_text refuses a missing directory") {
    REQUIRE_THROWS(disg::atomic_write_text("/nonexistent_dir_abc/x.txt", "data"));
}

TEST_CASE("trace CSV round-trips exactly") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::Trace trace = disg::run_disg(sc, 7, 500, 0.9);
    TempDir dir;
    const std::string path = dir.file("trace.csv");
    disg::write_trace_csv(trace, sc, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == std::string(disg::k_trace_csv_header));

    const auto rows = disg::read_trace_csv(path);
    REQUIRE(rows.size() == trace.rounds.size() * sc.num_users());
    std::size_t r = 0;
    for (const auto& rec : trace.rounds) {
        for (std::size_t i = 0; i < sc.num_users(); ++i, ++r) {
            REQUIRE(rows[r].iter == rec.iter);
            REQUIRE(rows[r].user_id == sc.users[i].id);
            REQUIRE(rows[r].channel_id == sc.channels[rec.actions[i].channel]);
            REQUIRE(rows[r].power == rec.actions[i].power);
            REQUIRE(rows[r].sinr_linear == rec.sinr_linear[i]);
            REQUIRE(rows[r].sinr_db == rec.sinr_db[i]);
            REQUIRE(rows[r].utility == rec.utility[i]);
            REQUIRE(rows[r].max_omega == rec.max_omega[i]);
            REQUIRE(rows[r].locked == static_cast<bool>(rec.locked[i]));
        }
    }
}

TEST_CASE("trace serialization is byte-stable") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::Trace a = disg::run_disg(sc, 3, 500, 0.9);
    const disg::Trace b = disg::run_disg(sc, 3, 500, 0.9);
    REQUIRE(disg::trace_to_csv(a, sc) == disg::trace_to_csv(b, sc));
    REQUIRE(disg::summary_json(a, sc).dump(2) == disg::summary_json(b, sc).dump(2));
}

TEST_CASE("summary JSON carries identity, outcome, and feasibility") {
    const disg::Scenario sc = testutil::two_user_scenario();
    const disg::Trace trace = disg::run_disg(sc, 7, 500, 0.9);
    const auto j = disg::summary_json(trace, sc);
    REQUIRE(j["scenario_fingerprint"] == disg::fingerprint(sc));
    REQUIRE(j["seed"] == 7);
    REQUIRE(j["mode"] == "disg");
    REQUIRE(j["converged"] == true);
    REQUIRE(j["convergence_iter"] == trace.convergence_iter);
    REQUIRE(j["final_channels"].size() == 2);
    // Channels are reported by identifier, not index.
    for (const auto& c : j["final_channels"]) {
        const int id = c.get<int>();
        REQUIRE((id == 11 || id == 12));
    }
    REQUIRE(j["final_powers_mw"].size() == 2);
    REQUIRE(j["avg_sinr_db"].contains("full"));
    REQUIRE(j["avg_sinr_db"].contains("last_quartile"));
    REQUIRE(j["feasibility"]["budget_violations"] == 0);
    REQUIRE(j["feasibility"]["ratio_ok"] == true);

    // An unconverged run reports a null convergence iteration.
    const disg::Trace cut = disg::run_disg(sc, 7, 3, 0.9);
    const auto j2 = disg::summary_json(cut, sc);
    REQUIRE(j2["converged"] == false);
    REQUIRE(j2["convergence_iter"].is_null());
}

TEST_CASE("read_trace_csv rejects malformed input") {
    TempDir dir;
    const std::string bad_header = dir.file("bad1.csv");
    disg::atomic_write_text(bad_header, "not,a,trace\n1,2,3\n");
    REQUIRE_THROWS(disg::read_trace_csv(bad_header));

    const std::string bad_row = dir.file("bad2.csv");
    disg::atomic_write_text(bad_row, std::string(disg::k_trace_csv_header) + "\n1,2,3\n");
    REQUIRE_THROWS(disg::read_trace_csv(bad_row));

    REQUIRE_THROWS(disg::read_trace_csv(dir.file("missing.csv")));
}
