// Trace and report serialization.
//
// Byte determinism is a hard requirement: identical runs must produce
// identical files.  Doubles are therefore printed with std::to_chars
// (shortest round-trip form), rows follow a fixed column order, and JSON
// objects preserve insertion order.  Files are written to a temporary name in
// the target directory and renamed into place, so an interrupted run never
// leaves a truncated file at the destination.
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "disg/engine.hpp"
#include "disg/scenario.hpp"
#include "disg/verify.hpp"

namespace disg {

// Shortest decimal form that round-trips to the same double.
inline std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("parse_double: bad number \"" + s + "\"");
    return v;
}

// Writes `content` atomically: temp file in the same directory, then rename.
inline void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
    if (!fs::exists(dir))
        throw std::runtime_error("atomic_write_text: directory does not exist: " + dir.string());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write_text: cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("atomic_write_text: write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("atomic_write_text: rename to " + target.string() + " failed");
    }
}

inline constexpr const char* k_trace_csv_header =
    "iter,user,channel,power_mw,sinr_linear,sinr_db,utility,max_omega,locked";

// One row per user per round; channels appear under their public identifiers.
inline std::string trace_to_csv(const Trace& trace, const Scenario& sc) {
    std::string out = k_trace_csv_header;
    out += '\n';
    for (const auto& rec : trace.rounds) {
        for (std::size_t i = 0; i < rec.actions.size(); ++i) {
            out += std::to_string(rec.iter);
            out += ',';
            out += std::to_string(sc.users[i].id);
            out += ',';
            out += std::to_string(sc.channels[rec.actions[i].channel]);
            out += ',';
            out += fmt_double(rec.actions[i].power);
            out += ',';
            out += fmt_double(rec.sinr_linear[i]);
            out += ',';
            out += fmt_double(rec.sinr_db[i]);
            out += ',';
            out += fmt_double(rec.utility[i]);
            out += ',';
            out += fmt_double(rec.max_omega[i]);
            out += ',';
            out += rec.locked[i] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

inline void write_trace_csv(const Trace& trace, const Scenario& sc, const std::string& path) {
    atomic_write_text(path, trace_to_csv(trace, sc));
}

// Minimal parsed form of a trace CSV (identifiers as written, one entry per
// row).  Enough to reconstruct profiles and play windows for verification.
struct TraceRow {
    std::uint64_t iter = 0;
    int user_id = 0;
    int channel_id = 0;
    double power = 0.0;
    double sinr_linear = 0.0;
    double sinr_db = 0.0;
    double utility = 0.0;
    double max_omega = 0.0;
    bool locked = false;
};

inline std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_trace_csv: empty file \"" + path + "\"");
    if (line != k_trace_csv_header)
        throw std::runtime_error("read_trace_csv: unexpected header in \"" + path + "\"");

    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9)
            throw std::runtime_error("read_trace_csv: malformed row \"" + line + "\"");
        TraceRow r;
        r.iter = static_cast<std::uint64_t>(std::stoull(cells[0]));
        r.user_id = std::stoi(cells[1]);
        r.channel_id = std::stoi(cells[2]);
        r.power = parse_double(cells[3]);
        r.sinr_linear = parse_double(cells[4]);
        r.sinr_db = parse_double(cells[5]);
        r.utility = parse_double(cells[6]);
        r.max_omega = parse_double(cells[7]);
        r.locked = cells[8] == "1";
        rows.push_back(r);
    }
    return rows;
}

// Run summary as ordered JSON: identity (fingerprint, seed, mode,
// parameters), outcome (convergence, final assignment and powers), SINR
// aggregates, and feasibility bookkeeping.  Positions are included so a
// placement-seeded scenario is pinned in the output.
inline nlohmann::ordered_json summary_json(const Trace& trace, const Scenario& sc) {
    nlohmann::ordered_json j;
    j["scenario_fingerprint"] = trace.scenario_fingerprint;
    j["seed"] = trace.seed;
    j["mode"] = trace.mode;
    j["lock_threshold"] = trace.lock_threshold;
    j["max_iterations"] = trace.max_iterations;
    j["users"] = sc.num_users();
    j["channels"] = sc.channels;
    j["positions"] = nlohmann::ordered_json::array();
    for (const auto& u : sc.users) j["positions"].push_back({u.x, u.y});
    j["rounds_recorded"] = trace.rounds.size();
    j["converged"] = trace.converged;
    if (trace.converged)
        j["convergence_iter"] = trace.convergence_iter;
    else
        j["convergence_iter"] = nullptr;
    j["final_channels"] = nlohmann::ordered_json::array();
    for (std::size_t c : trace.final_channels) j["final_channels"].push_back(sc.channels[c]);
    j["final_powers_mw"] = trace.final_powers;
    j["avg_sinr_db"] = {{"full", trace.avg_sinr_db_full},
                        {"last_quartile", trace.avg_sinr_db_last_quartile}};
    j["avg_sinr_db_per_round"] = trace.avg_sinr_db_per_round;
    j["feasibility"] = {{"ratio_ok", trace.ratio_ok},
                        {"budget_violations", trace.budget_violations},
                        {"target_violations", trace.target_violations}};
    return j;
}

inline void write_summary_json(const Trace& trace, const Scenario& sc, const std::string& path) {
    atomic_write_text(path, summary_json(trace, sc).dump(2) + "\n");
}

// Equilibrium report as ordered JSON: the power set scanned, any enumerated
// equilibria, per-candidate deviation margins, and the distribution check.
inline nlohmann::ordered_json report_json(const Scenario& sc, const std::string& grid_desc,
                                          const std::vector<StrategyProfile>* equilibria,
                                          const StrategyProfile* candidate,
                                          const DeviationReport* deviation,
                                          const CeReport* ce) {
    nlohmann::ordered_json j;
    j["scenario_fingerprint"] = fingerprint(sc);
    j["power_grid"] = grid_desc;
    auto profile_json = [&](const StrategyProfile& prof) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& a : prof)
            arr.push_back({{"channel", sc.channels[a.channel]}, {"power_mw", a.power}});
        return arr;
    };
    if (equilibria) {
        j["pure_ne_count"] = equilibria->size();
        j["pure_ne"] = nlohmann::ordered_json::array();
        for (const auto& prof : *equilibria) j["pure_ne"].push_back(profile_json(prof));
    }
    if (candidate) j["candidate"] = profile_json(*candidate);
    if (deviation) {
        j["max_improvement_abs"] = deviation->max_improvement_abs;
        j["max_improvement_rel"] = deviation->max_improvement_rel;
        j["per_user_improvement_abs"] = deviation->per_user_abs;
        j["per_user_improvement_rel"] = deviation->per_user_rel;
    }
    if (ce) {
        j["ce_epsilon_abs"] = ce->epsilon_abs;
        j["ce_epsilon_rel"] = ce->epsilon_rel;
    }
    return j;
}

} // namespace disg
