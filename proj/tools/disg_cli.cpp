// disg — command-line front end.
//
// Subcommands:
//   simulate  run one scenario (learning or a fixed-assignment baseline),
//             write trace CSV and summary JSON, print a one-line result
//   sweep     run seeds 0..K-1 (learning + both baselines), write an
//             aggregate JSON, print convergence / gap statistics
//   verify    enumerate pure equilibria of a small instance, or check a
//             recorded trace's final profile for epsilon-equilibrium
//
// Exit codes: 0 = ran to completion; 1 = usage/config error;
// 2 = verification threshold failure.
#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "disg/engine.hpp"
#include "disg/scenario.hpp"
#include "disg/trace_io.hpp"
#include "disg/verify.hpp"

namespace {

struct CommonOpts {
    std::string scenario_path;
    std::uint64_t seed = 0;
    std::uint64_t max_iters = 500;
    double lock_threshold = 0.9;
};

struct SimulateOpts : CommonOpts {
    std::string baseline; // "", "random", or "shared"
    std::string out_path;
    std::string summary_path;
};

struct SweepOpts : CommonOpts {
    std::uint64_t seeds = 100;
    std::string out_path;
};

struct VerifyOpts {
    std::string scenario_path;
    std::string trace_path;
    std::string out_path;
    double eps = 1e-6;
    std::string power_grid = "levels";
};

// "levels" -> 0 (scenario level set only); "uniform:K" -> K grid points.
std::size_t parse_power_grid(const std::string& spec) {
    if (spec == "levels") return 0;
    const std::string prefix = "uniform:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string num = spec.substr(prefix.size());
        std::size_t pos = 0;
        const unsigned long k = std::stoul(num, &pos);
        if (pos != num.size() || k < 2)
            throw std::invalid_argument("--power-grid uniform:K requires K >= 2");
        return static_cast<std::size_t>(k);
    }
    throw std::invalid_argument("--power-grid must be 'levels' or 'uniform:K'");
}

int run_simulate(const SimulateOpts& opt) {
    const disg::Scenario sc = disg::load_scenario(opt.scenario_path);
    disg::Trace trace;
    if (opt.baseline.empty()) {
        trace = disg::run_disg(sc, opt.seed, opt.max_iters, opt.lock_threshold);
    } else if (opt.baseline == "random") {
        trace = disg::run_baseline(sc, opt.seed, opt.max_iters);
    } else if (opt.baseline == "shared") {
        trace = disg::run_baseline_shared(sc, opt.seed, opt.max_iters);
    } else {
        throw std::invalid_argument("--baseline must be 'random' or 'shared'");
    }
    if (!opt.out_path.empty()) disg::write_trace_csv(trace, sc, opt.out_path);
    if (!opt.summary_path.empty()) disg::write_summary_json(trace, sc, opt.summary_path);
    std::cout << "mode=" << trace.mode << " seed=" << trace.seed
              << " converged=" << (trace.converged ? "yes" : "no");
    if (trace.converged)
        std::cout << " convergence_iter=" << trace.convergence_iter;
    std::cout << " avg_sinr_db_last_quartile=" << disg::fmt_double(trace.avg_sinr_db_last_quartile)
              << " avg_sinr_db_full=" << disg::fmt_double(trace.avg_sinr_db_full) << "\n";
    return 0;
}

bool distinct_channels(const disg::Trace& trace) {
    std::vector<bool> used(trace.final_channels.size() + 64, false);
    for (std::size_t c : trace.final_channels) {
        if (c >= used.size()) used.resize(c + 1, false);
        if (used[c]) return false;
        used[c] = true;
    }
    return true;
}

int run_sweep(const SweepOpts& opt) {
    if (opt.seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
    const disg::Scenario sc = disg::load_scenario(opt.scenario_path);

    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    std::size_t converged_count = 0, distinct_count = 0;
    double gap_sum = 0.0, gap_shared_sum = 0.0;
    for (std::uint64_t seed = 0; seed < opt.seeds; ++seed) {
        const disg::Trace disg_trace = disg::run_disg(sc, seed, opt.max_iters, opt.lock_threshold);
        const disg::Trace rand_trace = disg::run_baseline(sc, seed, opt.max_iters);
        const disg::Trace shared_trace = disg::run_baseline_shared(sc, seed, opt.max_iters);
        const bool distinct = disg_trace.converged && distinct_channels(disg_trace);
        const double gap =
            disg_trace.avg_sinr_db_last_quartile - rand_trace.avg_sinr_db_last_quartile;
        const double gap_shared =
            disg_trace.avg_sinr_db_last_quartile - shared_trace.avg_sinr_db_last_quartile;
        converged_count += disg_trace.converged ? 1 : 0;
        distinct_count += distinct ? 1 : 0;
        gap_sum += gap;
        gap_shared_sum += gap_shared;

        nlohmann::ordered_json row;
        row["seed"] = seed;
        row["converged"] = disg_trace.converged;
        if (disg_trace.converged)
            row["convergence_iter"] = disg_trace.convergence_iter;
        else
            row["convergence_iter"] = nullptr;
        row["distinct_channels"] = distinct;
        row["disg_avg_sinr_db_last_quartile"] = disg_trace.avg_sinr_db_last_quartile;
        row["disg_avg_sinr_db_full"] = disg_trace.avg_sinr_db_full;
        row["baseline_avg_sinr_db_last_quartile"] = rand_trace.avg_sinr_db_last_quartile;
        row["shared_avg_sinr_db_last_quartile"] = shared_trace.avg_sinr_db_last_quartile;
        row["gap_db"] = gap;
        row["gap_db_shared"] = gap_shared;
        per_seed.push_back(std::move(row));
    }

    const double n = static_cast<double>(opt.seeds);
    nlohmann::ordered_json agg;
    agg["scenario_fingerprint"] = disg::fingerprint(sc);
    agg["seeds"] = opt.seeds;
    agg["max_iterations"] = opt.max_iters;
    agg["lock_threshold"] = opt.lock_threshold;
    agg["convergence_rate"] = static_cast<double>(converged_count) / n;
    agg["distinct_channel_rate"] = static_cast<double>(distinct_count) / n;
    agg["mean_gap_db"] = gap_sum / n;
    agg["mean_gap_db_shared"] = gap_shared_sum / n;
    agg["per_seed"] = std::move(per_seed);
    if (!opt.out_path.empty()) disg::atomic_write_text(opt.out_path, agg.dump(2) + "\n");

    std::cout << "sweep seeds=" << opt.seeds
              << " convergence_rate=" << disg::fmt_double(static_cast<double>(converged_count) / n)
              << " distinct_channel_rate="
              << disg::fmt_double(static_cast<double>(distinct_count) / n)
              << " mean_gap_db=" << disg::fmt_double(gap_sum / n)
              << " mean_gap_db_shared=" << disg::fmt_double(gap_shared_sum / n) << "\n";
    return 0;
}

// Rebuilds the per-round strategy profiles recorded in a trace CSV, keyed by
// the scenario's user and channel identifiers.
std::vector<disg::StrategyProfile> profiles_from_rows(const std::vector<disg::TraceRow>& rows,
                                                      const disg::Scenario& sc) {
    std::map<int, std::size_t> user_index;
    for (std::size_t i = 0; i < sc.users.size(); ++i) user_index[sc.users[i].id] = i;
    std::map<int, std::size_t> channel_index;
    for (std::size_t c = 0; c < sc.channels.size(); ++c) channel_index[sc.channels[c]] = c;

    std::vector<disg::StrategyProfile> profiles;
    std::uint64_t current_iter = 0;
    std::size_t filled = 0;
    for (const auto& row : rows) {
        if (profiles.empty() || row.iter != current_iter) {
            if (!profiles.empty() && filled != sc.num_users())
                throw std::runtime_error("trace: incomplete round " + std::to_string(current_iter));
            current_iter = row.iter;
            profiles.emplace_back(sc.num_users());
            filled = 0;
        }
        const auto ui = user_index.find(row.user_id);
        const auto ci = channel_index.find(row.channel_id);
        if (ui == user_index.end())
            throw std::runtime_error("trace: unknown user id " + std::to_string(row.user_id));
        if (ci == channel_index.end())
            throw std::runtime_error("trace: unknown channel id " + std::to_string(row.channel_id));
        profiles.back()[ui->second] = disg::Action{ci->second, row.power};
        ++filled;
    }
    if (!profiles.empty() && filled != sc.num_users())
        throw std::runtime_error("trace: incomplete round " + std::to_string(current_iter));
    if (profiles.empty()) throw std::runtime_error("trace: no rounds");
    return profiles;
}

disg::EmpiricalDistribution distribution_from_profiles(
    const std::vector<disg::StrategyProfile>& profiles) {
    std::map<std::vector<std::pair<std::size_t, double>>, std::size_t> index;
    disg::EmpiricalDistribution dist;
    std::vector<std::size_t> counts;
    for (const auto& prof : profiles) {
        std::vector<std::pair<std::size_t, double>> key;
        key.reserve(prof.size());
        for (const auto& a : prof) key.emplace_back(a.channel, a.power);
        const auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(std::move(key), dist.profiles.size());
            dist.profiles.push_back(prof);
            counts.push_back(1);
        } else {
            ++counts[it->second];
        }
    }
    dist.weights.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        dist.weights[i] = static_cast<double>(counts[i]) / static_cast<double>(profiles.size());
    return dist;
}

std::string format_profile(const disg::StrategyProfile& prof, const disg::Scenario& sc) {
    std::string out;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        if (i) out += "  ";
        out += "u" + std::to_string(sc.users[i].id) + ":ch" +
               std::to_string(sc.channels[prof[i].channel]) + "@" +
               disg::fmt_double(prof[i].power) + "mW";
    }
    return out;
}

int run_verify(const VerifyOpts& opt) {
    const disg::Scenario sc = disg::load_scenario(opt.scenario_path);
    const std::size_t grid_size = parse_power_grid(opt.power_grid);
    if (grid_size == 0 && sc.power_levels.empty())
        throw std::invalid_argument(
            "--power-grid levels requires a scenario with power_levels_mw; use uniform:K");

    if (opt.trace_path.empty()) {
        // Enumeration mode: list every pure equilibrium over the power set.
        const std::vector<double> powers = disg::deviation_powers(sc, grid_size);
        std::vector<disg::StrategyProfile> equilibria;
        try {
            equilibria = disg::brute_force_ne(sc, powers);
        } catch (const disg::instance_too_large& e) {
            std::cerr << "verify: " << e.what()
                      << " (run against a trace with --trace to check a single profile instead)"
                      << "\n";
            return 1;
        }
        std::cout << "pure equilibria over " << powers.size() << " power value(s): "
                  << equilibria.size() << "\n";
        for (const auto& prof : equilibria) std::cout << "  " << format_profile(prof, sc) << "\n";
        if (!opt.out_path.empty()) {
            const auto j =
                disg::report_json(sc, opt.power_grid, &equilibria, nullptr, nullptr, nullptr);
            disg::atomic_write_text(opt.out_path, j.dump(2) + "\n");
        }
        return 0;
    }

    // Trace mode: epsilon-equilibrium check of the final recorded profile,
    // plus an informational correlated-equilibrium epsilon over all rounds.
    const auto rows = disg::read_trace_csv(opt.trace_path);
    const auto profiles = profiles_from_rows(rows, sc);
    const disg::StrategyProfile& final_profile = profiles.back();
    const disg::DeviationReport report = disg::check_profile(sc, final_profile, grid_size);
    const disg::CeReport ce = disg::check_ce(distribution_from_profiles(profiles), sc);

    const bool pass = report.max_improvement_rel <= opt.eps;
    std::cout << "final profile: " << format_profile(final_profile, sc) << "\n";
    std::cout << "max relative improvement: " << disg::fmt_double(report.max_improvement_rel)
              << " (abs " << disg::fmt_double(report.max_improvement_abs) << ", eps "
              << disg::fmt_double(opt.eps) << ") -> " << (pass ? "PASS" : "FAIL") << "\n";
    std::cout << "empirical play over " << profiles.size()
              << " round(s): ce_epsilon_rel=" << disg::fmt_double(ce.epsilon_rel)
              << " ce_epsilon_abs=" << disg::fmt_double(ce.epsilon_abs) << " (informational)\n";
    if (!opt.out_path.empty()) {
        const auto j =
            disg::report_json(sc, opt.power_grid, nullptr, &final_profile, &report, &ce);
        disg::atomic_write_text(opt.out_path, j.dump(2) + "\n");
    }
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized interference suppression game: simulator and verifier"};
    app.require_subcommand(1);

    SimulateOpts sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "run one scenario and record its trace");
    sim->add_option("--scenario", sim_opt.scenario_path, "scenario JSON file")->required();
    sim->add_option("--seed", sim_opt.seed, "random seed (default 0)");
    sim->add_option("--max-iters", sim_opt.max_iters, "iteration cap (default 500)")
        ->check(CLI::PositiveNumber);
    sim->add_option("--lock-threshold", sim_opt.lock_threshold,
                    "strategy-mass threshold for locking (default 0.9)");
    CLI::Option* baseline_opt =
        sim->add_option("--baseline", sim_opt.baseline,
                        "fixed-assignment baseline instead of learning: 'random' or 'shared' "
                        "(bare flag means random)")
            ->expected(0, 1);
    sim->add_option("--out", sim_opt.out_path, "trace CSV output path");
    sim->add_option("--summary", sim_opt.summary_path, "summary JSON output path");

    SweepOpts sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "run a seed sweep with baselines");
    sweep->add_option("--scenario", sweep_opt.scenario_path, "scenario JSON file")->required();
    sweep->add_option("--seeds", sweep_opt.seeds, "number of seeds, 0..K-1 (default 100)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--max-iters", sweep_opt.max_iters, "iteration cap (default 500)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--lock-threshold", sweep_opt.lock_threshold,
                      "strategy-mass threshold for locking (default 0.9)");
    sweep->add_option("--out", sweep_opt.out_path, "aggregate JSON output path");

    VerifyOpts verify_opt;
    CLI::App* verify = app.add_subcommand("verify", "equilibrium checks");
    verify->add_option("--scenario", verify_opt.scenario_path, "scenario JSON file")->required();
    verify->add_option("--trace", verify_opt.trace_path,
                       "trace CSV whose final profile should be checked");
    verify->add_option("--eps", verify_opt.eps,
                       "maximum tolerated relative improvement (default 1e-6)");
    verify->add_option("--power-grid", verify_opt.power_grid,
                       "deviation power set: 'levels' or 'uniform:K' (default levels)");
    verify->add_option("--out", verify_opt.out_path, "report JSON output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) {
            if (baseline_opt->count() > 0 && sim_opt.baseline.empty()) sim_opt.baseline = "random";
            return run_simulate(sim_opt);
        }
        if (sweep->parsed()) return run_sweep(sweep_opt);
        if (verify->parsed()) return run_verify(verify_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
