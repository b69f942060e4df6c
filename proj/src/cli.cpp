#include "ostop/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ostop/config.hpp"
#include "ostop/errors.hpp"
#include "ostop/oracle.hpp"
#include "ostop/solve.hpp"

namespace ostop::cli {

using nlohmann::json;

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("OSTOP_LOG");
        if (!env)
            return 1; // info
        const std::string v = env;
        if (v == "debug")
            return 2;
        if (v == "info")
            return 1;
        if (v == "warn" || v == "error")
            return 0;
        return 0; // none/unknown
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1)
        std::cerr << "[ostop] " << msg << "\n";
}

json encode_endpoint(double v) {
    if (std::isfinite(v))
        return v;
    return v > 0 ? json("inf") : json("-inf");
}

double decode_endpoint(const json& j) {
    if (j.is_number())
        return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    throw InvalidParameterError("report: bad endpoint value \"" + s + "\"");
}

json verification_json(const VerificationReport& v) {
    return {{"inversion_residual", v.inversion_residual},
            {"majorant_min_gap", v.majorant_min_gap},
            {"stop_region_max_gap", v.stop_region_max_gap},
            {"smooth_fit_max", v.smooth_fit_max},
            {"harmonicity_max", v.harmonicity_max}};
}

json solution_report(const Solution& s, const VerificationReport& v,
                     const SolverOptions& opts) {
    json continuation = json::array();
    for (const IntervalSolution& iv : s.intervals)
        continuation.push_back({{"lo", encode_endpoint(iv.c.lo)},
                                {"hi", encode_endpoint(iv.c.hi)},
                                {"k1", iv.k1},
                                {"k2", iv.k2}});
    json pairs = json::array();
    for (const PairNC& p : s.pairs)
        pairs.push_back({{"n_lo", encode_endpoint(p.n.lo)},
                         {"n_hi", encode_endpoint(p.n.hi)},
                         {"c_lo", encode_endpoint(p.c.lo)},
                         {"c_hi", encode_endpoint(p.c.hi)}});
    json diagnostics = json::array();
    for (const ConditionReport& d : s.diagnostics)
        diagnostics.push_back({{"i_phi", d.i_phi},
                               {"i_psi", d.i_psi},
                               {"ii_residual", d.ii_residual},
                               {"iii_residual", d.iii_residual},
                               {"iv_max", d.iv_max},
                               {"satisfied", d.satisfied}});
    return {{"schema", "ostop-report/1"},
            {"alpha", s.model.alpha()},
            {"stop_everywhere", s.stop_everywhere()},
            {"continuation", continuation},
            {"pairs", pairs},
            {"diagnostics", diagnostics},
            {"verification", verification_json(v)},
            {"solver_meta",
             {{"initial_pairs", s.stats.initial_pairs},
              {"merges", s.stats.merges},
              {"iterations", s.stats.iterations},
              {"work_window", json::array({opts.work_window.lo, opts.work_window.hi})},
              {"root_tol", opts.root_tol},
              {"enlarge_tol", opts.enlarge_tol},
              {"gap_tol", opts.gap_tol}}}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw InvalidParameterError("cannot open output file " + path);
    out << text;
}

void write_json(const std::string& path, const json& j) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    write_text(path, j.dump(2) + "\n");
}

struct Args {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::string samples_path;
    std::string report_path; // verify only
    std::optional<std::uint64_t> seed;
    std::optional<std::pair<double, double>> window;
    bool quiet = false;
};

int run_solve(const Args& args) {
    ProblemConfig cfg = parse_config_file(args.config_path);
    if (args.window)
        cfg.solver.work_window = {args.window->first, args.window->second};
    const Solution solution = solve(cfg.model, cfg.reward, cfg.solver);
    const VerificationReport v = verify_solution(solution, cfg.solver);
    write_json(args.out_path, solution_report(solution, v, cfg.solver));
    if (!args.quiet) {
        std::ostringstream ss;
        ss << "continuation region:";
        if (solution.stop_everywhere())
            ss << " empty (stop everywhere)";
        for (const IntervalSolution& iv : solution.intervals)
            ss << " (" << iv.c.lo << ", " << iv.c.hi << ")";
        log_info(ss.str());
    }
    return kExitOk;
}

int run_verify(const Args& args) {
    ProblemConfig cfg = parse_config_file(args.config_path);
    if (args.window)
        cfg.solver.work_window = {args.window->first, args.window->second};

    std::ifstream in(args.report_path);
    if (!in)
        throw InvalidParameterError("cannot open report file " + args.report_path);
    json report = json::parse(in, nullptr, true);
    if (report.value("schema", "") != "ostop-report/1")
        throw InvalidParameterError("report: unsupported schema");

    Solution solution;
    solution.model = cfg.model;
    solution.reward = cfg.reward;
    for (const json& iv : report.at("continuation"))
        solution.intervals.push_back({{decode_endpoint(iv.at("lo")), decode_endpoint(iv.at("hi"))},
                                      iv.at("k1").get<double>(),
                                      iv.at("k2").get<double>()});
    const VerificationReport v = verify_solution(solution, cfg.solver);

    json out = {{"schema", "ostop-verify/1"},
                {"continuation", report.at("continuation")},
                {"verification", verification_json(v)}};
    write_json(args.out_path, out);
    return kExitOk;
}

int run_oracle(const Args& args) {
    ProblemConfig cfg = parse_config_file(args.config_path);
    if (args.window)
        cfg.solver.work_window = {args.window->first, args.window->second};
    if (args.seed)
        cfg.oracle.mc_seed = *args.seed;

    const Solution solution = solve(cfg.model, cfg.reward, cfg.solver);
    const StoppingPolicy policy = StoppingPolicy::from_solution(solution);

    json out = {{"schema", "ostop-oracle/1"}};
    if (cfg.oracle.run_brute_force) {
        std::vector<double> eval_points = cfg.oracle.eval_points;
        if (eval_points.empty()) {
            const Interval w = cfg.oracle.bf_window;
            for (int i = 0; i < 20; ++i)
                eval_points.push_back(w.lo + w.width() * (i + 0.5) / 20);
        }
        const BruteForceResult bf =
            brute_force(cfg.model, cfg.reward.g, cfg.oracle.gap_counts, cfg.oracle.bf_window,
                        cfg.oracle.bf_grid_step, eval_points);
        json points = json::array();
        double max_excess = -std::numeric_limits<double>::infinity();
        for (const BruteForcePoint& p : bf.points) {
            const double solver_value = evaluate(solution, p.x);
            const double excess = p.best_value - solver_value;
            max_excess = std::max(max_excess, excess);
            json entry = {{"x", p.x},
                          {"best_value", p.best_value},
                          {"solver_value", solver_value},
                          {"excess", excess}};
            if (p.best_gap)
                entry["best_gap"] = json::array({p.best_gap->lo, p.best_gap->hi});
            points.push_back(entry);
        }
        out["dominance"] = {{"max_excess", max_excess}, {"points", points}};
        if (!args.quiet)
            log_info("brute force max excess over solver value: " + std::to_string(max_excess));
    }
    if (cfg.oracle.run_monte_carlo) {
        json mc = json::array();
        for (double x : cfg.oracle.mc_points) {
            const OracleEstimate est =
                monte_carlo_value(cfg.model, cfg.reward.g, policy, x, cfg.oracle.mc_paths,
                                  cfg.oracle.mc_dt, cfg.oracle.mc_seed);
            const double solver_value = evaluate(solution, x);
            mc.push_back({{"x", x},
                          {"estimate", est.value},
                          {"std_error", est.std_error},
                          {"solver_value", solver_value},
                          {"within_3se",
                           std::abs(est.value - solver_value) <= 3.0 * est.std_error}});
        }
        out["monte_carlo"] = mc;
    }
    write_json(args.out_path, out);
    return kExitOk;
}

int run_sample(const Args& args) {
    ProblemConfig cfg = parse_config_file(args.config_path);
    if (args.window)
        cfg.solver.work_window = {args.window->first, args.window->second};
    const Solution solution = solve(cfg.model, cfg.reward, cfg.solver);

    const std::string path = args.samples_path.empty() ? args.out_path : args.samples_path;
    std::ostringstream csv;
    csv << "x,g,V,region\n";
    char buf[96];
    const Interval r = cfg.sample_range;
    for (int i = 0; i < cfg.sample_count; ++i) {
        const double x = r.lo + r.width() * i / (cfg.sample_count - 1);
        const double gx = cfg.reward.g(x);
        const double vx = evaluate(solution, x);
        std::string region = "stop";
        for (std::size_t k = 0; k < solution.intervals.size(); ++k)
            if (solution.intervals[k].c.contains(x)) {
                region = "cont-" + std::to_string(k + 1);
                break;
            }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", x, gx, vx, region.c_str());
        csv << buf;
    }
    if (path.empty())
        std::cout << csv.str();
    else
        write_text(path, csv.str());
    return kExitOk;
}

json error_json(const std::string& type, const std::string& message) {
    return {{"schema", "ostop-error/1"}, {"error", {{"type", type}, {"message", message}}}};
}

int dispatch(const Args& args) {
    if (args.command == "solve")
        return run_solve(args);
    if (args.command == "verify")
        return run_verify(args);
    if (args.command == "oracle")
        return run_oracle(args);
    if (args.command == "sample")
        return run_sample(args);
    throw InvalidParameterError("unknown command " + args.command);
}

} // namespace

int run_main(const std::vector<std::string>& argv) {
    CLI::App app{"ostop - optimal stopping of one-dimensional diffusions"};
    app.require_subcommand(1);

    Args args;
    std::vector<std::string> window_raw;
    std::uint64_t seed_raw = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "problem config (JSON)")->required();
        sub->add_option("--out", args.out_path, "output report path (stdout when omitted)");
        sub->add_option("--samples", args.samples_path, "CSV sample output path");
        sub->add_option("--seed", seed_raw, "Monte Carlo seed override")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--window", window_raw, "work window override: lo hi")->expected(2);
        sub->add_flag("--quiet", args.quiet, "suppress progress output");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve and write the solution report");
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "verify a previously written solution report");
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "run brute-force / Monte Carlo cross checks");
    CLI::App* sample_cmd = app.add_subcommand("sample", "write CSV samples of g and V");
    for (CLI::App* sub : {solve_cmd, verify_cmd, oracle_cmd, sample_cmd})
        add_common(sub);
    verify_cmd->add_option("report", args.report_path, "solution report to verify")->required();

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return kExitOk; // --help
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    for (CLI::App* sub : {solve_cmd, verify_cmd, oracle_cmd, sample_cmd})
        if (sub->parsed())
            args.command = sub->get_name();
    if (seed_set)
        args.seed = seed_raw;
    if (window_raw.size() == 2)
        args.window = {std::stod(window_raw[0]), std::stod(window_raw[1])};

    auto emit_error = [&](const std::string& type, const std::string& message, int code) {
        try {
            write_json(args.out_path, error_json(type, message));
        } catch (...) {
        }
        std::cerr << "error (" << type << "): " << message << "\n";
        return code;
    };

    try {
        return dispatch(args);
    } catch (const DegeneracyError& e) {
        return emit_error("degeneracy", e.what(), kExitDegeneracy);
    } catch (const ConvergenceError& e) {
        return emit_error("convergence", e.what(), kExitConvergence);
    } catch (const AccuracyError& e) {
        return emit_error("accuracy", e.what(), kExitConvergence);
    } catch (const InvalidParameterError& e) {
        return emit_error("config", e.what(), kExitConfig);
    } catch (const std::exception& e) {
        return emit_error("internal", e.what(), kExitFailure);
    }
}

} // namespace ostop::cli
