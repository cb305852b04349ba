// fogsim: command-line front end for the fog offloading experiments.
//
// Exit codes: 0 success, 2 invalid input, 3 solver non-convergence,
// 4 verify failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fogopt/fogopt.hpp"

namespace {

using namespace fogopt;

constexpr int exit_invalid = 2;
constexpr int exit_solver = 3;
constexpr int exit_verify = 4;

struct CommonFlags
{
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> devices;
    std::optional<std::string> model;
    std::optional<double> lambda;
    std::optional<double> bandwidth_hz;
    std::optional<double> cpu_cap_hz;
    std::vector<double> etas;
    int eta_grid = 20;
    std::string out;
    bool trace = false;
    int threads = 0;
    std::optional<double> solver_tol;
    std::vector<double> fmax_list;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--scenario", f.scenario, "scenario file (key = value format)");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--runs", f.runs, "number of Monte-Carlo runs")->check(CLI::PositiveNumber);
    cmd->add_option("--devices", f.devices, "devices per run (K)")->check(CLI::PositiveNumber);
    cmd->add_option("--model", f.model, "power model")->check(CLI::IsMember({"practical", "unrealistic"}));
    cmd->add_option("--lambda", f.lambda, "CPU energy coefficient [J s^2/cycle^3]");
    cmd->add_option("--bandwidth-hz", f.bandwidth_hz, "uplink bandwidth [Hz]");
    cmd->add_option("--cpu-cap-hz", f.cpu_cap_hz, "fog CPU capacity [Hz]");
    cmd->add_option("--out", f.out, "output CSV path (stdout when omitted)");
    cmd->add_flag("--trace", f.trace, "print block-coordinate-descent objective traces to stderr");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_option("--solver-tol", f.solver_tol, "override every solver tolerance (testing hook)");
}

ScenarioSpec effective_scenario(const CommonFlags& f)
{
    ScenarioSpec s = f.scenario.empty() ? ScenarioSpec{} : load_scenario(f.scenario);
    if (f.seed) s.seed = *f.seed;
    if (f.runs) s.runs = *f.runs;
    if (f.devices) s.network.device_count = *f.devices;
    if (f.model) s.network.power_model = parse_power_model(*f.model);
    if (f.lambda) s.network.cpu_energy_lambda = *f.lambda;
    if (f.bandwidth_hz) s.network.bandwidth_hz = *f.bandwidth_hz;
    if (f.cpu_cap_hz) s.network.cpu_cap_hz = *f.cpu_cap_hz;
    s.validate();
    return s;
}

NbsOptions solver_options(const CommonFlags& f)
{
    NbsOptions o;
    if (f.solver_tol) {
        if (!(*f.solver_tol > 0.0)) throw ValidationError("--solver-tol must be > 0");
        o.rel_tol = *f.solver_tol;
        o.fractional.tol_t = *f.solver_tol;
        o.fractional.inner.tol = *f.solver_tol;
    }
    return o;
}

int thread_count(const CommonFlags& f)
{
    return f.threads > 0 ? f.threads : default_threads();
}

void emit(const Table& t, const std::string& path)
{
    if (path.empty())
        std::cout << format_table(t);
    else
        write_results(t, path);
}

// stderr carries the effective scenario followed by '#' comment lines only,
// so the whole stream parses back as a scenario file.
void note(const std::string& msg)
{
    std::cerr << "# " << msg << '\n';
}

void print_traces(const RunResults<RunOutcome>& res)
{
    for (const auto& r : res.values) {
        if (!r) continue;
        for (const auto& o : r->etas) {
            std::string line = "run " + std::to_string(r->run) + " eta " + format_cell(o.eta) + " trace";
            for (double v : o.objective_trace) line += " " + format_cell(v);
            note(line);
        }
    }
}

int finish_runs(const RunResults<RunOutcome>& res, const Table& t, const CommonFlags& f)
{
    if (f.trace) print_traces(res);
    if (!t.rows.empty()) emit(t, f.out);
    if (res.error) {
        try {
            res.rethrow_if_failed();
        } catch (const std::exception& e) {
            note("run " + std::to_string(res.failed_run) + " failed: " + e.what());
        }
        return exit_solver;
    }
    return 0;
}

int run_pareto(const CommonFlags& f)
{
    const ScenarioSpec s = effective_scenario(f);
    std::cerr << format_scenario(s);
    const std::vector<double> etas = f.etas.empty() ? eta_grid(f.eta_grid) : f.etas;
    const auto res = solve_runs(s, etas, solver_options(f), thread_count(f));
    return finish_runs(res, pareto_table(etas, res), f);
}

int run_equilibrium(const CommonFlags& f)
{
    const ScenarioSpec s = effective_scenario(f);
    std::cerr << format_scenario(s);
    const std::vector<double> etas = f.etas.empty() ? std::vector<double>{0.5} : f.etas;
    const auto res = solve_runs(s, etas, solver_options(f), thread_count(f));
    return finish_runs(res, equilibrium_table(res), f);
}

int run_sweep(const CommonFlags& f)
{
    const ScenarioSpec s = effective_scenario(f);
    std::cerr << format_scenario(s);
    const std::vector<double> etas = f.etas.empty() ? std::vector<double>{0.01, 0.9} : f.etas;
    std::vector<double> fmax = f.fmax_list;
    if (fmax.empty())
        for (int i = 1; i <= 10; ++i) fmax.push_back(0.3e9 * i);
    const SweepResult res = sweep_fmax(s, fmax, etas, solver_options(f), thread_count(f));
    if (!res.rows.empty()) emit(sweep_table(res.rows), f.out);
    if (res.error) {
        try {
            std::rethrow_exception(res.error);
        } catch (const std::exception& e) {
            note(std::string("sweep failed: ") + e.what());
        }
        return exit_solver;
    }
    return 0;
}

int run_baseline(const CommonFlags& f)
{
    const ScenarioSpec s = effective_scenario(f);
    std::cerr << format_scenario(s);
    emit(baseline_table(s), f.out);
    return 0;
}

int run_verify(const CommonFlags& f)
{
    const ScenarioSpec s = effective_scenario(f);
    std::cerr << format_scenario(s);
    VerifyOptions vo;
    if (!f.etas.empty()) vo.etas = f.etas;
    const auto checks = verify_scenario(s, solver_options(f), vo);
    const Table t = verify_table(checks);
    if (f.out.empty()) {
        // Human-readable table on stdout.
        std::printf("%-4s %-14s %-10s %16s %16s %16s  %s\n", "run", "check", "subject", "solver", "oracle",
                    "allowed", "pass");
        for (const auto& c : checks)
            std::printf("%-4d %-14s %-10s %16.9g %16.9g %16.9g  %s\n", c.run, c.check.c_str(), c.subject.c_str(),
                        c.solver, c.oracle, c.allowed, c.pass ? "yes" : "NO");
    } else {
        write_results(t, f.out);
    }
    std::size_t failed = 0;
    for (const auto& c : checks) failed += c.pass ? 0 : 1;
    note(std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed");
    return failed == 0 ? 0 : exit_verify;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Latency-energy Pareto and Nash bargaining allocation for fog offloading"};
    app.require_subcommand(1);

    CommonFlags f;
    auto* pareto = app.add_subcommand("pareto", "average equilibrium (T, E) per eta over the runs");
    auto* equilibrium = app.add_subcommand("equilibrium", "per-device equilibrium allocation for each run");
    auto* sweep = app.add_subcommand("sweep-fmax", "equilibrium vs equal-share baseline over fog CPU capacity");
    auto* baseline = app.add_subcommand("baseline", "equal-share allocation metrics");
    auto* verify = app.add_subcommand("verify", "compare the solvers against brute-force grids");
    for (auto* c : {pareto, equilibrium, sweep, baseline, verify}) add_common(c, f);
    for (auto* c : {pareto, equilibrium, sweep, verify})
        c->add_option("--eta", f.etas, "eta values in [0, 1]")->delimiter(',');
    pareto->add_option("--eta-grid", f.eta_grid, "number of eta grid points")->check(CLI::Range(2, 100000));
    sweep->add_option("--fmax-list", f.fmax_list, "comma-separated fog CPU capacities [Hz]")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_invalid;
    }

    try {
        if (*pareto) return run_pareto(f);
        if (*equilibrium) return run_equilibrium(f);
        if (*sweep) return run_sweep(f);
        if (*baseline) return run_baseline(f);
        return run_verify(f);
    } catch (const ParseError& e) {
        note(std::string("error: ") + e.what());
        return exit_invalid;
    } catch (const ValidationError& e) {
        note(std::string("error: ") + e.what());
        return exit_invalid;
    } catch (const IoError& e) {
        note(std::string("error: ") + e.what());
        return exit_invalid;
    } catch (const SolverError& e) {
        note(std::string("solver error: ") + e.what());
        return exit_solver;
    } catch (const Error& e) {
        note(std::string("error: ") + e.what());
        return exit_invalid;
    }
}
