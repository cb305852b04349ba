#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fogopt/csv.hpp"
#include "fogopt/game.hpp"
#include "fogopt/oracle.hpp"
#include "fogopt/scenario.hpp"

namespace fogopt {

// Outcome of a per-run map. values[r] is empty for runs that threw;
// error holds the exception of the lowest failing run index.
template <class R>
struct RunResults
{
    std::vector<std::optional<R>> values;
    std::exception_ptr error;
    int failed_run = -1;

    void rethrow_if_failed() const
    {
        if (error) std::rethrow_exception(error);
    }
};

/*
 * Evaluates fn(run) for run in [0, runs) on up to `threads` workers.
 * Results are stored by run index, so the output does not depend on
 * scheduling.
 */
template <class Fn>
auto map_runs(int runs, int threads, Fn fn) -> RunResults<decltype(fn(0))>
{
    using R = decltype(fn(0));
    RunResults<R> out;
    out.values.resize(static_cast<std::size_t>(std::max(runs, 0)));
    std::vector<std::exception_ptr> errors(out.values.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < runs; r = next++) {
            try {
                out.values[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    const int n = std::clamp(threads, 1, std::max(runs, 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t r = 0; r < errors.size(); ++r)
        if (errors[r]) {
            out.error = errors[r];
            out.failed_run = static_cast<int>(r);
            break;
        }
    return out;
}

inline int default_threads()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// n points in [0.001, 0.999], evenly spaced in logit(eta) and therefore
// symmetric about 1/2 and dense near both ends.
inline std::vector<double> eta_grid(int n, double lo = 0.001)
{
    if (n < 2) throw ValidationError("eta grid needs at least 2 points");
    const double a = std::log(lo / (1.0 - lo));
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        const double z = a - 2.0 * a * static_cast<double>(i) / static_cast<double>(n - 1);
        g.push_back(1.0 / (1.0 + std::exp(-z)));
    }
    return g;
}

// Per-device outcome of one (run, eta) solve.
struct DeviceOutcome
{
    double f_hz = 0.0;
    double p_w = 0.0;
    double y = 0.0;
    double t_s = 0.0;
    double e_j = 0.0;
};

struct EtaOutcome
{
    double eta = 0.0;
    std::vector<DeviceOutcome> devices;
    double product_utility = 0.0;
    int iterations = 0;
    std::vector<double> objective_trace;

    double mean(double DeviceOutcome::*field) const
    {
        double s = 0.0;
        for (const auto& d : devices) s += d.*field;
        return s / static_cast<double>(devices.size());
    }
};

struct RunOutcome
{
    int run = 0;
    std::vector<EtaOutcome> etas;
};

/*
 * eta = 0 and eta = 1 are answered by the single-objective ideal points of
 * each device (energy and latency respectively), not by the game.
 */
inline EtaOutcome endpoint_outcome(const GameInstance& g, double eta)
{
    EtaOutcome o;
    o.eta = eta;
    o.product_utility = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Device& d = g.devices[k];
        const double f = eta == 0.0 ? g.ideals[k].argmin_f_hz : g.cfg.cpu_cap_hz;
        const double p = eta == 0.0 ? g.ideals[k].argmin_p_w : d.max_power_w;
        const LatencyEnergy m = evaluate(d, f, p, g.cfg);
        o.devices.push_back({f, p, 0.0, m.t_total_s, m.e_total_j});
    }
    return o;
}

inline void check_eta(double eta)
{
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
}

/*
 * Solves the game of one run at every eta, in the given order, warm-starting
 * each solve from the previous equilibrium.
 */
inline RunOutcome solve_run(const ScenarioSpec& spec, int run, const std::vector<double>& etas, const NbsOptions& opts)
{
    const GameInstance g = GameInstance::make(sample_devices(spec, run), spec.network, opts.fractional);
    RunOutcome out;
    out.run = run;
    std::optional<GameState> warm;
    for (double eta : etas) {
        check_eta(eta);
        if (eta == 0.0 || eta == 1.0) {
            out.etas.push_back(endpoint_outcome(g, eta));
            continue;
        }
        const EquilibriumReport rep = solve_nbs(g, eta, spec.seed + static_cast<std::uint64_t>(run), opts,
                                                warm ? &*warm : nullptr);
        warm = rep.state;
        EtaOutcome o;
        o.eta = eta;
        o.product_utility = rep.product_utility;
        o.iterations = rep.iterations;
        o.objective_trace = rep.objective_trace;
        for (std::size_t k = 0; k < g.size(); ++k)
            o.devices.push_back({rep.state.allocation.freqs_hz[k], rep.state.allocation.powers_w[k], rep.y_exact[k],
                                 rep.per_device[k].t_total_s, rep.per_device[k].e_total_j});
        out.etas.push_back(std::move(o));
    }
    return out;
}

inline RunResults<RunOutcome> solve_runs(const ScenarioSpec& spec, const std::vector<double>& etas,
                                         const NbsOptions& opts = {}, int threads = 1)
{
    for (double eta : etas) check_eta(eta);
    return map_runs(spec.runs, threads, [&](int r) { return solve_run(spec, r, etas, opts); });
}

// Pareto CSV: per eta, device values averaged over devices and completed runs.
inline Table pareto_table(const std::vector<double>& etas, const RunResults<RunOutcome>& res)
{
    Table t{{"eta", "T_s", "E_J", "f_hz", "p_w", "y"}, {}};
    for (std::size_t i = 0; i < etas.size(); ++i) {
        double sums[5] = {0, 0, 0, 0, 0};
        int n = 0;
        for (const auto& r : res.values) {
            if (!r) continue;
            const EtaOutcome& o = r->etas[i];
            sums[0] += o.mean(&DeviceOutcome::t_s);
            sums[1] += o.mean(&DeviceOutcome::e_j);
            sums[2] += o.mean(&DeviceOutcome::f_hz);
            sums[3] += o.mean(&DeviceOutcome::p_w);
            sums[4] += o.mean(&DeviceOutcome::y);
            ++n;
        }
        if (n == 0) continue;
        std::vector<Cell> row{etas[i]};
        for (double s : sums) row.emplace_back(s / n);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table equilibrium_table(const RunResults<RunOutcome>& res)
{
    Table t{{"run", "eta", "k", "f_hz", "p_w", "y", "T_s", "E_J", "product_utility", "iterations"}, {}};
    for (const auto& r : res.values) {
        if (!r) continue;
        for (const EtaOutcome& o : r->etas) {
            for (std::size_t k = 0; k < o.devices.size(); ++k) {
                const DeviceOutcome& d = o.devices[k];
                t.rows.push_back({static_cast<long long>(r->run), o.eta, std::to_string(k), d.f_hz, d.p_w, d.y, d.t_s,
                                  d.e_j, std::string(), std::string()});
            }
            t.rows.push_back({static_cast<long long>(r->run), o.eta, std::string("all"), std::string(), std::string(),
                              std::string(), std::string(), std::string(), o.product_utility,
                              static_cast<long long>(o.iterations)});
        }
    }
    return t;
}

inline Table baseline_table(const ScenarioSpec& spec)
{
    Table t{{"run", "k", "f_hz", "p_w", "T_s", "E_J"}, {}};
    for (int r = 0; r < spec.runs; ++r) {
        const auto devices = sample_devices(spec, r);
        const BaselineReport b = equal_share_baseline(devices, spec.network);
        for (std::size_t k = 0; k < devices.size(); ++k)
            t.rows.push_back({static_cast<long long>(r), static_cast<long long>(k), b.allocation.freqs_hz[k],
                              b.allocation.powers_w[k], b.per_device[k].t_total_s, b.per_device[k].e_total_j});
    }
    return t;
}

struct SweepRow
{
    double fmax_hz = 0.0;
    double eta = 0.0;
    double e_j = 0.0;
    double t_s = 0.0;
    double baseline_e_j = 0.0;
    double baseline_t_s = 0.0;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    std::exception_ptr error;
};

/*
 * Mean per-device equilibrium energy and latency over all runs for every
 * (fmax, eta) pair, next to the equal-share baseline at the same fmax.
 * Device draws do not depend on fmax.
 */
inline SweepResult sweep_fmax(const ScenarioSpec& spec, const std::vector<double>& fmax_list,
                              const std::vector<double>& etas, const NbsOptions& opts = {}, int threads = 1)
{
    if (fmax_list.empty() || etas.empty()) throw ValidationError("sweep-fmax needs nonempty fmax and eta lists");
    SweepResult out;
    for (double fmax : fmax_list) {
        ScenarioSpec s = spec;
        s.network.cpu_cap_hz = fmax;
        s.validate();
        const auto res = solve_runs(s, etas, opts, threads);
        if (res.error) {
            out.error = res.error;
            return out;
        }
        double be = 0.0, bt = 0.0;
        std::size_t nb = 0;
        for (int r = 0; r < s.runs; ++r) {
            const auto devices = sample_devices(s, r);
            for (const auto& m : equal_share_baseline(devices, s.network).per_device) {
                be += m.e_total_j;
                bt += m.t_total_s;
                ++nb;
            }
        }
        for (std::size_t i = 0; i < etas.size(); ++i) {
            SweepRow row{fmax, etas[i], 0.0, 0.0, be / static_cast<double>(nb), bt / static_cast<double>(nb)};
            std::size_t n = 0;
            for (const auto& r : res.values)
                for (const auto& d : r->etas[i].devices) {
                    row.e_j += d.e_j;
                    row.t_s += d.t_s;
                    ++n;
                }
            row.e_j /= static_cast<double>(n);
            row.t_s /= static_cast<double>(n);
            out.rows.push_back(row);
        }
    }
    return out;
}

inline Table sweep_table(const std::vector<SweepRow>& rows)
{
    Table t{{"fmax_hz", "eta", "E_J", "T_s", "baseline_E_J", "baseline_T_s"}, {}};
    for (const auto& r : rows) t.rows.push_back({r.fmax_hz, r.eta, r.e_j, r.t_s, r.baseline_e_j, r.baseline_t_s});
    return t;
}

struct VerifyCheck
{
    int run = 0;
    std::string check;
    std::string subject;
    double solver = 0.0;
    double oracle = 0.0;
    double allowed = 0.0;
    bool pass = false;
};

struct VerifyOptions
{
    std::vector<double> etas{0.1, 0.5, 0.9};
    int single_points = 300;
    // Product grid points per axis; 0 picks 30 for K <= 2 and 21 for K = 3.
    int product_points = 0;
    double product_rel_tol = 0.02;
};

/*
 * Solver versus brute-force grid, per run of a small scenario (K <= 3):
 *   ideal_latency  equals the latency grid minimum at the (fbar0, pbar) corner;
 *   ideal_energy   within one grid cell of the energy grid minimum;
 *   nbs_product    prod y_k at most (1 + product_rel_tol) times the grid minimum
 *                  (the grid value bounds the continuous optimum from above).
 */
inline std::vector<VerifyCheck> verify_scenario(const ScenarioSpec& spec, const NbsOptions& opts = {},
                                                const VerifyOptions& vo = {})
{
    const int K = spec.network.device_count;
    if (K > 3) throw ValidationError("verify supports at most 3 devices");
    const int pp = vo.product_points > 0 ? vo.product_points : (K <= 2 ? 30 : 21);
    std::vector<VerifyCheck> out;
    for (int r = 0; r < spec.runs; ++r) {
        const auto devices = sample_devices(spec, r);
        const GameInstance g = GameInstance::make(devices, spec.network, opts.fractional);
        for (int k = 0; k < K; ++k) {
            const Device& d = devices[static_cast<std::size_t>(k)];
            const auto grid = GridSpec::standard({d}, spec.network, vo.single_points, min_freq_fraction,
                                                 min_power_fraction);
            const GridPoint lat = grid_min_single(d, spec.network, GridObjective::Latency, grid);
            const double tmin = g.ideals[static_cast<std::size_t>(k)].t_min_s;
            out.push_back({r, "ideal_latency", "k=" + std::to_string(k), tmin, lat.value, 0.0, tmin == lat.value});
            const GridPoint en = grid_min_single(d, spec.network, GridObjective::Energy, grid);
            const double emin = g.ideals[static_cast<std::size_t>(k)].e_min_j;
            out.push_back({r, "ideal_energy", "k=" + std::to_string(k), emin, en.value, en.cell_variation,
                           std::abs(emin - en.value) <= en.cell_variation});
        }
        const auto grid = GridSpec::standard(devices, spec.network, pp);
        for (double eta : vo.etas) {
            const EquilibriumReport rep = solve_nbs(g, eta, spec.seed + static_cast<std::uint64_t>(r), opts);
            const GridProduct o = grid_min_product(devices, spec.network, eta, g.ideals, grid);
            const double allowed = (1.0 + vo.product_rel_tol) * o.value;
            char subject[32];
            std::snprintf(subject, sizeof subject, "eta=%g", eta);
            out.push_back({r, "nbs_product", subject, rep.product_utility, o.value, allowed,
                           rep.product_utility <= allowed});
        }
    }
    return out;
}

inline Table verify_table(const std::vector<VerifyCheck>& checks)
{
    Table t{{"run", "check", "subject", "solver", "oracle", "allowed", "pass"}, {}};
    for (const auto& c : checks)
        t.rows.push_back({static_cast<long long>(c.run), c.check, c.subject, c.solver, c.oracle, c.allowed,
                          std::string(c.pass ? "yes" : "no")});
    return t;
}

} // namespace fogopt
