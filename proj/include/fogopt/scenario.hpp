#pragma once
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fogopt/model.hpp"
#include "fogopt/rng.hpp"

namespace fogopt {

struct Range
{
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Range&) const = default;
};

struct ScenarioSpec
{
    NetworkConfig network;
    double cell_radius_km = 0.07;
    Range task_bits_range{8e5, 8.8e6};
    Range cycles_range{50.0, 250.0};
    Range idle_power_range{2.0, 3.5};
    double max_power_w = 2.0;
    std::uint64_t seed = 1;
    int runs = 200;

    void validate() const
    {
        network.validate();
        if (!(cell_radius_km > 0.0) || !std::isfinite(cell_radius_km))
            throw ValidationError("cell_radius_km must be a finite value > 0");
        auto check = [](const Range& r, const char* name, bool allow_zero) {
            if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
                throw ValidationError(std::string(name) + ": need finite lo <= hi");
            if (allow_zero ? r.lo < 0.0 : !(r.lo > 0.0))
                throw ValidationError(std::string(name) + (allow_zero ? ": lo must be >= 0" : ": lo must be > 0"));
        };
        check(task_bits_range, "task_bits", false);
        check(cycles_range, "cycles_per_bit", false);
        check(idle_power_range, "idle_power_w", true);
        if (!(max_power_w > 0.0) || !std::isfinite(max_power_w))
            throw ValidationError("max_power_w must be a finite value > 0");
        if (runs < 1) throw ValidationError("runs must be >= 1");
    }

    bool operator==(const ScenarioSpec&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/*
 * Scenario files are flat "key = value" lines; '#' starts a comment.
 * Ranges are written "lo, hi". Keys:
 *
 *   bandwidth_hz, cpu_cap_hz, cpu_energy_lambda, pathloss_alpha,
 *   pathloss_beta | beta_db, noise_density_w_per_hz | n0_dbm_per_hz,
 *   power_model, device_count, cell_radius_km, task_bits, cycles_per_bit,
 *   idle_power_w, max_power_w, seed, runs
 *
 * Every key is required except that each dB key may replace its linear one.
 */
inline ScenarioSpec parse_scenario(std::istream& in, const std::string& path = "<stream>")
{
    struct Entry { std::string value; std::size_t line; };
    std::map<std::string, Entry> kv;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view sv = raw;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        const std::string line = detail::trim(sv);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(path, line_no, "expected 'key = value'");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ParseError(path, line_no, "empty key");
        if (value.empty()) throw ParseError(path, line_no, "empty value for '" + key + "'");
        if (kv.count(key)) throw ParseError(path, line_no, "duplicate key '" + key + "'");
        kv.emplace(std::move(key), Entry{std::move(value), line_no});
    }

    auto number = [&](const std::string& key) -> double {
        const Entry& e = kv.at(key);
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw ParseError(path, e.line, "'" + key + "' is not a number");
        return v;
    };
    auto range = [&](const std::string& key) -> Range {
        const Entry& e = kv.at(key);
        const auto comma = e.value.find(',');
        if (comma == std::string::npos) throw ParseError(path, e.line, "'" + key + "' needs 'lo, hi'");
        Range r;
        for (int part = 0; part < 2; ++part) {
            const std::string s = detail::trim(part == 0 ? std::string_view(e.value).substr(0, comma)
                                                         : std::string_view(e.value).substr(comma + 1));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
                throw ParseError(path, e.line, "'" + key + "' bound is not a number");
            (part == 0 ? r.lo : r.hi) = v;
        }
        return r;
    };
    auto integer = [&](const std::string& key) -> long long {
        const Entry& e = kv.at(key);
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (ec != std::errc() || ptr != e.value.data() + e.value.size())
            throw ParseError(path, e.line, "'" + key + "' is not an integer");
        return v;
    };
    auto require = [&](const std::string& key) {
        if (!kv.count(key)) throw ValidationError(path + ": missing required field '" + key + "'");
    };
    auto either = [&](const std::string& a, const std::string& b) -> std::string {
        const bool ha = kv.count(a) > 0, hb = kv.count(b) > 0;
        if (ha && hb) throw ValidationError(path + ": give only one of '" + a + "' and '" + b + "'");
        if (!ha && !hb) throw ValidationError(path + ": missing required field '" + a + "' (or '" + b + "')");
        return ha ? a : b;
    };

    static const char* const known[] = {
        "bandwidth_hz", "cpu_cap_hz", "cpu_energy_lambda", "pathloss_alpha", "pathloss_beta", "beta_db",
        "noise_density_w_per_hz", "n0_dbm_per_hz", "power_model", "device_count", "cell_radius_km",
        "task_bits", "cycles_per_bit", "idle_power_w", "max_power_w", "seed", "runs"};
    for (const auto& [key, e] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError(path, e.line, "unknown key '" + key + "'");
    }

    ScenarioSpec s;
    for (const char* k : {"bandwidth_hz", "cpu_cap_hz", "cpu_energy_lambda", "pathloss_alpha", "power_model",
                          "device_count", "cell_radius_km", "task_bits", "cycles_per_bit", "idle_power_w",
                          "max_power_w", "seed", "runs"})
        require(k);
    s.network.bandwidth_hz = number("bandwidth_hz");
    s.network.cpu_cap_hz = number("cpu_cap_hz");
    s.network.cpu_energy_lambda = number("cpu_energy_lambda");
    s.network.pathloss_alpha = number("pathloss_alpha");
    const std::string beta_key = either("pathloss_beta", "beta_db");
    s.network.pathloss_beta = beta_key == "beta_db" ? db_to_linear(number(beta_key)) : number(beta_key);
    const std::string n0_key = either("noise_density_w_per_hz", "n0_dbm_per_hz");
    s.network.noise_density_w_per_hz =
        n0_key == "n0_dbm_per_hz" ? dbm_per_hz_to_w(number(n0_key)) : number(n0_key);
    try {
        s.network.power_model = parse_power_model(kv.at("power_model").value);
    } catch (const ValidationError& e) {
        throw ParseError(path, kv.at("power_model").line, e.what());
    }
    const long long k = integer("device_count");
    if (k < 1 || k > 1000000) throw ValidationError(path + ": device_count must lie in [1, 1e6]");
    s.network.device_count = static_cast<int>(k);
    s.cell_radius_km = number("cell_radius_km");
    s.task_bits_range = range("task_bits");
    s.cycles_range = range("cycles_per_bit");
    s.idle_power_range = range("idle_power_w");
    s.max_power_w = number("max_power_w");
    const long long seed = integer("seed");
    if (seed < 0) throw ValidationError(path + ": seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    const long long runs = integer("runs");
    if (runs < 1 || runs > 100000000) throw ValidationError(path + ": runs must lie in [1, 1e8]");
    s.runs = static_cast<int>(runs);

    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return s;
}

inline ScenarioSpec load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    return parse_scenario(in, path);
}

// Writes linear-unit keys with 17 significant digits so parsing the output
// reproduces the scenario exactly.
inline std::string format_scenario(const ScenarioSpec& s)
{
    using detail::format_g17;
    std::ostringstream o;
    auto range = [](const Range& r) { return format_g17(r.lo) + ", " + format_g17(r.hi); };
    o << "bandwidth_hz = " << format_g17(s.network.bandwidth_hz) << '\n'
      << "noise_density_w_per_hz = " << format_g17(s.network.noise_density_w_per_hz) << '\n'
      << "pathloss_beta = " << format_g17(s.network.pathloss_beta) << '\n'
      << "pathloss_alpha = " << format_g17(s.network.pathloss_alpha) << '\n'
      << "cpu_cap_hz = " << format_g17(s.network.cpu_cap_hz) << '\n'
      << "cpu_energy_lambda = " << format_g17(s.network.cpu_energy_lambda) << '\n'
      << "power_model = " << to_string(s.network.power_model) << '\n'
      << "device_count = " << s.network.device_count << '\n'
      << "cell_radius_km = " << format_g17(s.cell_radius_km) << '\n'
      << "task_bits = " << range(s.task_bits_range) << '\n'
      << "cycles_per_bit = " << range(s.cycles_range) << '\n'
      << "idle_power_w = " << range(s.idle_power_range) << '\n'
      << "max_power_w = " << format_g17(s.max_power_w) << '\n'
      << "seed = " << s.seed << '\n'
      << "runs = " << s.runs << '\n';
    return o.str();
}

/*
 * Devices of one Monte-Carlo run. Stream run_index of the scenario seed
 * yields, per device: radius u, D, C, P_on (four draws, in that order).
 * Distance r = R sqrt(u) with u in (0, 1] is uniform over the disk area.
 */
inline std::vector<Device> sample_devices(const ScenarioSpec& s, int run_index)
{
    if (run_index < 0 || run_index >= s.runs)
        throw ValidationError("sample_devices: run_index must lie in [0, runs)");
    CounterRng rng(s.seed, static_cast<std::uint64_t>(run_index));
    std::vector<Device> out;
    out.reserve(static_cast<std::size_t>(s.network.device_count));
    for (int k = 0; k < s.network.device_count; ++k) {
        const double r = s.cell_radius_km * std::sqrt(rng.uniform_open0());
        const double bits = rng.uniform(s.task_bits_range.lo, s.task_bits_range.hi);
        const double cycles = rng.uniform(s.cycles_range.lo, s.cycles_range.hi);
        const double idle = rng.uniform(s.idle_power_range.lo, s.idle_power_range.hi);
        out.push_back(Device::make(r, bits, cycles, s.max_power_w, idle, s.network));
    }
    return out;
}

} // namespace fogopt
