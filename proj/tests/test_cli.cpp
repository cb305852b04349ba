#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fogopt/scenario.hpp"

using namespace fogopt;
namespace fs = std::filesystem;

namespace {

struct Invocation
{
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test
{
protected:
    fs::path dir;

    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("fogsim_cli_" + std::to_string(::getpid()) + "_" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Invocation fogsim(const std::string& args) const
    {
        const fs::path out = dir / "stdout", err = dir / "stderr";
        const std::string cmd = std::string("'") + FOGSIM_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                                err.string() + "'";
        const int status = std::system(cmd.c_str());
        Invocation r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    static std::string scenario(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name)
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
}

} // namespace

TEST_F(Cli, VerifyPassesOnTinyScenario)
{
    const Invocation r = fogsim("verify --scenario " + scenario("verify_tiny.scn"));
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find(" NO"), std::string::npos);
}

TEST_F(Cli, VerifyCatchesLooseSolver)
{
    const Invocation r = fogsim("verify --scenario " + scenario("verify_tiny.scn") + " --solver-tol 0.5");
    EXPECT_EQ(r.code, 4) << r.err;
}

TEST_F(Cli, ParetoSingleDeviceTradesLatencyForEnergy)
{
    const Invocation r = fogsim("pareto --scenario " + scenario("default.scn") + " --runs 1 --devices 1 --eta-grid 5");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 6u);
    const std::size_t t = column(rows[0], "T_s"), e = column(rows[0], "E_J");
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LE(std::stod(rows[i][t]), std::stod(rows[i - 1][t]) * (1 + 1e-6));
        EXPECT_GE(std::stod(rows[i][e]), std::stod(rows[i - 1][e]) * (1 - 1e-6));
    }
}

TEST_F(Cli, PowerModelChangesEnergy)
{
    const std::string base = "pareto --scenario " + scenario("default.scn") + " --runs 2 --eta-grid 3";
    const Invocation a = fogsim(base + " --model practical"), b = fogsim(base + " --model unrealistic");
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    const auto ra = csv_rows(a.out), rb = csv_rows(b.out);
    const std::size_t e = column(ra[0], "E_J");
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 1; i < ra.size(); ++i) EXPECT_NE(ra[i][e], rb[i][e]);
}

TEST_F(Cli, OutputIsReproducible)
{
    const std::string args = "equilibrium --scenario " + scenario("verify_tiny.scn") + " --eta 0.2,0.8";
    const fs::path p1 = dir / "a.csv", p2 = dir / "b.csv";
    ASSERT_EQ(fogsim(args + " --threads 2 --out " + p1.string()).code, 0);
    ASSERT_EQ(fogsim(args + " --threads 1 --out " + p2.string()).code, 0);
    const std::string a = slurp(p1);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(p2));
    EXPECT_FALSE(fs::exists(p1.string() + ".tmp"));
}

TEST_F(Cli, StderrEchoesEffectiveScenario)
{
    const Invocation r = fogsim("baseline --scenario " + scenario("default.scn") + " --runs 3 --seed 42 --lambda 1e-27");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.err);
    const ScenarioSpec s = parse_scenario(in, "stderr");
    EXPECT_EQ(s.runs, 3);
    EXPECT_EQ(s.seed, 42u);
    EXPECT_EQ(s.network.cpu_energy_lambda, 1e-27);
    std::ifstream f(scenario("default.scn"));
    ScenarioSpec expected = parse_scenario(f, "default.scn");
    expected.runs = 3;
    expected.seed = 42;
    expected.network.cpu_energy_lambda = 1e-27;
    EXPECT_EQ(s, expected);
}

TEST_F(Cli, InvalidInputExitsWithTwo)
{
    EXPECT_EQ(fogsim("pareto --scenario " + (dir / "missing.scn").string()).code, 2);
    const fs::path bad = dir / "bad.scn";
    std::ofstream(bad) << "device_count = 3\ndevice_count = 4\n";
    const Invocation r = fogsim("pareto --scenario " + bad.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.scn:2:"), std::string::npos) << r.err;
    EXPECT_EQ(fogsim("pareto --eta 1.5").code, 2);
    EXPECT_EQ(fogsim("pareto --model magic").code, 2);
    EXPECT_EQ(fogsim("frobnicate").code, 2);
    EXPECT_EQ(fogsim("baseline --out " + (dir / "no_such_dir" / "x.csv").string()).code, 2);
}

TEST_F(Cli, SweepBaselineIgnoresEta)
{
    const Invocation r = fogsim("sweep-fmax --scenario " + scenario("verify_tiny.scn") +
                         " --fmax-list 0.6e9,1.2e9 --eta 0.1,0.9");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    const std::size_t fm = column(rows[0], "fmax_hz"), be = column(rows[0], "baseline_E_J"),
                      bt = column(rows[0], "baseline_T_s");
    std::map<std::string, std::pair<std::string, std::string>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto [it, fresh] = seen.emplace(rows[i][fm], std::make_pair(rows[i][be], rows[i][bt]));
        if (!fresh) {
            EXPECT_EQ(it->second.first, rows[i][be]);
            EXPECT_EQ(it->second.second, rows[i][bt]);
        }
    }
    EXPECT_EQ(seen.size(), 2u);
}
