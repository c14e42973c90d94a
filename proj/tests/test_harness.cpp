#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "pmmwm/bench.hpp"
#include "pmmwm/harness.hpp"
#include "pmmwm/report.hpp"

using namespace pmmwm;
using pmmwm::testing::data_path;
using pmmwm::testing::exact_partition_first;
using pmmwm::testing::Example6;
using pmmwm::testing::random_complete;
using pmmwm::testing::TempDir;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PMMWM_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FimpParams quick_params(std::uint64_t seed = 1) {
    FimpParams p;
    p.rng_seed = seed;
    p.max_iterations = 30;
    p.time_limit_ms = 0;
    p.hga.max_generations = 30;
    p.hga.stall_limit = 5;
    return p;
}

BipartiteGraph random_sparse(int n1, int n2, double density, std::mt19937_64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n2));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> coin(0, 1);
    std::uniform_int_distribution<Weight> w(0, 25);
    BipartiteGraph g(n1, n2);
    for (int u = 0; u < n1; ++u)
        for (int v = 0; v < n2; ++v)
            if (perm[u] == v || coin(rng) < density) g.set_weight(u, v, w(rng));
    return g;
}

// A small benchmark directory: four tiny instances plus manifest.
void write_small_bench(const TempDir& dir) {
    std::ofstream manifest(dir / "manifest.csv");
    manifest << kManifestHeader << '\n';
    for (int i = 0; i < 4; ++i) {
        InstanceSpec s;
        s.n1 = s.n2 = (i < 2 ? 6 : 12);
        s.m = 2 + i % 2;
        s.ubar = benchmark_capacity(s.n1, s.m);
        s.weight_model = i % 2 ? WeightModel::Consistent : WeightModel::Independent;
        s.seed = 40 + static_cast<std::uint64_t>(i);
        const std::string file = "tiny_" + std::to_string(i) + ".txt";
        save_instance(dir / file, generate(s));
        manifest << manifest_line({file, s}) << '\n';
    }
}

} // namespace

TEST(ExactOracle, AgreesWithPartitionFirstEnumeration) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int n1 = 1 + static_cast<int>(rng() % 5);
        const int n2 = n1 + static_cast<int>(rng() % 2);
        const int m = 1 + static_cast<int>(rng() % 3);
        const int ubar = (n1 + m - 1) / m + static_cast<int>(rng() % 2);
        const auto g = random_sparse(n1, n2, 0.6, rng);
        const OracleResult r = exact_oracle(g, m, ubar);
        ASSERT_EQ(r.objective, exact_partition_first(g, m, ubar)) << "trial " << trial;
        Solution s = r.solution;
        ASSERT_FALSE(validate_solution(g, s).has_value());
        EXPECT_EQ(evaluate_objective(g, s), r.objective);
    }
}

TEST(ExactOracle, Example6IsFour) {
    Example6 f;
    const auto r = exact_oracle(f.inst.graph, f.inst.m, f.inst.ubar);
    EXPECT_EQ(r.objective, 4);
    EXPECT_EQ(exact_partition_first(f.inst.graph, f.inst.m, f.inst.ubar), 4);
}

// Matchings are the diagonal (weights 1,1) or the anti-diagonal (2,2); with
// one edge per partition the objective is the larger single weight.
TEST(ExactOracle, TwoByTwoIsOne) {
    BipartiteGraph g(2, 2);
    g.set_weight(0, 0, 1);
    g.set_weight(0, 1, 2);
    g.set_weight(1, 0, 2);
    g.set_weight(1, 1, 1);
    EXPECT_EQ(exact_oracle(g, 2, 1).objective, 1);
    EXPECT_EQ(exact_partition_first(g, 2, 1), 1);
}

TEST(ExactOracle, SinglePartitionIsMinimumMatching) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = random_complete(6, 7, 40, seed);
        EXPECT_EQ(exact_oracle(g, 1, 6).objective, solve_full(g).total_weight);
    }
}

TEST(ExactOracle, Guards) {
    EXPECT_THROW(exact_oracle(random_complete(9, 9, 5, 1), 2, 5), TooLarge);
    EXPECT_THROW(exact_oracle(random_complete(4, 4, 5, 1), 1, 3), InfeasibleInstance);
    BipartiteGraph g(2, 2);
    g.set_weight(0, 0, 1);
    g.set_weight(1, 0, 1);
    EXPECT_THROW(exact_oracle(g, 2, 1), InfeasibleInstance);
}

TEST(RelocationDescent, NoImprovingRelocationRemains) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Weight> w(10);
        for (auto& x : w) x = static_cast<Weight>(rng() % 40);
        const auto items = make_items(w);
        const auto start = make_individual(items, greedy_lpt(items, 3, 4));
        const auto out = relocation_descent(start, items, 4);
        EXPECT_FALSE(better(start, out) && start.fitness != out.fitness);
        std::vector<int> count(3, 0);
        for (int k : out.assignment.part_of) ++count[k];
        std::vector<Weight> sums = partition_sums(items, out.assignment);
        const int heavy = static_cast<int>(std::max_element(sums.begin(), sums.end()) - sums.begin());
        for (const auto& it : items) {
            if (out.assignment.part_of[it.u] != heavy) continue;
            for (int k = 0; k < 3; ++k) {
                if (k == heavy || count[k] >= 4) continue;
                auto p = out.assignment;
                p.part_of[it.u] = k;
                EXPECT_FALSE(fitness_of(items, p) < out.fitness);
            }
        }
    }
}

TEST(BaselineLs, SinglePartitionMatchesFimp) {
    const auto g = random_complete(8, 8, 60, 17);
    EXPECT_EQ(baseline_ls(g, 1, 8, quick_params()).best.objective,
              solve(g, 1, 8, quick_params()).best.objective);
    EXPECT_EQ(baseline_ls(g, 1, 8, quick_params()).best.objective, solve_full(g).total_weight);
}

TEST(BaselineLs, NeverBelowOracleAndValid) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = random_complete(6, 6, 30, 900 + seed);
        const auto r = baseline_ls(g, 2, 3, quick_params(seed));
        ASSERT_FALSE(validate_solution(g, r.best).has_value());
        EXPECT_GE(r.best.objective, exact_oracle(g, 2, 3).objective);
        EXPECT_EQ(r.stats.recoveries, 0);
    }
}

TEST(BaselineLs, Deterministic) {
    const auto g = random_complete(12, 12, 60, 5);
    const auto a = baseline_ls(g, 3, 5, quick_params(4));
    const auto b = baseline_ls(g, 3, 5, quick_params(4));
    EXPECT_EQ(a.best.mate, b.best.mate);
    EXPECT_EQ(a.best.partition, b.best.partition);
}

TEST(Report, SolutionJsonRoundTrip) {
    const Instance inst = load_instance(data_path("decimal.txt"));
    const auto r = solve(inst.graph, inst.m, inst.ubar, quick_params());
    const auto j = solution_to_json(inst.graph, r.best, SolutionMeta{7, r.stats.iterations, 1.5});
    EXPECT_EQ(j.at("seed"), 7);
    Solution back = solution_from_json(j, inst);
    EXPECT_EQ(back.mate, r.best.mate);
    EXPECT_EQ(back.partition, r.best.partition);
    EXPECT_EQ(back.objective, r.best.objective);
    EXPECT_FALSE(validate_solution(inst.graph, back).has_value());
    EXPECT_THROW(solution_from_json(nlohmann::json::object(), inst), ParseError);
}

TEST(Bench, RunsManifestAndIsJobCountInvariant) {
    TempDir dir("bench_run");
    write_small_bench(dir);
    const auto one = run_bench(dir.path, Algorithm::FimpHga, quick_params(), 1);
    const auto two = run_bench(dir.path, Algorithm::FimpHga, quick_params(), 2);
    ASSERT_EQ(one.size(), 4u);
    ASSERT_EQ(two.size(), 4u);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].instance, two[i].instance);
        EXPECT_EQ(one[i].objective, two[i].objective);
        EXPECT_EQ(one[i].optimum.has_value(), one[i].instance < "tiny_2");
        if (one[i].optimum) {
            EXPECT_GE(one[i].objective, *one[i].optimum);
        }
    }
    EXPECT_TRUE(std::is_sorted(one.begin(), one.end(),
                               [](const RunReport& a, const RunReport& b) { return a.instance < b.instance; }));

    // Objectives reproduce when re-solving with the recorded seed.
    for (const auto& r : one) {
        const Instance inst = load_instance(dir / r.instance);
        auto p = quick_params(r.seed);
        EXPECT_EQ(static_cast<double>(solve(inst.graph, inst.m, inst.ubar, p).best.objective), r.objective);
    }

    write_reports(dir / "a.csv", one);
    const auto back = read_reports(dir / "a.csv");
    ASSERT_EQ(back.size(), one.size());
    EXPECT_EQ(back[0].objective, one[0].objective);
    EXPECT_EQ(back[0].optimum, one[0].optimum);
}

TEST(Compare, SelfComparisonIsAllTies) {
    std::vector<RunReport> rows(3);
    for (int i = 0; i < 3; ++i) {
        rows[i].instance = "i" + std::to_string(i);
        rows[i].objective = 10 + i;
        rows[i].wall_time_ms = 5.0 + i;
    }
    const auto s = compare_reports(rows, rows);
    EXPECT_EQ(s.ties, 3);
    EXPECT_EQ(s.wins + s.losses, 0);
    EXPECT_DOUBLE_EQ(s.mean_time_ratio, 1.0);
}

TEST(Compare, WinsAndLosses) {
    std::vector<RunReport> a(2), b(2);
    a[0] = {"x", "fimp-hga", 1, 5, {}, {}, 1, 10.0, 0, 0};
    b[0] = {"x", "baseline", 1, 7, {}, {}, 1, 20.0, 0, 0};
    a[1] = {"y", "fimp-hga", 1, 9, {}, {}, 1, 30.0, 0, 0};
    b[1] = {"y", "baseline", 1, 8, {}, {}, 1, 10.0, 0, 0};
    const auto s = compare_reports(a, b);
    EXPECT_EQ(s.wins, 1);
    EXPECT_EQ(s.losses, 1);
    EXPECT_DOUBLE_EQ(s.rows[0].time_ratio, 0.5);
    EXPECT_DOUBLE_EQ(s.rows[1].time_ratio, 3.0);
}

TEST(Cli, SolveIsByteIdenticalAcrossRuns) {
    TempDir dir("cli_solve");
    const std::string base = "solve " + data_path("example6.txt") + " --seed 11 --max-iterations 20 --no-timing";
    const auto r1 = run_cli(base + " --json " + (dir / "a.json") + " --stats " + (dir / "a_stats.json"));
    const auto r2 = run_cli(base + " --json " + (dir / "b.json") + " --stats " + (dir / "b_stats.json"));
    ASSERT_EQ(r1.code, 0);
    ASSERT_EQ(r2.code, 0);
    EXPECT_EQ(r1.out, "4\n");
    EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
    EXPECT_EQ(slurp(dir / "a_stats.json"), slurp(dir / "b_stats.json"));
    EXPECT_FALSE(slurp(dir / "a.json").empty());

    const auto v = run_cli("validate " + data_path("example6.txt") + " " + (dir / "a.json"));
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, "ok 4\n");
}

TEST(Cli, OraclePrintsExample6Optimum) {
    TempDir dir("cli_oracle");
    const auto r = run_cli("oracle " + data_path("example6.txt") + " --json " + (dir / "opt.json"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "4\n");
    EXPECT_EQ(run_cli("validate " + data_path("example6.txt") + " " + (dir / "opt.json")).code, 0);
}

TEST(Cli, ValidateFlagsTamperedSolution) {
    TempDir dir("cli_validate");
    ASSERT_EQ(run_cli("oracle " + data_path("example6.txt") + " --json " + (dir / "opt.json")).code, 0);
    auto j = read_json(dir / "opt.json");
    j["objective"] = 3;
    write_json(dir / "bad_obj.json", j);
    EXPECT_EQ(run_cli("validate " + data_path("example6.txt") + " " + (dir / "bad_obj.json")).code, 4);
    j = read_json(dir / "opt.json");
    j["mate"][0] = j["mate"][1];
    write_json(dir / "bad_mate.json", j);
    const auto r = run_cli("validate " + data_path("example6.txt") + " " + (dir / "bad_mate.json"));
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.out.find("constraint"), std::string::npos);
}

TEST(Cli, GenerateBenchAndCompare) {
    TempDir dir("cli_bench");
    ASSERT_EQ(run_cli("generate --n1 6 --m 2 --seed 3 -o " + (dir / "g.txt")).code, 0);
    const Instance inst = load_instance(dir / "g.txt");
    EXPECT_EQ(inst.graph.n1(), 6);
    EXPECT_EQ(inst.ubar, benchmark_capacity(6, 2));
    EXPECT_EQ(run_cli("generate --n1 6 --m 2 --seed 3").out, slurp(dir / "g.txt"));

    write_small_bench(dir);
    const std::string flags = " --max-iterations 10 --max-generations 10 --stall-limit 3";
    ASSERT_EQ(run_cli("bench " + dir.path.string() + " -o " + (dir / "a.csv") + flags).code, 0);
    ASSERT_EQ(run_cli("bench " + dir.path.string() + " --algo baseline -o " + (dir / "b.csv") + flags).code, 0);
    EXPECT_EQ(read_reports(dir / "a.csv").size(), 4u);

    const auto self = run_cli("compare " + (dir / "a.csv") + " " + (dir / "a.csv") + " -o " + (dir / "cmp.csv"));
    EXPECT_EQ(self.code, 0);
    EXPECT_NE(self.out.find("tie 100.0%"), std::string::npos) << self.out;
    EXPECT_NE(self.out.find("mean time ratio 1.000"), std::string::npos) << self.out;
    const std::string cmp = slurp(dir / "cmp.csv");
    EXPECT_EQ(cmp.rfind(kCompareHeader, 0), 0u);

    const auto ab = run_cli("compare " + (dir / "a.csv") + " " + (dir / "b.csv"));
    EXPECT_EQ(ab.code, 0);
    EXPECT_NE(ab.out.find("instances 4"), std::string::npos);
}

TEST(Cli, BenchmarkGenWritesSixtyFiles) {
    TempDir dir("cli_bgen");
    const auto r = run_cli("benchmark-gen --group independent-sparse --out-dir " + dir.path.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(read_manifest_files(dir.path).size(), 60u);
}

TEST(Cli, ExitCodes) {
    TempDir dir("cli_codes");
    EXPECT_EQ(run_cli("").code, 2);
    EXPECT_EQ(run_cli("solve").code, 2);
    EXPECT_EQ(run_cli("solve " + data_path("example6.txt") + " --algo nope").code, 2);
    EXPECT_EQ(run_cli("solve " + data_path("example6.txt") + " --tenure 0").code, 2);
    EXPECT_EQ(run_cli("generate --n1 5 --m 1 --ubar 2").code, 2);
    EXPECT_EQ(run_cli("solve " + (dir / "missing.txt")).code, 6);

    std::ofstream(dir / "bad.txt") << "2 2 1\n";
    EXPECT_EQ(run_cli("solve " + (dir / "bad.txt")).code, 3);
    EXPECT_EQ(run_cli("solve " + data_path("capacity_short.txt")).code, 4);

    InstanceSpec s;
    s.n1 = s.n2 = 9;
    s.m = 3;
    s.ubar = 3;
    save_instance(dir / "nine.txt", generate(s));
    EXPECT_EQ(run_cli("oracle " + (dir / "nine.txt")).code, 5);
    EXPECT_EQ(run_cli("oracle " + data_path("two_by_two.txt")).code, 0);
}
