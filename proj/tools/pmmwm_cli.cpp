// Command-line front end: instance generation, solving, exact oracle,
// benchmarking and comparison.
//
// Exit codes: 0 ok, 2 usage, 3 parse, 4 infeasible, 5 guard/too large, 6 io.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "pmmwm/bench.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/harness.hpp"
#include "pmmwm/instgen.hpp"
#include "pmmwm/orchestrator.hpp"
#include "pmmwm/report.hpp"

namespace {

using namespace pmmwm;

void add_solver_flags(CLI::App* cmd, FimpParams& p, std::string& algo) {
    cmd->add_option("--algo", algo, "fimp-hga or baseline")
        ->check(CLI::IsMember({"fimp-hga", "baseline"}));
    cmd->add_option("--seed", p.rng_seed, "RNG seed");
    cmd->add_option("--time-limit-ms", p.time_limit_ms, "wall-clock limit per run (<= 0: none)");
    cmd->add_option("--max-iterations", p.max_iterations, "outer iterations");
    cmd->add_option("--tenure", p.tenure, "iterations an edge stays banned");
    cmd->add_option("--recovery-threshold", p.recovery_threshold, "relative gap that arms edge recovery");
    cmd->add_option("--recovery-prob", p.recovery_prob, "probability of releasing all bans once armed");
    cmd->add_option("--pop-size", p.hga.pop_size, "GA population size");
    cmd->add_option("--max-generations", p.hga.max_generations, "GA generation cap");
    cmd->add_option("--stall-limit", p.hga.stall_limit, "GA generations without improvement before stop");
    cmd->add_option("--mutation-rate", p.hga.mutation_rate, "GA mutation probability per child");
    cmd->add_option("--elite-count", p.hga.elite_count, "individuals copied verbatim each generation");
}

int run(int argc, char** argv) {
    CLI::App app{"Partitioning min-max weighted matching solver"};
    app.require_subcommand(1);

    // generate
    InstanceSpec spec;
    std::string model = "independent";
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "generate one instance");
    gen->add_option("--n1", spec.n1)->required();
    gen->add_option("--n2", spec.n2, "defaults to n1");
    gen->add_option("--m", spec.m)->required();
    gen->add_option("--ubar", spec.ubar, "defaults to ceil(1.2*n1/m)");
    gen->add_option("--density", spec.density);
    gen->add_option("--model", model)->check(CLI::IsMember({"consistent", "independent"}));
    gen->add_option("--w-max", spec.w_max);
    gen->add_option("--seed", spec.seed);
    gen->add_option("-o,--out", gen_out, "output file (stdout if omitted)");

    // benchmark-gen
    std::string group;
    std::string out_dir;
    auto* bgen = app.add_subcommand("benchmark-gen", "generate one benchmark group");
    bgen->add_option("--group", group)
        ->required()
        ->check(CLI::IsMember({"consistent-dense", "consistent-sparse", "independent-dense", "independent-sparse"}));
    bgen->add_option("--out-dir", out_dir)->required();

    // solve
    FimpParams params;
    std::string algo = "fimp-hga";
    std::string instance_path;
    std::string json_out;
    std::string stats_out;
    bool no_timing = false;
    auto* sol = app.add_subcommand("solve", "solve an instance");
    sol->add_option("instance", instance_path)->required();
    add_solver_flags(sol, params, algo);
    sol->add_option("--json", json_out, "write the solution JSON here");
    sol->add_option("--stats", stats_out, "write per-iteration statistics JSON here");
    sol->add_flag("--no-timing", no_timing, "write wall_time_ms as 0 so output is reproducible");

    // oracle
    std::string oracle_path;
    std::string oracle_json;
    auto* orc = app.add_subcommand("oracle", "exact optimum of a tiny instance (n1 <= 8)");
    orc->add_option("instance", oracle_path)->required();
    orc->add_option("--json", oracle_json, "write the optimal solution JSON here");

    // bench
    std::string bench_dir;
    std::string bench_out;
    int jobs = 1;
    auto* bench = app.add_subcommand("bench", "run an algorithm over a benchmark directory");
    bench->add_option("dir", bench_dir)->required();
    bench->add_option("-o,--out", bench_out, "report CSV (stdout if omitted)");
    bench->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    add_solver_flags(bench, params, algo);

    // compare
    std::string csv_a, csv_b, cmp_out;
    auto* cmp = app.add_subcommand("compare", "compare two bench CSVs (A vs B)");
    cmp->add_option("a", csv_a)->required();
    cmp->add_option("b", csv_b)->required();
    cmp->add_option("-o,--out", cmp_out, "per-instance CSV");

    // validate
    std::string val_instance, val_solution;
    auto* val = app.add_subcommand("validate", "check a solution file against its instance");
    val->add_option("instance", val_instance)->required();
    val->add_option("solution", val_solution)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        if (gen->count("--n2") == 0) spec.n2 = spec.n1;
        if (gen->count("--ubar") == 0) spec.ubar = benchmark_capacity(spec.n1, spec.m);
        spec.weight_model = parse_weight_model(model);
        const Instance inst = generate(spec);
        if (gen_out.empty()) {
            write_instance(std::cout, inst);
        } else {
            save_instance(gen_out, inst);
        }
        return 0;
    }

    if (bgen->parsed()) {
        const auto rows = generate_benchmark(group, out_dir);
        std::cout << rows.size() << " instances written to " << out_dir << '\n';
        return 0;
    }

    if (sol->parsed()) {
        const Instance inst = load_instance(instance_path);
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult res = run_algorithm(parse_algorithm(algo), inst, params);
        const double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const SolutionMeta meta{params.rng_seed, res.stats.iterations, no_timing ? 0.0 : wall};
        const auto j = solution_to_json(inst.graph, res.best, meta);
        if (!json_out.empty()) write_json(json_out, j);
        if (!stats_out.empty()) {
            RunStats stats = res.stats;
            if (no_timing) {
                stats.wall_ms = stats.match_ms = stats.hga_ms = 0.0;
                for (auto& r : stats.trace) r.match_ms = r.hga_ms = 0.0;
            }
            write_json(stats_out, stats_to_json(stats, inst.graph.scale()));
        }
        std::cout << format_weight(res.best.objective, inst.graph.scale()) << '\n';
        return 0;
    }

    if (orc->parsed()) {
        const Instance inst = load_instance(oracle_path);
        const OracleResult opt = exact_oracle(inst.graph, inst.m, inst.ubar);
        if (!oracle_json.empty()) {
            write_json(oracle_json, solution_to_json(inst.graph, opt.solution, SolutionMeta{}));
        }
        std::cout << format_weight(opt.objective, inst.graph.scale()) << '\n';
        return 0;
    }

    if (bench->parsed()) {
        const auto reports = run_bench(bench_dir, parse_algorithm(algo), params, jobs);
        if (bench_out.empty()) {
            std::cout << kReportHeader << '\n';
            for (const auto& r : reports) std::cout << report_line(r) << '\n';
        } else {
            write_reports(bench_out, reports);
        }
        return 0;
    }

    if (cmp->parsed()) {
        const auto summary = compare_reports(read_reports(csv_a), read_reports(csv_b));
        if (!cmp_out.empty()) write_compare(cmp_out, summary);
        const double n = summary.rows.empty() ? 1.0 : static_cast<double>(summary.rows.size());
        std::printf("%-40s %14s %14s %8s %10s\n", "instance", "objective_a", "objective_b", "outcome", "time_a/b");
        for (const auto& r : summary.rows) {
            std::printf("%-40s %14.6g %14.6g %8s %10.3f\n", r.instance.c_str(), r.objective_a, r.objective_b,
                        to_string(r.outcome), r.time_ratio);
        }
        std::printf("instances %zu  win %.1f%%  tie %.1f%%  loss %.1f%%  mean time ratio %.3f\n",
                    summary.rows.size(), 100.0 * summary.wins / n, 100.0 * summary.ties / n,
                    100.0 * summary.losses / n, summary.mean_time_ratio);
        return 0;
    }

    if (val->parsed()) {
        const Instance inst = load_instance(val_instance);
        Solution s = solution_from_json(read_json(val_solution), inst);
        const Weight claimed = s.objective;
        if (auto v = validate_solution(inst.graph, s)) {
            std::cout << "violation: constraint " << v->constraint << ": " << v->message << '\n';
            return 4;
        }
        if (evaluate_objective(inst.graph, s) != claimed) {
            std::cout << "violation: objective " << format_weight(claimed, inst.graph.scale())
                      << " does not match recomputed " << format_weight(s.objective, inst.graph.scale()) << '\n';
            return 4;
        }
        std::cout << "ok " << format_weight(s.objective, inst.graph.scale()) << '\n';
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const pmmwm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
