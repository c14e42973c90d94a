#pragma once

// Batch benchmarking over a manifest directory and head-to-head comparison of
// two benchmark CSVs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/harness.hpp"
#include "pmmwm/instgen.hpp"
#include "pmmwm/orchestrator.hpp"

namespace pmmwm {

enum class Algorithm { FimpHga, Baseline };

inline std::string to_string(Algorithm a) { return a == Algorithm::FimpHga ? "fimp-hga" : "baseline"; }

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "fimp-hga") return Algorithm::FimpHga;
    if (s == "baseline") return Algorithm::Baseline;
    throw SpecInvalid("unknown algorithm '" + s + "' (expected fimp-hga or baseline)");
}

inline SolveResult run_algorithm(Algorithm algo, const Instance& inst, const FimpParams& params) {
    return algo == Algorithm::FimpHga ? solve(inst.graph, inst.m, inst.ubar, params)
                                      : baseline_ls(inst.graph, inst.m, inst.ubar, params);
}

struct RunReport {
    std::string instance;
    std::string algo;
    std::uint64_t seed = 0;
    double objective = 0.0;
    std::optional<double> optimum;
    std::optional<double> gap;
    int iterations = 0;
    double wall_time_ms = 0.0;
    double match_time_ms = 0.0;
    double hga_time_ms = 0.0;
};

inline const char* kReportHeader =
    "instance,algo,seed,objective,optimum,gap,iterations,wall_time_ms,match_time_ms,hga_time_ms";

namespace detail {

inline std::string fmt_number(double x) {
    std::ostringstream os;
    os << std::setprecision(15) << x;
    return os.str();
}

inline std::string fmt_ms(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << x;
    return os.str();
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + " value '" + s + "'");
    }
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw ParseError("'" + path + "' has unexpected header '" + line + "'");
    const std::size_t columns = split_csv(header).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != columns) throw ParseError("'" + path + "': wrong column count in '" + line + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace detail

inline std::string report_line(const RunReport& r) {
    std::ostringstream os;
    os << r.instance << ',' << r.algo << ',' << r.seed << ',' << detail::fmt_number(r.objective) << ','
       << (r.optimum ? detail::fmt_number(*r.optimum) : "") << ','
       << (r.gap ? detail::fmt_number(*r.gap) : "") << ',' << r.iterations << ','
       << detail::fmt_ms(r.wall_time_ms) << ',' << detail::fmt_ms(r.match_time_ms) << ','
       << detail::fmt_ms(r.hga_time_ms);
    return os.str();
}

inline void write_reports(const std::string& path, const std::vector<RunReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kReportHeader << '\n';
    for (const auto& r : reports) out << report_line(r) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::vector<RunReport> read_reports(const std::string& path) {
    std::vector<RunReport> out;
    for (const auto& c : detail::read_csv(path, kReportHeader)) {
        RunReport r;
        r.instance = c[0];
        r.algo = c[1];
        r.seed = static_cast<std::uint64_t>(detail::to_double(c[2], "seed"));
        r.objective = detail::to_double(c[3], "objective");
        if (!c[4].empty()) r.optimum = detail::to_double(c[4], "optimum");
        if (!c[5].empty()) r.gap = detail::to_double(c[5], "gap");
        r.iterations = static_cast<int>(detail::to_double(c[6], "iterations"));
        r.wall_time_ms = detail::to_double(c[7], "wall_time_ms");
        r.match_time_ms = detail::to_double(c[8], "match_time_ms");
        r.hga_time_ms = detail::to_double(c[9], "hga_time_ms");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<std::string> read_manifest_files(const std::filesystem::path& dir) {
    std::vector<std::string> files;
    for (const auto& c : detail::read_csv((dir / "manifest.csv").string(), kManifestHeader)) {
        files.push_back(c[0]);
    }
    return files;
}

// Runs one algorithm on every manifest instance. Reports come back sorted by
// instance name regardless of `jobs`.
inline std::vector<RunReport> run_bench(const std::filesystem::path& dir, Algorithm algo,
                                        const FimpParams& params, int jobs = 1) {
    const auto files = read_manifest_files(dir);
    std::vector<RunReport> reports(files.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            try {
                const Instance inst = load_instance((dir / files[i]).string());
                const auto t0 = std::chrono::steady_clock::now();
                const SolveResult res = run_algorithm(algo, inst, params);
                const double wall =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                const double scale = static_cast<double>(inst.graph.scale());
                RunReport r;
                r.instance = files[i];
                r.algo = to_string(algo);
                r.seed = params.rng_seed;
                r.objective = static_cast<double>(res.best.objective) / scale;
                if (inst.graph.n1() <= kOracleMaxN1) {
                    try {
                        const auto opt = exact_oracle(inst.graph, inst.m, inst.ubar);
                        r.optimum = static_cast<double>(opt.objective) / scale;
                        r.gap = opt.objective > 0 ? (r.objective - *r.optimum) / *r.optimum : 0.0;
                    } catch (const TooLarge&) {
                    }
                }
                r.iterations = res.stats.iterations;
                r.wall_time_ms = wall;
                r.match_time_ms = res.stats.match_ms;
                r.hga_time_ms = res.stats.hga_ms;
                reports[i] = std::move(r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::sort(reports.begin(), reports.end(),
              [](const RunReport& a, const RunReport& b) { return a.instance < b.instance; });
    return reports;
}

enum class Outcome { Win, Tie, Loss };

inline const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::Win: return "win";
    case Outcome::Tie: return "tie";
    default: return "loss";
    }
}

struct CompareRow {
    std::string instance;
    double objective_a = 0.0;
    double objective_b = 0.0;
    Outcome outcome = Outcome::Tie;  // from A's point of view; lower objective wins
    double time_ratio = 1.0;         // wall_time A / wall_time B
};

struct CompareSummary {
    std::vector<CompareRow> rows;
    int wins = 0;
    int ties = 0;
    int losses = 0;
    double mean_time_ratio = 1.0;
};

inline const char* kCompareHeader = "instance,objective_a,objective_b,outcome,time_ratio";

// Pairs rows by instance name; instances present in only one file are skipped.
inline CompareSummary compare_reports(const std::vector<RunReport>& a, const std::vector<RunReport>& b) {
    std::map<std::string, const RunReport*> by_name;
    for (const auto& r : b) by_name[r.instance] = &r;
    CompareSummary s;
    double ratio_sum = 0.0;
    for (const auto& ra : a) {
        auto it = by_name.find(ra.instance);
        if (it == by_name.end()) continue;
        const RunReport& rb = *it->second;
        CompareRow row;
        row.instance = ra.instance;
        row.objective_a = ra.objective;
        row.objective_b = rb.objective;
        row.outcome = ra.objective < rb.objective   ? Outcome::Win
                      : ra.objective > rb.objective ? Outcome::Loss
                                                    : Outcome::Tie;
        if (rb.wall_time_ms > 0.0) {
            row.time_ratio = ra.wall_time_ms / rb.wall_time_ms;
        } else {
            row.time_ratio = ra.wall_time_ms > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
        }
        switch (row.outcome) {
        case Outcome::Win: ++s.wins; break;
        case Outcome::Tie: ++s.ties; break;
        case Outcome::Loss: ++s.losses; break;
        }
        ratio_sum += row.time_ratio;
        s.rows.push_back(row);
    }
    if (!s.rows.empty()) s.mean_time_ratio = ratio_sum / static_cast<double>(s.rows.size());
    return s;
}

inline void write_compare(const std::string& path, const CompareSummary& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kCompareHeader << '\n';
    for (const auto& r : s.rows) {
        out << r.instance << ',' << detail::fmt_number(r.objective_a) << ','
            << detail::fmt_number(r.objective_b) << ',' << to_string(r.outcome) << ','
            << detail::fmt_number(r.time_ratio) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace pmmwm
