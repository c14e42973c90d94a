#pragma once

// JSON serialization of solutions and run statistics.

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/orchestrator.hpp"

namespace pmmwm {

// A weight in file units: an integer when the instance is integral.
inline nlohmann::json weight_to_json(Weight w, std::int64_t scale) {
    if (scale == 1) return w;
    return static_cast<double>(w) / static_cast<double>(scale);
}

inline Weight weight_from_json(const nlohmann::json& j, std::int64_t scale) {
    if (j.is_number_integer()) return j.get<Weight>() * scale;
    if (j.is_number()) return static_cast<Weight>(std::llround(j.get<double>() * static_cast<double>(scale)));
    throw ParseError("expected a numeric weight");
}

struct SolutionMeta {
    std::uint64_t seed = 0;
    int iterations = 0;
    double wall_time_ms = 0.0;
};

inline nlohmann::json solution_to_json(const BipartiteGraph& g, const Solution& sol, const SolutionMeta& meta) {
    nlohmann::json j;
    j["objective"] = weight_to_json(sol.objective, g.scale());
    j["mate"] = sol.mate;
    j["part_of"] = sol.partition.part_of;
    nlohmann::json pw = nlohmann::json::array();
    for (Weight w : partition_weights(g, sol)) pw.push_back(weight_to_json(w, g.scale()));
    j["partition_weights"] = pw;
    j["seed"] = meta.seed;
    j["iterations"] = meta.iterations;
    j["wall_time_ms"] = meta.wall_time_ms;
    return j;
}

// Rebuilds a Solution against its instance; m and ubar come from the instance.
inline Solution solution_from_json(const nlohmann::json& j, const Instance& inst) {
    try {
        Solution sol;
        sol.mate = j.at("mate").get<std::vector<int>>();
        sol.partition = PartitionAssignment{inst.m, inst.ubar, j.at("part_of").get<std::vector<int>>()};
        sol.objective = weight_from_json(j.at("objective"), inst.graph.scale());
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed solution JSON: ") + e.what());
    }
}

inline nlohmann::json stats_to_json(const RunStats& stats, std::int64_t scale) {
    nlohmann::json j;
    j["iterations"] = stats.iterations;
    j["wall_time_ms"] = stats.wall_ms;
    j["match_time_ms"] = stats.match_ms;
    j["hga_time_ms"] = stats.hga_ms;
    j["recoveries"] = stats.recoveries;
    j["vetoes"] = stats.vetoes;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& r : stats.trace) {
        trace.push_back({{"iteration", r.iteration},
                         {"objective", weight_to_json(r.objective, scale)},
                         {"incumbent", weight_to_json(r.incumbent, scale)},
                         {"bans_active", r.bans_active},
                         {"recovered", r.recovered},
                         {"match_time_ms", r.match_ms},
                         {"hga_time_ms", r.hga_ms}});
    }
    j["trace"] = trace;
    return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
}

} // namespace pmmwm
