#pragma once

// Verification and comparison tooling: an exhaustive oracle for tiny
// instances and a simplified local-search baseline.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/hga.hpp"
#include "pmmwm/matcher.hpp"
#include "pmmwm/numpart.hpp"
#include "pmmwm/orchestrator.hpp"

namespace pmmwm {

inline constexpr int kOracleMaxN1 = 8;

struct OracleResult {
    Weight objective = 0;
    Solution solution;
};

// Global optimum by enumerating every perfect matching on U and solving the
// induced partition problem exactly (memoised on the sorted weight multiset).
inline OracleResult exact_oracle(const BipartiteGraph& g, int m, int ubar) {
    const int n1 = g.n1();
    if (n1 > kOracleMaxN1) throw TooLarge("exact oracle limited to n1 <= 8");
    long long space = 1;
    for (int i = 0; i < n1; ++i) {
        space *= m;
        if (space > kBruteLimit) throw TooLarge("exact oracle requires m^n1 <= 1e7");
    }
    if (m < 1 || static_cast<long long>(m) * ubar < n1) throw InfeasibleInstance("m*ubar < n1");

    std::map<std::vector<Weight>, Weight> memo;
    std::vector<int> mate(static_cast<std::size_t>(n1), kFree);
    std::vector<char> used(static_cast<std::size_t>(g.n2()), 0);
    std::optional<OracleResult> best;

    auto evaluate = [&]() {
        std::vector<Weight> w(static_cast<std::size_t>(n1));
        for (int u = 0; u < n1; ++u) w[u] = g.weight(u, mate[u]);
        std::vector<Weight> key = w;
        std::sort(key.begin(), key.end());
        auto it = memo.find(key);
        Weight value;
        if (it == memo.end()) {
            const auto items = make_items(key);
            value = min_max_brute(items, m, ubar).objective;
            memo.emplace(std::move(key), value);
        } else {
            value = it->second;
        }
        if (best && value >= best->objective) return;
        const auto items = make_items(w);
        const BruteResult br = min_max_brute(items, m, ubar);
        best = OracleResult{br.objective, Solution{mate, br.assignment, br.objective}};
    };

    auto rec = [&](auto&& self, int u, Weight sum, Weight heaviest) -> void {
        if (best && (heaviest >= best->objective || sum > best->objective * m)) return;
        if (u == n1) {
            evaluate();
            return;
        }
        for (int v = 0; v < g.n2(); ++v) {
            if (used[v] || !g.available(u, v)) continue;
            used[v] = 1;
            mate[u] = v;
            const Weight w = g.weight(u, v);
            self(self, u + 1, sum + w, std::max(heaviest, w));
            used[v] = 0;
        }
        mate[u] = kFree;
    };
    rec(rec, 0, 0, 0);
    if (!best) throw InfeasibleInstance("no perfect matching on U");
    return *best;
}

// Relocation-only descent on the heaviest partition.
inline Individual relocation_descent(const Individual& ind, std::span<const WeightedItem> items, int ubar) {
    detail::PartitionWork work(items, ind.assignment);
    while (true) {
        const int heavy = work.heaviest();
        std::vector<int> heavy_members;
        for (const auto& it : items) {
            if (work.part_of[it.u] == heavy) heavy_members.push_back(it.u);
        }
        if (!detail::mls_relocate(items, work, heavy, heavy_members, ubar)) break;
    }
    return make_individual(items, PartitionAssignment{ind.assignment.m, ubar, std::move(work.part_of)});
}

// Comparison anchor: the same outer loop, but a full re-solve of the matching
// every iteration, LPT plus relocation descent for partitioning, and no edge
// recovery.
inline SolveResult baseline_ls(const BipartiteGraph& g, int m, int ubar, const FimpParams& params,
                               const SolveOptions& options = {}) {
    detail::LoopConfig cfg;
    cfg.rematch = detail::Rematch{false};
    cfg.allow_recovery = false;
    cfg.warm_start = false;
    cfg.partition = [](std::span<const WeightedItem> items, int m_, int ubar_, const PartitionAssignment*,
                       std::optional<detail::Clock::time_point>, Rng&) {
        return relocation_descent(make_individual(items, greedy_lpt(items, m_, ubar_)), items, ubar_);
    };
    return detail::run_loop(g, m, ubar, params, cfg, options.observer);
}

} // namespace pmmwm
