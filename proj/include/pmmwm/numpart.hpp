#pragma once

// Capacity-bounded min-max number partitioning: constructive heuristics used
// to seed the genetic algorithm, plus an exhaustive reference solver.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"

namespace pmmwm {

// One U-vertex and its matched edge weight. Item ids u must be 0..n-1.
struct WeightedItem {
    int u = 0;
    Weight w = 0;
};

inline std::vector<WeightedItem> make_items(std::span<const Weight> weights) {
    std::vector<WeightedItem> items;
    items.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) items.push_back({static_cast<int>(i), weights[i]});
    return items;
}

inline std::vector<Weight> partition_sums(std::span<const WeightedItem> items,
                                          const PartitionAssignment& pa) {
    std::vector<Weight> sums(static_cast<std::size_t>(pa.m), 0);
    for (const auto& it : items) sums[pa.part_of[it.u]] += it.w;
    return sums;
}

inline Weight max_partition_sum(std::span<const WeightedItem> items, const PartitionAssignment& pa) {
    const auto sums = partition_sums(items, pa);
    return sums.empty() ? 0 : *std::max_element(sums.begin(), sums.end());
}

namespace detail {

inline void require_capacity(std::size_t n, int m, int ubar) {
    if (m < 1 || ubar < 0 || static_cast<long long>(m) * ubar < static_cast<long long>(n)) {
        throw CapacityInfeasible("m*ubar = " + std::to_string(static_cast<long long>(m) * ubar) +
                                 " cannot hold " + std::to_string(n) + " items");
    }
}

// Heaviest first; equal weights by ascending id.
inline std::vector<std::size_t> heaviest_first(std::span<const WeightedItem> items) {
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (items[a].w != items[b].w) return items[a].w > items[b].w;
        return items[a].u < items[b].u;
    });
    return order;
}

} // namespace detail

// List scheduling in the given order: each item goes to the lightest
// partition that still has room (lowest index on ties).
inline PartitionAssignment greedy_in_order(std::span<const WeightedItem> items,
                                           std::span<const std::size_t> order, int m, int ubar) {
    detail::require_capacity(items.size(), m, ubar);
    PartitionAssignment pa{m, ubar, std::vector<int>(items.size(), 0)};
    std::vector<Weight> sums(static_cast<std::size_t>(m), 0);
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    for (std::size_t idx : order) {
        int target = -1;
        for (int k = 0; k < m; ++k) {
            if (count[k] < ubar && (target < 0 || sums[k] < sums[target])) target = k;
        }
        pa.part_of[items[idx].u] = target;
        sums[target] += items[idx].w;
        ++count[target];
    }
    return pa;
}

inline PartitionAssignment greedy_lpt(std::span<const WeightedItem> items, int m, int ubar) {
    detail::require_capacity(items.size(), m, ubar);
    const auto order = detail::heaviest_first(items);
    return greedy_in_order(items, order, m, ubar);
}

// Differencing tuple: m disjoint subsets (item positions) with sums kept in
// descending order.
struct KKTuple {
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<Weight> sums;
    std::size_t age = 0;

    Weight spread() const { return sums.front() - sums.back(); }
};

namespace detail {

inline KKTuple kk_merge(const KKTuple& a, const KKTuple& b, std::size_t age) {
    const std::size_t m = a.sums.size();
    std::vector<std::pair<Weight, std::vector<std::size_t>>> parts(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = m - 1 - i;
        parts[i].first = a.sums[i] + b.sums[j];
        parts[i].second = a.subsets[i];
        parts[i].second.insert(parts[i].second.end(), b.subsets[j].begin(), b.subsets[j].end());
    }
    std::stable_sort(parts.begin(), parts.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    KKTuple out;
    out.age = age;
    for (auto& p : parts) {
        out.sums.push_back(p.first);
        out.subsets.push_back(std::move(p.second));
    }
    return out;
}

// While a partition is over capacity, move its lightest item to the lightest
// partition with room.
inline void repair_capacity(std::span<const WeightedItem> items, PartitionAssignment& pa) {
    const int m = pa.m;
    std::vector<Weight> sums(static_cast<std::size_t>(m), 0);
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    for (const auto& it : items) {
        sums[pa.part_of[it.u]] += it.w;
        ++count[pa.part_of[it.u]];
    }
    for (int k = 0; k < m; ++k) {
        while (count[k] > pa.ubar) {
            const WeightedItem* smallest = nullptr;
            for (const auto& it : items) {
                if (pa.part_of[it.u] != k) continue;
                if (!smallest || it.w < smallest->w || (it.w == smallest->w && it.u < smallest->u)) {
                    smallest = &it;
                }
            }
            int target = -1;
            for (int j = 0; j < m; ++j) {
                if (count[j] < pa.ubar && (target < 0 || sums[j] < sums[target])) target = j;
            }
            pa.part_of[smallest->u] = target;
            sums[k] -= smallest->w;
            sums[target] += smallest->w;
            --count[k];
            ++count[target];
        }
    }
}

} // namespace detail

// Multi-way Karmarkar-Karp differencing followed by capacity repair.
inline PartitionAssignment kk_multiway(std::span<const WeightedItem> items, int m, int ubar) {
    detail::require_capacity(items.size(), m, ubar);
    PartitionAssignment pa{m, ubar, std::vector<int>(items.size(), 0)};
    if (items.empty()) return pa;

    auto worse = [](const KKTuple& a, const KKTuple& b) {
        if (a.spread() != b.spread()) return a.spread() < b.spread();
        return a.age > b.age;
    };
    std::priority_queue<KKTuple, std::vector<KKTuple>, decltype(worse)> heap(worse);

    std::size_t age = 0;
    for (std::size_t idx : detail::heaviest_first(items)) {
        KKTuple t;
        t.sums.assign(static_cast<std::size_t>(m), 0);
        t.subsets.assign(static_cast<std::size_t>(m), {});
        t.sums[0] = items[idx].w;
        t.subsets[0].push_back(idx);
        t.age = age++;
        heap.push(std::move(t));
    }
    while (heap.size() > 1) {
        KKTuple a = heap.top();
        heap.pop();
        KKTuple b = heap.top();
        heap.pop();
        heap.push(detail::kk_merge(a, b, age++));
    }
    const KKTuple& last = heap.top();
    for (int k = 0; k < m; ++k) {
        for (std::size_t idx : last.subsets[k]) pa.part_of[items[idx].u] = k;
    }
    detail::repair_capacity(items, pa);
    return pa;
}

struct BruteResult {
    Weight objective = 0;
    PartitionAssignment assignment;
};

inline constexpr long long kBruteLimit = 10'000'000;

// Exhaustive search over labeled assignments. Requires m^n <= 1e7.
inline BruteResult min_max_brute(std::span<const WeightedItem> items, int m, int ubar) {
    detail::require_capacity(items.size(), m, ubar);
    long long space = 1;
    for (std::size_t i = 0; i < items.size(); ++i) {
        space *= m;
        if (space > kBruteLimit) {
            throw TooLarge("m^n exceeds 1e7 for " + std::to_string(items.size()) + " items");
        }
    }
    const std::size_t n = items.size();
    BruteResult best{std::numeric_limits<Weight>::max(), {m, ubar, std::vector<int>(n, 0)}};
    std::vector<int> cur(n, 0);
    std::vector<Weight> sums(static_cast<std::size_t>(m), 0);
    std::vector<int> count(static_cast<std::size_t>(m), 0);

    auto rec = [&](auto&& self, std::size_t i, Weight cur_max) -> void {
        if (cur_max >= best.objective) return;
        if (i == n) {
            best.objective = cur_max;
            for (std::size_t j = 0; j < n; ++j) best.assignment.part_of[items[j].u] = cur[j];
            return;
        }
        for (int k = 0; k < m; ++k) {
            if (count[k] >= ubar) continue;
            sums[k] += items[i].w;
            ++count[k];
            cur[i] = k;
            self(self, i + 1, std::max(cur_max, sums[k]));
            sums[k] -= items[i].w;
            --count[k];
        }
    };
    rec(rec, 0, 0);
    return best;
}

} // namespace pmmwm
