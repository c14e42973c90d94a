#pragma once

// Hybrid genetic algorithm for the partition stage: the matching is fixed, so
// the problem is capacity-bounded min-max partitioning of the matched weights.
//
// Individuals are compared by their partition sums sorted in descending order
// (lexicographically, smaller is better). The first entry is the objective;
// later entries break ties in favour of better balanced solutions.
//
// All routines index part_of by item id and assume items[i].u == i.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/numpart.hpp"

namespace pmmwm {

using Rng = std::mt19937_64;

struct Individual {
    PartitionAssignment assignment;
    std::vector<Weight> fitness;  // partition sums, descending

    Weight objective() const { return fitness.empty() ? 0 : fitness.front(); }
};

inline bool better(const Individual& a, const Individual& b) { return a.fitness < b.fitness; }

inline std::vector<Weight> fitness_of(std::span<const WeightedItem> items, const PartitionAssignment& pa) {
    auto sums = partition_sums(items, pa);
    std::sort(sums.begin(), sums.end(), std::greater<>());
    return sums;
}

inline Individual make_individual(std::span<const WeightedItem> items, PartitionAssignment pa) {
    Individual ind{std::move(pa), {}};
    ind.fitness = fitness_of(items, ind.assignment);
    return ind;
}

struct HgaParams {
    int pop_size = 20;
    int max_generations = 200;
    int stall_limit = 20;
    double mutation_rate = 0.2;
    int elite_count = 1;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (pop_size < 2) throw SpecInvalid("pop_size must be >= 2");
        if (elite_count < 1 || elite_count >= pop_size) {
            throw SpecInvalid("elite_count must satisfy 1 <= elite_count < pop_size");
        }
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
            throw SpecInvalid("mutation_rate must lie in [0, 1]");
        }
        if (max_generations < 0 || stall_limit < 1) {
            throw SpecInvalid("max_generations must be >= 0 and stall_limit >= 1");
        }
    }
};

namespace detail {

// Partition bookkeeping for local search.
struct PartitionWork {
    std::vector<int> part_of;
    std::vector<Weight> sums;
    std::vector<int> count;

    PartitionWork(std::span<const WeightedItem> items, const PartitionAssignment& pa)
        : part_of(pa.part_of),
          sums(static_cast<std::size_t>(pa.m), 0),
          count(static_cast<std::size_t>(pa.m), 0) {
        for (const auto& it : items) {
            sums[part_of[it.u]] += it.w;
            ++count[part_of[it.u]];
        }
    }

    int heaviest() const {
        return static_cast<int>(std::max_element(sums.begin(), sums.end()) - sums.begin());
    }

    void move(const WeightedItem& it, int to) {
        const int from = part_of[it.u];
        sums[from] -= it.w;
        --count[from];
        sums[to] += it.w;
        ++count[to];
        part_of[it.u] = to;
    }

    // Sorted sums if partitions a and b took the values na and nb.
    std::vector<Weight> fitness_with(int a, Weight na, int b, Weight nb) const {
        std::vector<Weight> f = sums;
        f[a] = na;
        f[b] = nb;
        std::sort(f.begin(), f.end(), std::greater<>());
        return f;
    }
};

// Relocate one item out of H; best improvement.
inline bool mls_relocate(std::span<const WeightedItem> items, PartitionWork& work, int heavy,
                         std::span<const int> heavy_members, int ubar) {
    const int m = static_cast<int>(work.sums.size());
    const Weight sh = work.sums[heavy];
    std::vector<Weight> best_fit;
    int best_item = -1;
    int best_to = -1;
    for (int i : heavy_members) {
        const Weight w = items[i].w;
        for (int k = 0; k < m; ++k) {
            if (k == heavy || work.count[k] >= ubar) continue;
            if (!(w > 0 && work.sums[k] + w < sh)) continue;
            auto fit = work.fitness_with(heavy, sh - w, k, work.sums[k] + w);
            if (best_item < 0 || fit < best_fit) {
                best_fit = std::move(fit);
                best_item = i;
                best_to = k;
            }
        }
    }
    if (best_item < 0) return false;
    work.move(items[best_item], best_to);
    return true;
}

// Swap one item of H with one item elsewhere; first improvement.
inline bool mls_swap(std::span<const WeightedItem> items, PartitionWork& work, int heavy,
                     std::span<const int> heavy_members,
                     const std::vector<std::vector<int>>& members) {
    const int m = static_cast<int>(work.sums.size());
    const Weight sh = work.sums[heavy];
    for (int i : heavy_members) {
        for (int k = 0; k < m; ++k) {
            if (k == heavy) continue;
            const Weight room = sh - work.sums[k];
            for (int j : members[k]) {
                const Weight d = items[i].w - items[j].w;
                if (d > 0 && d < room) {
                    work.move(items[i], k);
                    work.move(items[j], heavy);
                    return true;
                }
            }
        }
    }
    return false;
}

// Move two items of H out in exchange for one item; first improvement.
inline bool mls_two_for_one(std::span<const WeightedItem> items, PartitionWork& work, int heavy,
                            std::span<const int> heavy_members,
                            const std::vector<std::vector<int>>& members, int ubar) {
    const int m = static_cast<int>(work.sums.size());
    const Weight sh = work.sums[heavy];
    const std::size_t h = heavy_members.size();
    for (std::size_t a = 0; a < h; ++a) {
        for (std::size_t b = a + 1; b < h; ++b) {
            const int i1 = heavy_members[a];
            const int i2 = heavy_members[b];
            const Weight pair = items[i1].w + items[i2].w;
            for (int k = 0; k < m; ++k) {
                if (k == heavy || work.count[k] >= ubar) continue;
                const Weight room = sh - work.sums[k];
                for (int j : members[k]) {
                    const Weight d = pair - items[j].w;
                    if (d > 0 && d < room) {
                        work.move(items[i1], k);
                        work.move(items[i2], k);
                        work.move(items[j], heavy);
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

} // namespace detail

// Multilevel local search on the heaviest partition H (lowest index on ties):
// relocation, then swap, then two-for-one exchange; any improvement restarts
// at relocation. A move improves iff it lowers the sorted-sums vector
// lexicographically, which for a move between H and k holds exactly when the
// larger of the two new sums is below the old sum of H.
inline Individual mls_improve(const Individual& ind, std::span<const WeightedItem> items, int ubar) {
    const int m = ind.assignment.m;
    detail::PartitionWork work(items, ind.assignment);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
    while (true) {
        for (auto& mem : members) mem.clear();
        for (const auto& it : items) members[work.part_of[it.u]].push_back(it.u);
        const int heavy = work.heaviest();
        const std::vector<int> heavy_members = members[heavy];
        if (detail::mls_relocate(items, work, heavy, heavy_members, ubar)) continue;
        if (detail::mls_swap(items, work, heavy, heavy_members, members)) continue;
        if (detail::mls_two_for_one(items, work, heavy, heavy_members, members, ubar)) continue;
        break;
    }
    return make_individual(items, PartitionAssignment{m, ubar, std::move(work.part_of)});
}

// Greedy Partition Crossover. Round r copies, from parent a (even r) or b
// (odd r), the partition whose not-yet-inherited items weigh closest to
// remaining / (m - r). Leftover items go heaviest-first to the lightest child
// partition with room.
inline Individual gpx_crossover(const Individual& a, const Individual& b,
                                std::span<const WeightedItem> items, int m, int ubar) {
    const std::size_t n = items.size();
    std::vector<int> child(n, -1);
    std::vector<Weight> sums(static_cast<std::size_t>(m), 0);
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    Weight remaining = 0;
    for (const auto& it : items) remaining += it.w;

    std::vector<Weight> restricted(static_cast<std::size_t>(m));
    std::vector<int> restricted_count(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        const auto& donor = (r % 2 == 0 ? a : b).assignment.part_of;
        std::fill(restricted.begin(), restricted.end(), 0);
        std::fill(restricted_count.begin(), restricted_count.end(), 0);
        for (const auto& it : items) {
            if (child[it.u] >= 0) continue;
            restricted[donor[it.u]] += it.w;
            ++restricted_count[donor[it.u]];
        }
        // |restricted * rounds_left - remaining| compares distances to the
        // target remaining / rounds_left without division.
        const Weight rounds_left = m - r;
        int pick = -1;
        Weight pick_gap = 0;
        for (int k = 0; k < m; ++k) {
            if (restricted_count[k] == 0) continue;
            const Weight diff = restricted[k] * rounds_left - remaining;
            const Weight gap = diff < 0 ? -diff : diff;
            if (pick < 0 || gap < pick_gap) {
                pick = k;
                pick_gap = gap;
            }
        }
        if (pick < 0) break;
        for (const auto& it : items) {
            if (child[it.u] < 0 && donor[it.u] == pick) {
                child[it.u] = r;
                sums[r] += it.w;
                ++count[r];
            }
        }
        remaining -= restricted[pick];
    }

    std::vector<WeightedItem> leftover;
    for (const auto& it : items) {
        if (child[it.u] < 0) leftover.push_back(it);
    }
    std::stable_sort(leftover.begin(), leftover.end(), [](const WeightedItem& x, const WeightedItem& y) {
        if (x.w != y.w) return x.w > y.w;
        return x.u < y.u;
    });
    for (const auto& it : leftover) {
        int target = -1;
        for (int k = 0; k < m; ++k) {
            if (count[k] < ubar && (target < 0 || sums[k] < sums[target])) target = k;
        }
        child[it.u] = target;
        sums[target] += it.w;
        ++count[target];
    }
    return make_individual(items, PartitionAssignment{m, ubar, std::move(child)});
}

// With probability `rate`, moves one random item to a random other partition
// that has room. Draw order: u01 < rate, item index, target index.
inline Individual mutate(const Individual& ind, std::span<const WeightedItem> items, int ubar,
                         double rate, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (items.empty() || !(coin(rng) < rate)) return ind;
    const int m = ind.assignment.m;
    std::uniform_int_distribution<std::size_t> pick_item(0, items.size() - 1);
    const int u = items[pick_item(rng)].u;
    const int from = ind.assignment.part_of[u];
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    for (int k : ind.assignment.part_of) ++count[k];
    std::vector<int> targets;
    for (int k = 0; k < m; ++k) {
        if (k != from && count[k] < ubar) targets.push_back(k);
    }
    if (targets.empty()) return ind;
    std::uniform_int_distribution<std::size_t> pick_target(0, targets.size() - 1);
    PartitionAssignment pa = ind.assignment;
    pa.part_of[u] = targets[pick_target(rng)];
    return make_individual(items, std::move(pa));
}

using Population = std::vector<Individual>;

// Slot 0 is LPT, slot 1 is Karmarkar-Karp, the rest list-schedule a random
// permutation. Every individual is then polished by MLS. Random individuals
// whose fitness duplicates an earlier one are redrawn up to three times.
// A warm start, when given, takes the last slot.
inline Population init_population(std::span<const WeightedItem> items, int m, int ubar,
                                  const HgaParams& params, Rng& rng,
                                  const PartitionAssignment* warm_start = nullptr) {
    params.validate();
    detail::require_capacity(items.size(), m, ubar);
    Population pop;
    pop.reserve(static_cast<std::size_t>(params.pop_size));
    pop.push_back(mls_improve(make_individual(items, greedy_lpt(items, m, ubar)), items, ubar));
    pop.push_back(mls_improve(make_individual(items, kk_multiway(items, m, ubar)), items, ubar));

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto duplicate = [&](const Individual& ind) {
        return std::any_of(pop.begin(), pop.end(),
                           [&](const Individual& o) { return o.fitness == ind.fitness; });
    };
    const int randomized = params.pop_size - 2 - (warm_start ? 1 : 0);
    for (int i = 0; i < randomized; ++i) {
        Individual ind;
        for (int attempt = 0; attempt <= 3; ++attempt) {
            std::shuffle(order.begin(), order.end(), rng);
            ind = mls_improve(make_individual(items, greedy_in_order(items, order, m, ubar)), items, ubar);
            if (!duplicate(ind)) break;
        }
        pop.push_back(std::move(ind));
    }
    if (warm_start && params.pop_size > 2) {
        pop.push_back(mls_improve(make_individual(items, *warm_start), items, ubar));
    }
    return pop;
}

inline Population init_population(std::span<const WeightedItem> items, int m, int ubar,
                                  const HgaParams& params) {
    Rng rng(params.rng_seed);
    return init_population(items, m, ubar, params, rng);
}

struct EvolveOptions {
    const PartitionAssignment* warm_start = nullptr;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Called with the generation index (0 = initial population).
    std::function<void(int, const Population&)> observer;
};

struct EvolveResult {
    Individual best;
    int generations = 0;
    std::vector<std::vector<Weight>> best_history;  // incumbent fitness after each generation
};

inline EvolveResult evolve(std::span<const WeightedItem> items, int m, int ubar,
                           const HgaParams& params, const EvolveOptions& options = {}) {
    params.validate();
    Rng rng(params.rng_seed);
    Population pop = init_population(items, m, ubar, params, rng, options.warm_start);
    if (options.observer) options.observer(0, pop);

    auto best_of = [](const Population& p) {
        return *std::min_element(p.begin(), p.end(), better);
    };
    EvolveResult result{best_of(pop), 0, {}};
    result.best_history.push_back(result.best.fitness);

    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(params.pop_size) - 1);
    auto tournament = [&]() -> const Individual& {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        return better(pop[j], pop[i]) ? pop[j] : pop[i];
    };

    int stall = 0;
    for (int gen = 1; gen <= params.max_generations && stall < params.stall_limit; ++gen) {
        if (options.deadline && std::chrono::steady_clock::now() >= *options.deadline) break;
        std::vector<std::size_t> rank(pop.size());
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t x, std::size_t y) { return better(pop[x], pop[y]); });
        Population next;
        next.reserve(pop.size());
        for (int e = 0; e < params.elite_count; ++e) next.push_back(pop[rank[e]]);
        while (static_cast<int>(next.size()) < params.pop_size) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();
            Individual child = gpx_crossover(p1, p2, items, m, ubar);
            child = mutate(child, items, ubar, params.mutation_rate, rng);
            next.push_back(mls_improve(child, items, ubar));
        }
        pop = std::move(next);
        result.generations = gen;
        if (options.observer) options.observer(gen, pop);

        const Individual& gen_best = best_of(pop);
        if (better(gen_best, result.best)) {
            result.best = gen_best;
            stall = 0;
        } else {
            ++stall;
        }
        result.best_history.push_back(result.best.fitness);
    }
    return result;
}

} // namespace pmmwm
