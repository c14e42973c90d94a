#pragma once

// Outer match -> partition -> graph-modification loop.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"
#include "pmmwm/hga.hpp"
#include "pmmwm/matcher.hpp"
#include "pmmwm/numpart.hpp"

namespace pmmwm {

inline constexpr int kInfiniteTenure = INT_MAX;

// Banned edges with their remaining tenure, plus edges whose ban was vetoed
// (it would have destroyed every perfect matching) and which may not be
// retried until their own counter runs out.
struct BanList {
    std::map<Edge, int> entries;
    std::map<Edge, int> vetoed;
};

struct FimpParams {
    int max_iterations = 500;
    std::int64_t time_limit_ms = 60'000;  // <= 0 disables the limit
    int tenure = 20;
    double recovery_threshold = 0.05;
    double recovery_prob = 0.5;
    HgaParams hga;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (max_iterations < 1) throw SpecInvalid("max_iterations must be >= 1");
        if (tenure < 1) throw SpecInvalid("tenure must be >= 1");
        if (!(recovery_prob >= 0.0 && recovery_prob <= 1.0)) {
            throw SpecInvalid("recovery_prob must lie in [0, 1]");
        }
        if (!(recovery_threshold >= 0.0)) throw SpecInvalid("recovery_threshold must be >= 0");
        hga.validate();
    }
};

struct IterationRecord {
    int iteration = 0;
    Weight objective = 0;
    Weight incumbent = 0;
    int bans_active = 0;
    double match_ms = 0.0;
    double hga_ms = 0.0;
    bool recovered = false;
};

struct RunStats {
    int iterations = 0;
    double wall_ms = 0.0;
    double match_ms = 0.0;
    double hga_ms = 0.0;
    int recoveries = 0;
    int vetoes = 0;
    std::vector<IterationRecord> trace;
};

struct SolveResult {
    Solution best;
    RunStats stats;
};

struct ModifyOutcome {
    std::vector<Edge> released;
    bool recovered = false;
    std::optional<Edge> banned;
    std::vector<Edge> vetoed;
};

// True iff `bans.entries` lists exactly the banned edges of g.
inline bool bans_consistent(const BipartiteGraph& g, const BanList& bans) {
    std::size_t listed = 0;
    for (const auto& [e, t] : bans.entries) {
        if (!g.banned(e.u, e.v) || t < 1) return false;
        ++listed;
    }
    return listed == g.banned_count();
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Rematch policy used by the graph-modification step.
struct Rematch {
    bool incremental = true;

    void after_release(const BipartiteGraph& g, MatchState& st, std::span<const Edge> released) const {
        if (released.empty()) return;
        if (incremental) {
            batch_resolve(g, st, released);
        } else {
            st = solve_full(g);
        }
    }

    void after_ban(const BipartiteGraph& g, MatchState& st, Edge e) const {
        if (incremental) {
            repair_after_ban(g, st, e.u, e.v);
        } else {
            st = solve_full(g);
        }
    }
};

inline void tick(std::map<Edge, int>& counters, std::vector<Edge>* expired) {
    for (auto it = counters.begin(); it != counters.end();) {
        if (it->second != kInfiniteTenure) --it->second;
        if (it->second <= 0) {
            if (expired) expired->push_back(it->first);
            it = counters.erase(it);
        } else {
            ++it;
        }
    }
}

inline ModifyOutcome modify_graph(BipartiteGraph& g, MatchState& st, const Solution& current,
                                  Weight incumbent, BanList& bans, const FimpParams& params,
                                  Rng& rng, const Rematch& rematch, bool allow_recovery) {
    ModifyOutcome out;

    tick(bans.entries, &out.released);
    tick(bans.vetoed, nullptr);
    for (const Edge& e : out.released) g.unban(e.u, e.v);
    rematch.after_release(g, st, out.released);

    if (allow_recovery && !bans.entries.empty()) {
        const double gap =
            incumbent > 0 ? static_cast<double>(current.objective - incumbent) / static_cast<double>(incumbent)
                          : (current.objective > incumbent ? std::numeric_limits<double>::infinity() : 0.0);
        if (gap >= params.recovery_threshold) {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            if (coin(rng) < params.recovery_prob) {
                std::vector<Edge> all;
                for (const auto& [e, t] : bans.entries) {
                    g.unban(e.u, e.v);
                    all.push_back(e);
                }
                bans.entries.clear();
                rematch.after_release(g, st, all);
                out.released.insert(out.released.end(), all.begin(), all.end());
                out.recovered = true;
                return out;
            }
        }
    }

    // Ban candidates: matched edges of the heaviest partition, heaviest first.
    const auto& part_of = current.partition.part_of;
    std::vector<Weight> sums(static_cast<std::size_t>(current.partition.m), 0);
    for (int u = 0; u < g.n1(); ++u) sums[part_of[u]] += g.weight(u, st.mate_u[u]);
    const int heavy = static_cast<int>(std::max_element(sums.begin(), sums.end()) - sums.begin());
    std::vector<Edge> candidates;
    for (int u = 0; u < g.n1(); ++u) {
        if (part_of[u] == heavy) candidates.push_back({u, st.mate_u[u]});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](const Edge& a, const Edge& b) {
        return g.weight(a.u, a.v) > g.weight(b.u, b.v);
    });
    for (const Edge& e : candidates) {
        if (bans.vetoed.contains(e)) continue;
        g.ban(e.u, e.v);
        try {
            rematch.after_ban(g, st, e);
        } catch (const NoPerfectMatching&) {
            g.unban(e.u, e.v);
            bans.vetoed[e] = params.tenure;
            out.vetoed.push_back(e);
            continue;
        }
        bans.entries[e] = params.tenure;
        out.banned = e;
        break;
    }
    return out;
}

// Supplies the partition stage: (matched items, m, ubar, warm start, deadline, iteration rng).
using PartitionStage = std::function<Individual(std::span<const WeightedItem>, int, int,
                                                const PartitionAssignment*,
                                                std::optional<Clock::time_point>, Rng&)>;

struct LoopConfig {
    Rematch rematch;
    bool allow_recovery = true;
    bool warm_start = true;
    PartitionStage partition;
};

using IterationObserver =
    std::function<void(const IterationRecord&, const BipartiteGraph&, const MatchState&, const BanList&)>;

inline SolveResult run_loop(BipartiteGraph g, int m, int ubar, const FimpParams& params,
                            const LoopConfig& cfg, const IterationObserver& observer) {
    params.validate();
    if (m < 1 || static_cast<long long>(m) * ubar < g.n1()) {
        throw InfeasibleInstance("m*ubar must be >= n1");
    }
    const auto start = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (params.time_limit_ms > 0) deadline = start + std::chrono::milliseconds(params.time_limit_ms);

    SolveResult result;
    RunStats& stats = result.stats;
    Rng rng(params.rng_seed);
    BanList bans;

    auto t0 = Clock::now();
    MatchState st = solve_full(g);
    double pending_match_ms = ms_since(t0);

    std::optional<PartitionAssignment> prev_assignment;
    std::vector<int> prev_mate;
    Weight incumbent = std::numeric_limits<Weight>::max();

    for (int it = 0; it < params.max_iterations; ++it) {
        if (it > 0 && deadline && Clock::now() >= *deadline) break;

        std::vector<WeightedItem> items(static_cast<std::size_t>(g.n1()));
        for (int u = 0; u < g.n1(); ++u) items[u] = {u, g.weight(u, st.mate_u[u])};

        const PartitionAssignment* warm = nullptr;
        if (cfg.warm_start && prev_assignment) {
            int changed = 0;
            for (int u = 0; u < g.n1(); ++u) changed += prev_mate[u] != st.mate_u[u];
            if (changed <= 2) warm = &*prev_assignment;
        }

        t0 = Clock::now();
        Individual best = cfg.partition(items, m, ubar, warm, deadline, rng);
        const double hga_ms = ms_since(t0);

        Solution current{st.mate_u, best.assignment, best.objective()};
        if (current.objective < incumbent) {
            incumbent = current.objective;
            result.best = current;
        }
        prev_assignment = best.assignment;
        prev_mate = st.mate_u;

        IterationRecord rec;
        rec.iteration = it;
        rec.objective = current.objective;
        rec.incumbent = incumbent;
        rec.hga_ms = hga_ms;

        const bool last = m == 1 || it + 1 == params.max_iterations ||
                          (deadline && Clock::now() >= *deadline);
        if (!last) {
            t0 = Clock::now();
            const ModifyOutcome mod =
                modify_graph(g, st, current, incumbent, bans, params, rng, cfg.rematch, cfg.allow_recovery);
            pending_match_ms += ms_since(t0);
            rec.recovered = mod.recovered;
            stats.recoveries += mod.recovered ? 1 : 0;
            stats.vetoes += static_cast<int>(mod.vetoed.size());
            if (invariant_checks_enabled()) {
                if (!bans_consistent(g, bans)) throw InvariantViolation("ban list out of sync with graph");
                if (st.total_weight != solve_full(g).total_weight) {
                    throw InvariantViolation("incremental matching diverged from full solve");
                }
            }
        }
        rec.match_ms = pending_match_ms;
        rec.bans_active = static_cast<int>(bans.entries.size());
        stats.match_ms += pending_match_ms;
        stats.hga_ms += hga_ms;
        pending_match_ms = 0.0;
        stats.trace.push_back(rec);
        stats.iterations = it + 1;
        if (observer) observer(rec, g, st, bans);
        if (last) break;
    }
    stats.wall_ms = ms_since(start);
    return result;
}

} // namespace detail

// Graph-modification step of the outer loop using incremental rematching.
inline ModifyOutcome modify_graph(BipartiteGraph& g, MatchState& st, const Solution& current,
                                  Weight incumbent, BanList& bans, const FimpParams& params, Rng& rng) {
    return detail::modify_graph(g, st, current, incumbent, bans, params, rng, detail::Rematch{true}, true);
}

struct SolveOptions {
    detail::IterationObserver observer;
};

inline SolveResult solve(const BipartiteGraph& g, int m, int ubar, const FimpParams& params,
                         const SolveOptions& options = {}) {
    detail::LoopConfig cfg;
    cfg.rematch = detail::Rematch{true};
    cfg.allow_recovery = true;
    cfg.warm_start = true;
    const HgaParams base = params.hga;
    cfg.partition = [base](std::span<const WeightedItem> items, int m_, int ubar_,
                           const PartitionAssignment* warm,
                           std::optional<detail::Clock::time_point> deadline, Rng& rng) {
        HgaParams hp = base;
        hp.rng_seed = rng();
        EvolveOptions eo;
        eo.warm_start = warm;
        eo.deadline = deadline;
        return evolve(items, m_, ubar_, hp, eo).best;
    };
    return detail::run_loop(g, m, ubar, params, cfg, options.observer);
}

} // namespace pmmwm
