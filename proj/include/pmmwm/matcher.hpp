#pragma once

// Min-weight perfect matching on U with incremental repair.
//
// The primitive is a single shortest-augmenting-path phase (Dijkstra over
// reduced costs w(u,v) - alpha[u] - beta[v]). A full solve runs n1 phases;
// repairing after one edge ban or unban runs at most one.
//
// Rectangular instances (n1 < n2) are handled as the square problem padded
// with n2 - n1 implicit zero-cost rows. Under that view every V-vertex not
// matched to a real row must carry the largest beta, and a phase may route
// through a free column (via its implicit row) to reach the column that is
// actually unmatched. Nothing about the implicit rows is stored.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"

namespace pmmwm {

struct MatchState {
    std::vector<int> mate_u;  // U -> V
    std::vector<int> mate_v;  // V -> U or kFree
    std::vector<Weight> alpha;
    std::vector<Weight> beta;
    Weight total_weight = 0;
    bool optimal = false;
    int phases = 0;  // augmentation phases run by the most recent operation
};

struct Edge {
    int u = 0;
    int v = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Full dual/primal scan. Returns a description of the first broken invariant.
inline std::optional<std::string> check_match_state(const BipartiteGraph& g, const MatchState& st) {
    const int n1 = g.n1();
    const int n2 = g.n2();
    auto bad = [](std::string s) { return std::optional<std::string>(std::move(s)); };
    if (static_cast<int>(st.mate_u.size()) != n1 || static_cast<int>(st.mate_v.size()) != n2 ||
        static_cast<int>(st.alpha.size()) != n1 || static_cast<int>(st.beta.size()) != n2) {
        return bad("state vectors have wrong sizes");
    }
    Weight primal = 0;
    Weight dual = 0;
    for (int u = 0; u < n1; ++u) {
        const int v = st.mate_u[u];
        if (v < 0 || v >= n2) return bad("u=" + std::to_string(u) + " unmatched");
        if (st.mate_v[v] != u) return bad("mate_u/mate_v disagree at u=" + std::to_string(u));
        if (!g.available(u, v)) return bad("u=" + std::to_string(u) + " matched on unavailable edge");
        if (st.alpha[u] + st.beta[v] != g.weight(u, v)) {
            return bad("matched edge (" + std::to_string(u) + "," + std::to_string(v) + ") not tight");
        }
        primal += g.weight(u, v);
        dual += st.alpha[u] + st.beta[v];
    }
    const Weight top = *std::max_element(st.beta.begin(), st.beta.end());
    for (int v = 0; v < n2; ++v) {
        const int u = st.mate_v[v];
        if (u == kFree) {
            if (st.beta[v] != top) return bad("free v=" + std::to_string(v) + " below max beta");
        } else if (u < 0 || u >= n1 || st.mate_u[u] != v) {
            return bad("mate_v inconsistent at v=" + std::to_string(v));
        }
    }
    for (int u = 0; u < n1; ++u) {
        for (int v = 0; v < n2; ++v) {
            if (g.available(u, v) && st.alpha[u] + st.beta[v] > g.weight(u, v)) {
                return bad("dual infeasible at (" + std::to_string(u) + "," + std::to_string(v) + ")");
            }
        }
    }
    if (primal != st.total_weight) return bad("total_weight is stale");
    if (dual != primal) return bad("duality gap on matched edges");
    return std::nullopt;
}

namespace detail {

inline constexpr Weight kInfDist = std::numeric_limits<Weight>::max() / 4;

// Set PMMWM_CHECK_INVARIANTS=1 to scan every state an operation returns.
inline bool invariant_checks_enabled() {
    static const bool enabled = [] {
        const char* s = std::getenv("PMMWM_CHECK_INVARIANTS");
        return s != nullptr && *s != '\0' && *s != '0';
    }();
    return enabled;
}

inline void finish(const BipartiteGraph& g, MatchState& st) {
    Weight total = 0;
    for (int u = 0; u < g.n1(); ++u) total += g.weight(u, st.mate_u[u]);
    st.total_weight = total;
    st.optimal = true;
    if (invariant_checks_enabled()) {
        if (auto err = check_match_state(g, st)) throw InvariantViolation("matcher: " + *err);
    }
}

// One shortest-augmenting-path phase rooted at the free row `root`.
// Throws NoPerfectMatching before modifying `st` if no free column is reachable.
inline void augment_from(const BipartiteGraph& g, MatchState& st, int root) {
    const int n1 = g.n1();
    const int n2 = g.n2();

    // Which free columns may end the path (see header comment).
    const Weight top = *std::max_element(st.beta.begin(), st.beta.end());
    int free_at_top = 0;
    for (int v = 0; v < n2; ++v) {
        if (st.mate_v[v] == kFree && st.beta[v] == top) ++free_at_top;
    }
    const bool top_is_terminal = free_at_top > n2 - n1;

    std::vector<Weight> dist(static_cast<std::size_t>(n2), kInfDist);
    std::vector<int> pred(static_cast<std::size_t>(n2), -1);
    std::vector<char> done(static_cast<std::size_t>(n2), 0);
    std::vector<int> scanned;

    for (int v = 0; v < n2; ++v) {
        if (g.available(root, v)) dist[v] = g.weight(root, v) - st.alpha[root] - st.beta[v];
    }

    int sink = -1;
    while (true) {
        int best = -1;
        Weight best_d = kInfDist;
        for (int v = 0; v < n2; ++v) {
            if (!done[v] && dist[v] < best_d) {
                best_d = dist[v];
                best = v;
            }
        }
        if (best < 0) {
            throw NoPerfectMatching("no augmenting path from u=" + std::to_string(root));
        }
        const int row = st.mate_v[best];
        if (row == kFree && (st.beta[best] < top || top_is_terminal)) {
            sink = best;
            break;
        }
        done[best] = 1;
        scanned.push_back(best);
        if (row != kFree) {
            const Weight base = best_d - st.alpha[row];
            for (int v = 0; v < n2; ++v) {
                if (done[v] || !g.available(row, v)) continue;
                const Weight nd = base + g.weight(row, v) - st.beta[v];
                if (nd < dist[v]) {
                    dist[v] = nd;
                    pred[v] = best;
                }
            }
        } else {
            // Implicit zero-cost row sitting on this free column.
            const Weight base = best_d + st.beta[best];
            for (int v = 0; v < n2; ++v) {
                if (done[v]) continue;
                const Weight nd = base - st.beta[v];
                if (nd < dist[v]) {
                    dist[v] = nd;
                    pred[v] = best;
                }
            }
        }
    }

    const Weight reach = dist[sink];
    st.alpha[root] += reach;
    for (int c : scanned) {
        const Weight delta = reach - dist[c];
        st.beta[c] -= delta;
        if (st.mate_v[c] != kFree) st.alpha[st.mate_v[c]] += delta;
    }

    for (int c = sink;;) {
        const int p = pred[c];
        if (p < 0) {
            st.mate_v[c] = root;
            st.mate_u[root] = c;
            break;
        }
        const int r = st.mate_v[p];
        st.mate_v[c] = r;
        if (r != kFree) st.mate_u[r] = c;
        c = p;
    }
}

// Lowers alpha on the given rows to restore dual feasibility, frees any row
// whose matched edge lost tightness, then re-augments each freed row.
inline void restore_rows(const BipartiteGraph& g, MatchState& st, std::span<const int> rows) {
    std::vector<int> freed;
    for (int u : rows) {
        Weight lowest = kInfDist;
        for (int v = 0; v < g.n2(); ++v) {
            if (g.available(u, v)) lowest = std::min(lowest, g.weight(u, v) - st.beta[v]);
        }
        if (lowest >= st.alpha[u]) continue;
        st.alpha[u] = lowest;
        const int c = st.mate_u[u];
        if (c != kFree && st.alpha[u] + st.beta[c] != g.weight(u, c)) {
            st.mate_u[u] = kFree;
            st.mate_v[c] = kFree;
            freed.push_back(u);
        }
    }
    st.phases = 0;
    for (int u : freed) {
        augment_from(g, st, u);
        ++st.phases;
    }
}

} // namespace detail

// Exact min-weight perfect matching on U. O(n1^2 * n2).
inline MatchState solve_full(const BipartiteGraph& g) {
    const int n1 = g.n1();
    const int n2 = g.n2();
    MatchState st;
    st.mate_u.assign(static_cast<std::size_t>(n1), kFree);
    st.mate_v.assign(static_cast<std::size_t>(n2), kFree);
    st.alpha.assign(static_cast<std::size_t>(n1), 0);
    st.beta.assign(static_cast<std::size_t>(n2), 0);

    for (int u = 0; u < n1; ++u) {
        Weight lowest = detail::kInfDist;
        for (int v = 0; v < n2; ++v) {
            if (g.available(u, v)) lowest = std::min(lowest, g.weight(u, v));
        }
        if (lowest == detail::kInfDist) {
            throw NoPerfectMatching("u=" + std::to_string(u) + " has no available edge");
        }
        st.alpha[u] = lowest;
    }
    for (int u = 0; u < n1; ++u) detail::augment_from(g, st, u);
    st.phases = n1;
    detail::finish(g, st);
    return st;
}

// Call after g.ban(u, v). Leaves `st` untouched and throws NoPerfectMatching
// if the ban removes every perfect matching; the caller must then unban.
inline MatchState& repair_after_ban(const BipartiteGraph& g, MatchState& st, int u, int v) {
    st.phases = 0;
    if (st.mate_u[u] != v) return st;
    st.mate_u[u] = kFree;
    st.mate_v[v] = kFree;
    try {
        detail::augment_from(g, st, u);
    } catch (const NoPerfectMatching&) {
        st.mate_u[u] = v;
        st.mate_v[v] = u;
        throw;
    }
    st.phases = 1;
    detail::finish(g, st);
    return st;
}

// Call after g.unban(u, v).
inline MatchState& repair_after_unban(const BipartiteGraph& g, MatchState& st, int u, int v) {
    st.phases = 0;
    if (st.alpha[u] + st.beta[v] <= g.weight(u, v)) return st;
    const int rows[] = {u};
    detail::restore_rows(g, st, rows);
    detail::finish(g, st);
    return st;
}

// Call after unbanning every edge in `released`. Small batches are repaired
// incrementally; batches larger than n1/4 fall back to a full solve.
inline MatchState& batch_resolve(const BipartiteGraph& g, MatchState& st,
                                 std::span<const Edge> released) {
    st.phases = 0;
    if (released.empty()) return st;
    if (static_cast<int>(released.size()) * 4 > g.n1()) {
        st = solve_full(g);
        return st;
    }
    std::vector<int> rows;
    for (const Edge& e : released) {
        if (st.alpha[e.u] + st.beta[e.v] > g.weight(e.u, e.v)) rows.push_back(e.u);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    detail::restore_rows(g, st, rows);
    detail::finish(g, st);
    return st;
}

} // namespace pmmwm
