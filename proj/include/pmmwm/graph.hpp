#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmmwm/error.hpp"

namespace pmmwm {

// Edge weights are stored as scaled integers; see BipartiteGraph::scale().
using Weight = std::int64_t;

inline constexpr Weight kAbsent = -1;
inline constexpr int kFree = -1;

// Dense weighted bipartite graph G(U, V, E) with |U| = n1 <= n2 = |V|.
// Absent pairs hold kAbsent. Ban flags are the only mutable state after load.
class BipartiteGraph {
public:
    BipartiteGraph() = default;

    BipartiteGraph(int n1, int n2)
        : n1_(n1), n2_(n2),
          weight_(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2), kAbsent),
          banned_(weight_.size(), 0) {
        if (n1 < 1 || n2 < n1) {
            throw ParseError("graph dimensions must satisfy 1 <= n1 <= n2 (got n1=" +
                             std::to_string(n1) + ", n2=" + std::to_string(n2) + ")");
        }
    }

    int n1() const noexcept { return n1_; }
    int n2() const noexcept { return n2_; }

    bool present(int u, int v) const noexcept { return weight_[at(u, v)] != kAbsent; }
    bool banned(int u, int v) const noexcept { return banned_[at(u, v)] != 0; }
    bool available(int u, int v) const noexcept {
        const auto i = at(u, v);
        return weight_[i] != kAbsent && banned_[i] == 0;
    }

    // Raw entry; kAbsent when the pair is not an edge.
    Weight weight(int u, int v) const noexcept { return weight_[at(u, v)]; }

    void set_weight(int u, int v, Weight w) {
        if (w < 0) throw ParseError("negative weight on edge (" + std::to_string(u) + "," +
                                    std::to_string(v) + ")");
        weight_[at(u, v)] = w;
    }
    void remove_edge(int u, int v) noexcept { weight_[at(u, v)] = kAbsent; }

    void ban(int u, int v) noexcept { banned_[at(u, v)] = 1; }
    void unban(int u, int v) noexcept { banned_[at(u, v)] = 0; }
    void clear_bans() noexcept { std::fill(banned_.begin(), banned_.end(), char{0}); }

    std::size_t edge_count() const noexcept {
        return static_cast<std::size_t>(
            std::count_if(weight_.begin(), weight_.end(), [](Weight w) { return w != kAbsent; }));
    }
    std::size_t banned_count() const noexcept {
        return static_cast<std::size_t>(std::count(banned_.begin(), banned_.end(), char{1}));
    }

    Weight max_weight() const noexcept {
        Weight best = 0;
        for (Weight w : weight_) best = std::max(best, w);
        return best;
    }

    // Stored weights are the file values multiplied by scale (a power of ten).
    std::int64_t scale() const noexcept { return scale_; }
    void set_scale(std::int64_t s) noexcept { scale_ = s; }

private:
    std::size_t at(int u, int v) const noexcept {
        return static_cast<std::size_t>(u) * static_cast<std::size_t>(n2_) +
               static_cast<std::size_t>(v);
    }

    int n1_ = 0;
    int n2_ = 0;
    std::vector<Weight> weight_;
    std::vector<char> banned_;
    std::int64_t scale_ = 1;
};

// A graph together with the partition parameters m and ubar from the same file.
struct Instance {
    BipartiteGraph graph;
    int m = 1;
    int ubar = 1;
};

// part_of[u] in [0, m); at most ubar vertices per partition.
struct PartitionAssignment {
    int m = 0;
    int ubar = 0;
    std::vector<int> part_of;

    friend bool operator==(const PartitionAssignment&, const PartitionAssignment&) = default;
};

struct Solution {
    std::vector<int> mate;  // mate[u] in [0, n2)
    PartitionAssignment partition;
    Weight objective = 0;
};

// Constraint numbering follows the PMMWM model:
//   1 every u matched along an available edge, 2 no V-vertex used twice,
//   3 every u in exactly one partition, 4 partition sizes <= ubar.
struct Violation {
    int constraint = 0;
    int vertex = -1;     // offending U-vertex (or V-vertex for constraint 2)
    int partition = -1;  // offending partition for constraint 4
    std::string message;
};

inline std::vector<Weight> partition_weights(const BipartiteGraph& g, const Solution& sol) {
    std::vector<Weight> sums(static_cast<std::size_t>(sol.partition.m), 0);
    for (int u = 0; u < g.n1(); ++u) {
        sums[static_cast<std::size_t>(sol.partition.part_of[u])] +=
            g.weight(u, sol.mate[static_cast<std::size_t>(u)]);
    }
    return sums;
}

inline Weight evaluate_objective(const BipartiteGraph& g, Solution& sol) {
    const auto sums = partition_weights(g, sol);
    sol.objective = sums.empty() ? 0 : *std::max_element(sums.begin(), sums.end());
    return sol.objective;
}

inline std::optional<Violation> validate_solution(const BipartiteGraph& g, const Solution& sol) {
    const int n1 = g.n1();
    const auto& part_of = sol.partition.part_of;
    auto fail = [](int c, int vertex, int part, std::string msg) {
        return std::optional<Violation>(Violation{c, vertex, part, std::move(msg)});
    };

    if (static_cast<int>(sol.mate.size()) != n1) {
        return fail(1, -1, -1, "mate has length " + std::to_string(sol.mate.size()) +
                                   ", expected " + std::to_string(n1));
    }
    for (int u = 0; u < n1; ++u) {
        const int v = sol.mate[static_cast<std::size_t>(u)];
        if (v < 0 || v >= g.n2()) {
            return fail(1, u, -1, "u=" + std::to_string(u) + " is unmatched or out of range");
        }
        if (!g.available(u, v)) {
            return fail(1, u, -1, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                      ") is not available");
        }
    }
    std::vector<int> owner(static_cast<std::size_t>(g.n2()), kFree);
    for (int u = 0; u < n1; ++u) {
        const int v = sol.mate[static_cast<std::size_t>(u)];
        if (owner[static_cast<std::size_t>(v)] != kFree) {
            return fail(2, v, -1, "v=" + std::to_string(v) + " matched to both u=" +
                                      std::to_string(owner[static_cast<std::size_t>(v)]) +
                                      " and u=" + std::to_string(u));
        }
        owner[static_cast<std::size_t>(v)] = u;
    }
    const int m = sol.partition.m;
    if (m < 1 || static_cast<int>(part_of.size()) != n1) {
        return fail(3, -1, -1, "partition vector malformed");
    }
    std::vector<int> count(static_cast<std::size_t>(m), 0);
    for (int u = 0; u < n1; ++u) {
        const int k = part_of[static_cast<std::size_t>(u)];
        if (k < 0 || k >= m) {
            return fail(3, u, k, "u=" + std::to_string(u) + " has partition " +
                                     std::to_string(k) + " outside [0," + std::to_string(m) +
                                     ")");
        }
        ++count[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < m; ++k) {
        if (count[static_cast<std::size_t>(k)] > sol.partition.ubar) {
            return fail(4, -1, k, "partition " + std::to_string(k) + " holds " +
                                      std::to_string(count[static_cast<std::size_t>(k)]) +
                                      " vertices, capacity " +
                                      std::to_string(sol.partition.ubar));
        }
    }
    return std::nullopt;
}

// Kuhn's augmenting-path test for a perfect matching on U over available edges.
inline bool has_perfect_matching(const BipartiteGraph& g) {
    const int n1 = g.n1();
    const int n2 = g.n2();
    std::vector<int> mate_v(static_cast<std::size_t>(n2), kFree);
    std::vector<int> seen(static_cast<std::size_t>(n2), -1);

    std::function<bool(int, int)> augment = [&](int u, int stamp) -> bool {
        for (int v = 0; v < n2; ++v) {
            if (!g.available(u, v) || seen[static_cast<std::size_t>(v)] == stamp) continue;
            seen[static_cast<std::size_t>(v)] = stamp;
            const int w = mate_v[static_cast<std::size_t>(v)];
            if (w == kFree || augment(w, stamp)) {
                mate_v[static_cast<std::size_t>(v)] = u;
                return true;
            }
        }
        return false;
    };
    for (int u = 0; u < n1; ++u) {
        if (!augment(u, u)) return false;
    }
    return true;
}

namespace detail {

inline constexpr int kMaxFractionDigits = 6;

struct RawEdge {
    int u;
    int v;
    std::int64_t integral;
    std::string fraction;
    int line;
};

inline std::int64_t pow10(int k) {
    std::int64_t p = 1;
    while (k-- > 0) p *= 10;
    return p;
}

inline RawEdge parse_weight_token(const std::string& tok, int u, int v, int line) {
    const auto where = [&] { return " at line " + std::to_string(line); };
    if (tok.empty()) throw ParseError("missing weight" + where());
    if (tok[0] == '-') throw ParseError("negative weight '" + tok + "'" + where());
    const auto dot = tok.find('.');
    const std::string ip = tok.substr(0, dot);
    const std::string fp = dot == std::string::npos ? std::string{} : tok.substr(dot + 1);
    auto all_digits = [](const std::string& s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if ((ip.empty() && fp.empty()) || !all_digits(ip) || !all_digits(fp)) {
        throw ParseError("malformed weight '" + tok + "'" + where());
    }
    if (fp.size() > kMaxFractionDigits) {
        throw ParseError("weight '" + tok + "' has more than 6 fractional digits" + where());
    }
    if (ip.size() > 12) throw ParseError("weight '" + tok + "' too large" + where());
    return RawEdge{u, v, ip.empty() ? 0 : std::stoll(ip), fp, line};
}

} // namespace detail

inline Instance parse_instance(std::istream& in) {
    std::string line;
    int lineno = 0;
    bool have_header = false;
    int n1 = 0, n2 = 0, m = 0, ubar = 0;
    std::vector<detail::RawEdge> edges;

    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> n1 >> n2 >> m >> ubar)) {
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected header 'n1 n2 m ubar'");
            }
            if (n1 < 1 || n2 < n1) {
                throw ParseError("header requires 1 <= n1 <= n2");
            }
            if (m < 1 || ubar < 1) throw ParseError("header requires m >= 1 and ubar >= 1");
            have_header = true;
        } else {
            long long u = -1, v = -1;
            std::string tok;
            if (!(ls >> u >> v >> tok)) {
                throw ParseError("line " + std::to_string(lineno) + ": expected 'u v w'");
            }
            if (u < 0 || u >= n1 || v < 0 || v >= n2) {
                throw ParseError("line " + std::to_string(lineno) + ": vertex index out of range");
            }
            edges.push_back(detail::parse_weight_token(tok, static_cast<int>(u),
                                                       static_cast<int>(v), lineno));
        }
        std::string extra;
        if (ls >> extra) {
            throw ParseError("line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
        }
    }
    if (!have_header) throw ParseError("empty instance file");

    std::size_t digits = 0;
    for (const auto& e : edges) digits = std::max(digits, e.fraction.size());
    const std::int64_t scale = detail::pow10(static_cast<int>(digits));

    Instance inst{BipartiteGraph(n1, n2), m, ubar};
    inst.graph.set_scale(scale);
    for (const auto& e : edges) {
        if (inst.graph.present(e.u, e.v)) {
            throw ParseError("line " + std::to_string(e.line) + ": duplicate edge (" +
                             std::to_string(e.u) + "," + std::to_string(e.v) + ")");
        }
        std::string frac = e.fraction;
        frac.resize(digits, '0');
        const Weight w = e.integral * scale + (frac.empty() ? 0 : std::stoll(frac));
        inst.graph.set_weight(e.u, e.v, w);
    }

    if (static_cast<long long>(m) * ubar < n1) {
        throw InfeasibleInstance("m*ubar = " + std::to_string(static_cast<long long>(m) * ubar) +
                                 " < n1 = " + std::to_string(n1));
    }
    if (!has_perfect_matching(inst.graph)) {
        throw InfeasibleInstance("available edges admit no perfect matching on U");
    }
    return inst;
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open instance file '" + path + "'");
    return parse_instance(in);
}

// Renders a stored weight back in file units.
inline std::string format_weight(Weight w, std::int64_t scale) {
    if (scale == 1) return std::to_string(w);
    int digits = 0;
    for (std::int64_t s = scale; s > 1; s /= 10) ++digits;
    std::string frac = std::to_string(w % scale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = std::to_string(w / scale);
    if (!frac.empty()) out += "." + frac;
    return out;
}

inline void write_instance(std::ostream& out, const Instance& inst) {
    const auto& g = inst.graph;
    out << g.n1() << ' ' << g.n2() << ' ' << inst.m << ' ' << inst.ubar << '\n';
    for (int u = 0; u < g.n1(); ++u) {
        for (int v = 0; v < g.n2(); ++v) {
            if (g.present(u, v)) out << u << ' ' << v << ' ' << format_weight(g.weight(u, v), g.scale()) << '\n';
        }
    }
}

inline void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write instance file '" + path + "'");
    write_instance(out, inst);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace pmmwm
