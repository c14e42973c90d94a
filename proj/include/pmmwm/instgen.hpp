#pragma once

// Seeded benchmark instance generator.
//
// Feasibility is guaranteed by planting a random perfect matching on U before
// sampling the remaining edges. Two weight models:
//   INDEPENDENT  w ~ U{1..w_max}
//   CONSISTENT   w = round(a_u * b_v * (1 + eps)), a_u, b_v ~ U[1, sqrt(w_max)],
//                eps ~ U[-0.1, 0.1], clamped to [1, w_max]
// so consistent instances are close to rank one: a row that is cheap on one
// V-vertex tends to be cheap on all of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmmwm/error.hpp"
#include "pmmwm/graph.hpp"

namespace pmmwm {

enum class WeightModel { Consistent, Independent };

inline std::string to_string(WeightModel wm) {
    return wm == WeightModel::Consistent ? "consistent" : "independent";
}

inline WeightModel parse_weight_model(const std::string& s) {
    if (s == "consistent" || s == "CONSISTENT") return WeightModel::Consistent;
    if (s == "independent" || s == "INDEPENDENT") return WeightModel::Independent;
    throw SpecInvalid("unknown weight model '" + s + "'");
}

struct InstanceSpec {
    int n1 = 10;
    int n2 = 10;
    int m = 2;
    int ubar = 5;
    double density = 1.0;
    WeightModel weight_model = WeightModel::Independent;
    Weight w_max = 100;
    std::uint64_t seed = 1;

    void validate() const {
        if (n1 < 1 || n2 < n1) throw SpecInvalid("instance spec requires 1 <= n1 <= n2");
        if (m < 1 || ubar < 1 || static_cast<long long>(m) * ubar < n1) {
            throw SpecInvalid("instance spec requires m*ubar >= n1");
        }
        if (!(density > 0.0 && density <= 1.0)) throw SpecInvalid("density must lie in (0, 1]");
        if (w_max < 1) throw SpecInvalid("w_max must be >= 1");
    }
};

// Random draws happen in a fixed order (planted permutation, a_u, b_v, then
// per pair row-major: presence, weight) so output depends only on the InstanceSpec.
inline Instance generate(const InstanceSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    std::vector<int> planted(static_cast<std::size_t>(spec.n2));
    std::iota(planted.begin(), planted.end(), 0);
    std::shuffle(planted.begin(), planted.end(), rng);

    const double root = std::sqrt(static_cast<double>(spec.w_max));
    std::uniform_real_distribution<double> factor(1.0, root);
    std::vector<double> a(static_cast<std::size_t>(spec.n1)), b(static_cast<std::size_t>(spec.n2));
    if (spec.weight_model == WeightModel::Consistent) {
        for (auto& x : a) x = factor(rng);
        for (auto& x : b) x = factor(rng);
    }

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Weight> uniform_w(1, spec.w_max);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);

    Instance inst{BipartiteGraph(spec.n1, spec.n2), spec.m, spec.ubar};
    for (int u = 0; u < spec.n1; ++u) {
        for (int v = 0; v < spec.n2; ++v) {
            const bool keep = coin(rng) < spec.density;
            if (!keep && planted[u] != v) continue;
            Weight w;
            if (spec.weight_model == WeightModel::Independent) {
                w = uniform_w(rng);
            } else {
                const double raw = a[u] * b[v] * (1.0 + noise(rng));
                w = std::clamp<Weight>(static_cast<Weight>(std::llround(raw)), 1, spec.w_max);
            }
            inst.graph.set_weight(u, v, w);
        }
    }
    return inst;
}

struct BenchmarkGroup {
    std::string name;
    WeightModel weight_model;
    double density;
};

inline const std::vector<BenchmarkGroup>& benchmark_groups() {
    static const std::vector<BenchmarkGroup> groups = {
        {"consistent-dense", WeightModel::Consistent, 1.0},
        {"consistent-sparse", WeightModel::Consistent, 0.1},
        {"independent-dense", WeightModel::Independent, 1.0},
        {"independent-sparse", WeightModel::Independent, 0.1},
    };
    return groups;
}

inline const BenchmarkGroup& find_group(const std::string& name) {
    for (const auto& g : benchmark_groups()) {
        if (g.name == name) return g;
    }
    throw SpecInvalid("unknown benchmark group '" + name + "'");
}

inline constexpr int kBenchmarkSizes[] = {50, 100, 200, 500};
inline constexpr int kBenchmarkPartitions[] = {5, 10, 20};
inline constexpr int kBenchmarkSeeds = 5;
inline constexpr Weight kBenchmarkWMax = 100;

inline int benchmark_capacity(int n1, int m) {
    return static_cast<int>(std::ceil(1.2 * static_cast<double>(n1) / static_cast<double>(m)));
}

struct ManifestRow {
    std::string file;
    InstanceSpec spec;
};

inline const char* kManifestHeader = "file,n1,n2,m,ubar,density,model,w_max,seed";

inline std::string manifest_line(const ManifestRow& r) {
    std::ostringstream os;
    os << r.file << ',' << r.spec.n1 << ',' << r.spec.n2 << ',' << r.spec.m << ',' << r.spec.ubar << ','
       << r.spec.density << ',' << to_string(r.spec.weight_model) << ',' << r.spec.w_max << ','
       << r.spec.seed;
    return os.str();
}

// Specs of one benchmark group: every (n1, m, seed) cell of the sweep.
inline std::vector<ManifestRow> benchmark_specs(const BenchmarkGroup& group, std::size_t group_index) {
    std::vector<ManifestRow> rows;
    std::uint64_t serial = 0;
    for (int n1 : kBenchmarkSizes) {
        for (int m : kBenchmarkPartitions) {
            for (int s = 0; s < kBenchmarkSeeds; ++s) {
                InstanceSpec spec;
                spec.n1 = n1;
                spec.n2 = n1;
                spec.m = m;
                spec.ubar = benchmark_capacity(n1, m);
                spec.density = group.density;
                spec.weight_model = group.weight_model;
                spec.w_max = kBenchmarkWMax;
                spec.seed = 1'000'000ULL * (group_index + 1) + serial++;
                rows.push_back({group.name + "_n" + std::to_string(n1) + "_m" + std::to_string(m) +
                                    "_s" + std::to_string(s) + ".txt",
                                spec});
            }
        }
    }
    return rows;
}

// Writes all instances of `group_name` plus manifest.csv into out_dir.
inline std::vector<ManifestRow> generate_benchmark(const std::string& group_name,
                                                   const std::filesystem::path& out_dir) {
    const auto& groups = benchmark_groups();
    const auto& group = find_group(group_name);
    const auto index = static_cast<std::size_t>(&group - groups.data());
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir.string() + "': " + ec.message());

    auto rows = benchmark_specs(group, index);
    std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary);
    if (!manifest) throw IoError("cannot write manifest in '" + out_dir.string() + "'");
    manifest << kManifestHeader << '\n';
    for (const auto& row : rows) {
        save_instance((out_dir / row.file).string(), generate(row.spec));
        manifest << manifest_line(row) << '\n';
    }
    if (!manifest) throw IoError("manifest write failed");
    return rows;
}

} // namespace pmmwm
