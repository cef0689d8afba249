#include "burst/quickshift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "burst/kernels.hpp"

namespace burst {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

void require_unit_rows(const FeatureSet& set) {
  std::vector<double> norms = kernels::row_norms(set.features);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (std::abs(norms[i] - 1.0) > 1e-6) {
      throw Error(ErrorCode::Contract,
                  "row " + std::to_string(i) + " has norm " + std::to_string(norms[i]) +
                      "; normalize the set first");
    }
  }
}

struct UnionFind {
  std::vector<std::uint32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

}  // namespace

void validate(const GroupPartition& p, std::size_t n) {
  if (p.assignments.size() != n) {
    throw Error(ErrorCode::Contract, "partition covers " + std::to_string(p.assignments.size()) +
                                         " elements, expected " + std::to_string(n));
  }
  std::vector<std::size_t> counts(p.n_q(), 0);
  for (std::uint32_t g : p.assignments) {
    if (g >= p.n_q()) throw Error(ErrorCode::Contract, "group index out of range");
    ++counts[g];
  }
  for (std::size_t g = 0; g < p.n_q(); ++g) {
    if (counts[g] == 0) throw Error(ErrorCode::Contract, "empty group " + std::to_string(g));
    if (counts[g] != p.cardinalities[g]) {
      throw Error(ErrorCode::Contract, "cardinality mismatch for group " + std::to_string(g));
    }
  }
}

std::size_t default_knn_k(std::size_t n) {
  if (n <= 1) return 0;
  auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::min(n - 1, std::max<std::size_t>(2, root));
}

KnnGraph build_knn(const FeatureSet& set, std::size_t k) {
  const std::size_t n = set.size();
  if (k < 1 || k >= n) {
    throw Error(ErrorCode::Param,
                "k must satisfy 1 <= k < n, got k=" + std::to_string(k) +
                    " for n=" + std::to_string(n));
  }
  require_unit_rows(set);
  KnnGraph graph;
  graph.dist = kernels::pairwise_sqdist(set.features);
  for (double& v : graph.dist.data()) v = std::sqrt(v);
  graph.neighbors.assign(n, {});
  graph.radii.assign(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
    const auto i = static_cast<std::size_t>(pi);
    std::vector<std::uint32_t> order(n - 1);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order[pos++] = static_cast<std::uint32_t>(j);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      double da = graph.dist(i, a);
      double db = graph.dist(i, b);
      return da < db || (da == db && a < b);
    });
    graph.neighbors[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    graph.radii[i] = graph.dist(i, graph.neighbors[i].back());
  }
  return graph;
}

std::vector<double> knn_log_density(const KnnGraph& graph, std::size_t d) {
  std::vector<double> log_density(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    log_density[i] = -static_cast<double>(d) * std::log(std::max(graph.radii[i], 1e-12));
  }
  return log_density;
}

std::vector<std::vector<std::uint32_t>> cluster_cores(const KnnGraph& graph,
                                                      std::span<const double> log_density,
                                                      double beta) {
  if (beta < 0.0 || beta >= 1.0) {
    throw Error(ErrorCode::Param, "beta must be in [0,1), got " + std::to_string(beta));
  }
  const std::size_t n = graph.size();
  if (log_density.size() != n) {
    throw Error(ErrorCode::Contract, "log-density length does not match graph");
  }
  const double log_tolerance = std::log1p(-beta);

  // Symmetric closure of the kNN lists. A strict mutual-kNN graph detaches
  // boundary points (their distance to denser points exceeds those points'
  // radii), which fabricates spurious modes; the closure keeps every
  // element reachable from its density basin.
  std::vector<std::vector<std::uint32_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j : graph.neighbors[i]) {
      adjacency[i].push_back(j);
      adjacency[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return log_density[a] > log_density[b] ||
           (log_density[a] == log_density[b] && a < b);
  });

  UnionFind uf(n);
  std::vector<std::uint32_t> mode(n, kNone);
  std::vector<bool> dominated(n, false);
  std::vector<bool> sealed(n, false);
  std::vector<bool> processed(n, false);
  std::vector<std::vector<std::uint32_t>> members(n);
  std::set<std::uint32_t> open_roots;
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> cores;

  auto seal = [&](std::uint32_t root) {
    sealed[root] = true;
    open_roots.erase(root);
    std::vector<std::uint32_t> core = members[root];
    std::sort(core.begin(), core.end());
    cores.emplace_back(mode[root], std::move(core));
  };

  auto better_mode = [&](std::uint32_t a, std::uint32_t b) {
    return log_density[a] > log_density[b] || (log_density[a] == log_density[b] && a < b);
  };

  for (std::uint32_t x : order) {
    const double level = log_density[x];
    // The sweep level just crossed below some thresholds: every open
    // undominated component whose level set is complete seals as a core.
    for (auto it = open_roots.begin(); it != open_roots.end();) {
      std::uint32_t root = *it;
      ++it;
      if (!dominated[root] && level < log_density[mode[root]] + log_tolerance) {
        seal(root);
      }
    }
    mode[x] = x;
    members[x] = {x};
    open_roots.insert(x);
    for (std::uint32_t y : adjacency[x]) {
      if (!processed[y]) continue;
      std::uint32_t ry = uf.find(y);
      std::uint32_t rx = uf.find(x);
      if (rx == ry) continue;
      if (sealed[ry]) {
        // touching a finished core: this component's mode is dominated
        dominated[rx] = true;
        continue;
      }
      std::uint32_t keep = members[rx].size() >= members[ry].size() ? rx : ry;
      std::uint32_t drop = keep == rx ? ry : rx;
      uf.parent[drop] = keep;
      members[keep].insert(members[keep].end(), members[drop].begin(), members[drop].end());
      members[drop].clear();
      members[drop].shrink_to_fit();
      mode[keep] = better_mode(mode[rx], mode[ry]) ? mode[rx] : mode[ry];
      dominated[keep] = dominated[rx] || dominated[ry];
      open_roots.erase(drop);
    }
    processed[x] = true;
  }
  for (auto it = open_roots.begin(); it != open_roots.end();) {
    std::uint32_t root = *it;
    ++it;
    if (!dominated[root]) seal(root);
  }

  std::sort(cores.begin(), cores.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<std::uint32_t>> result;
  result.reserve(cores.size());
  for (auto& [mode_index, core] : cores) result.push_back(std::move(core));
  return result;
}

GroupPartition quickshift_assign(const KnnGraph& graph,
                                 std::span<const double> log_density,
                                 const std::vector<std::vector<std::uint32_t>>& cores) {
  const std::size_t n = graph.size();
  if (cores.empty()) throw Error(ErrorCode::Contract, "no cluster cores supplied");
  std::vector<std::uint32_t> group(n, kNone);
  std::vector<std::uint32_t> core_members;
  for (std::size_t g = 0; g < cores.size(); ++g) {
    for (std::uint32_t x : cores[g]) {
      if (x >= n || group[x] != kNone) {
        throw Error(ErrorCode::Contract, "cores are not a disjoint subset of the elements");
      }
      group[x] = static_cast<std::uint32_t>(g);
      core_members.push_back(x);
    }
  }
  std::sort(core_members.begin(), core_members.end());

  std::vector<std::uint32_t> next(n, kNone);
  for (std::size_t x = 0; x < n; ++x) {
    if (group[x] != kNone) continue;
    std::uint32_t best = kNone;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || log_density[y] <= log_density[x]) continue;
      double dxy = graph.dist(x, y);
      if (dxy < best_dist) {
        best = static_cast<std::uint32_t>(y);
        best_dist = dxy;
      }
    }
    if (best == kNone) {
      // no strictly denser element: attach to the nearest core member
      for (std::uint32_t y : core_members) {
        double dxy = graph.dist(x, y);
        if (dxy < best_dist) {
          best = y;
          best_dist = dxy;
        }
      }
    }
    next[x] = best;
  }

  // chase pointer chains into cores; densities strictly increase along
  // chains so a revisit means corrupted input
  std::vector<std::uint32_t> stack;
  std::vector<char> on_stack(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (group[x] != kNone) continue;
    stack.clear();
    std::uint32_t cur = static_cast<std::uint32_t>(x);
    while (group[cur] == kNone) {
      if (on_stack[cur]) throw Error(ErrorCode::Internal, "cycle in density pointers");
      on_stack[cur] = 1;
      stack.push_back(cur);
      cur = next[cur];
    }
    for (std::uint32_t v : stack) {
      group[v] = group[cur];
      on_stack[v] = 0;
    }
  }

  GroupPartition partition;
  partition.assignments = std::move(group);
  partition.cardinalities.assign(cores.size(), 0);
  for (std::uint32_t g : partition.assignments) ++partition.cardinalities[g];
  validate(partition, n);
  return partition;
}

GroupPartition quickshiftpp(const FeatureSet& set, std::size_t k, double beta) {
  const std::size_t n = set.size();
  if (n == 0) throw Error(ErrorCode::Contract, "empty set");
  if (n == 1) {
    GroupPartition partition;
    partition.assignments = {0};
    partition.cardinalities = {1};
    return partition;
  }
  std::size_t kk = k == 0 ? default_knn_k(n) : k;
  KnnGraph graph = build_knn(set, kk);
  std::vector<double> log_density = knn_log_density(graph, set.dim());
  auto cores = cluster_cores(graph, log_density, beta);
  return quickshift_assign(graph, log_density, cores);
}

}  // namespace burst
