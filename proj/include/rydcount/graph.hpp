#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rydcount/bits.hpp"
#include "rydcount/errors.hpp"

namespace rydcount {

// Blockade graph: a simple undirected graph whose edges are blockade
// constraints.  Independent sets of the graph are exactly the solutions of
// the monotone 2SAT formula with one clause (!x_i | !x_j) per edge.
//
// Vertices are addressed by index in [0, n); `labels` carries stable
// identifiers that survive induced-subgraph reductions, so results can be
// reported in the coordinates of the original instance.
struct BlockadeGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // normalized i<j, sorted
  std::vector<int> labels;                 // size n
  std::optional<std::vector<std::array<double, 2>>> coords;
  std::vector<std::vector<int>> adj;       // per index, sorted

  bool has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
  }

  std::optional<int> index_of_label(int label) const {
    for (int i = 0; i < n; ++i)
      if (labels[static_cast<std::size_t>(i)] == label) return i;
    return std::nullopt;
  }
};

inline BlockadeGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                                std::optional<std::vector<std::array<double, 2>>> coords = std::nullopt,
                                std::vector<int> labels = {}) {
  if (n < 0) throw InvalidArgument("vertex count must be non-negative");
  if (labels.empty()) {
    labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
  }
  if (static_cast<int>(labels.size()) != n)
    throw InvalidArgument("labels size must equal vertex count");
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("labels must be unique");
  }
  if (coords && static_cast<int>(coords->size()) != n)
    throw InvalidArgument("coords size must equal vertex count");

  for (auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw InvalidArgument("edge endpoint out of range");
    if (a == b) throw InvalidArgument("self-loops are not allowed");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw InvalidArgument("duplicate edges are not allowed");

  BlockadeGraph g;
  g.n = n;
  g.edges = std::move(edges);
  g.labels = std::move(labels);
  g.coords = std::move(coords);
  g.adj.assign(static_cast<std::size_t>(n), {});
  for (const auto& [a, b] : g.edges) {
    g.adj[static_cast<std::size_t>(a)].push_back(b);
    g.adj[static_cast<std::size_t>(b)].push_back(a);
  }
  return g;
}

inline bool operator==(const BlockadeGraph& a, const BlockadeGraph& b) {
  return a.n == b.n && a.edges == b.edges && a.labels == b.labels &&
         a.coords == b.coords;
}

// Per-vertex neighbor bitmasks; requires n <= 63 so states fit in a word.
inline std::vector<std::uint64_t> neighbor_masks(const BlockadeGraph& g) {
  if (g.n > 63) throw ResourceError("bitmask operations require n <= 63");
  std::vector<std::uint64_t> m(static_cast<std::size_t>(g.n), 0);
  for (const auto& [a, b] : g.edges) {
    m[static_cast<std::size_t>(a)] |= 1ull << b;
    m[static_cast<std::size_t>(b)] |= 1ull << a;
  }
  return m;
}

// ---- Assignments -----------------------------------------------------------

struct Assignment {
  std::uint64_t bits = 0;
  int n = 0;
};

inline Assignment assignment_from_string(const std::string& s) {
  return Assignment{from_bitstring(s), static_cast<int>(s.size())};
}

// True iff no edge has both endpoints set (the assignment is an independent
// set, i.e. satisfies the monotone 2SAT formula).
inline bool satisfies(const BlockadeGraph& g, const Assignment& a) {
  if (a.n != g.n)
    throw InvalidArgument("assignment length " + std::to_string(a.n) +
                          " does not match vertex count " + std::to_string(g.n));
  for (const auto& [u, v] : g.edges)
    if (((a.bits >> u) & 1ull) && ((a.bits >> v) & 1ull)) return false;
  return true;
}

// ---- Builders --------------------------------------------------------------

inline BlockadeGraph build_chain(int n) {
  if (n < 1) throw InvalidArgument("chain size must be >= 1");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  std::vector<std::array<double, 2>> coords(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = {static_cast<double>(i), 0.0};
  return make_graph(n, std::move(edges), std::move(coords));
}

// lx columns by ly rows, unit spacing, rook adjacency.  Vertex (ix, iy) has
// index iy*lx + ix and sits at coordinates (ix, iy).
inline BlockadeGraph build_grid(int lx, int ly) {
  if (lx < 1 || ly < 1) throw InvalidArgument("grid dimensions must be >= 1");
  const int n = lx * ly;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::array<double, 2>> coords(static_cast<std::size_t>(n));
  for (int iy = 0; iy < ly; ++iy) {
    for (int ix = 0; ix < lx; ++ix) {
      const int v = iy * lx + ix;
      coords[static_cast<std::size_t>(v)] = {static_cast<double>(ix), static_cast<double>(iy)};
      if (ix + 1 < lx) edges.emplace_back(v, v + 1);
      if (iy + 1 < ly) edges.emplace_back(v, v + lx);
    }
  }
  return make_graph(n, std::move(edges), std::move(coords));
}

// Induced subgraph on the given (sorted) index set; labels and coords are
// carried over.
inline BlockadeGraph induced_subgraph(const BlockadeGraph& g, const std::vector<int>& keep) {
  std::vector<int> remap(static_cast<std::size_t>(g.n), -1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    remap[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : g.edges) {
    const int ra = remap[static_cast<std::size_t>(a)];
    const int rb = remap[static_cast<std::size_t>(b)];
    if (ra >= 0 && rb >= 0) edges.emplace_back(ra, rb);
  }
  std::vector<int> labels(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    labels[i] = g.labels[static_cast<std::size_t>(keep[i])];
  std::optional<std::vector<std::array<double, 2>>> coords;
  if (g.coords) {
    coords.emplace(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      (*coords)[i] = (*g.coords)[static_cast<std::size_t>(keep[i])];
  }
  return make_graph(static_cast<int>(keep.size()), std::move(edges), std::move(coords),
                    std::move(labels));
}

// Remove the listed vertices (by label) from a grid, keeping the induced
// subgraph on the rest.
inline BlockadeGraph punch_grid(const BlockadeGraph& g, const std::vector<int>& holes) {
  std::vector<int> hole_indices;
  hole_indices.reserve(holes.size());
  for (int label : holes) {
    const auto idx = g.index_of_label(label);
    if (!idx) throw InvalidArgument("unknown hole label " + std::to_string(label));
    hole_indices.push_back(*idx);
  }
  std::sort(hole_indices.begin(), hole_indices.end());
  if (std::adjacent_find(hole_indices.begin(), hole_indices.end()) != hole_indices.end())
    throw InvalidArgument("duplicate hole label");
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(g.n) - hole_indices.size());
  std::size_t h = 0;
  for (int i = 0; i < g.n; ++i) {
    if (h < hole_indices.size() && hole_indices[h] == i) {
      ++h;
    } else {
      keep.push_back(i);
    }
  }
  return induced_subgraph(g, keep);
}

struct UnitDiskResult {
  BlockadeGraph graph;
  std::vector<std::string> warnings;
};

// Connect every pair strictly closer than the blockade radius.  Ties at
// exactly r_blockade are non-edges.
inline UnitDiskResult unit_disk_graph(const std::vector<std::array<double, 2>>& points,
                                      double r_blockade) {
  if (points.empty()) throw InvalidArgument("at least one point required");
  if (!(r_blockade > 0)) throw InvalidArgument("blockade radius must be positive");
  const int n = static_cast<int>(points.size());
  UnitDiskResult result;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = points[static_cast<std::size_t>(i)][0] - points[static_cast<std::size_t>(j)][0];
      const double dy = points[static_cast<std::size_t>(i)][1] - points[static_cast<std::size_t>(j)][1];
      const double d = std::hypot(dx, dy);
      if (d == 0.0) {
        result.warnings.push_back("vertices " + std::to_string(i) + " and " +
                                  std::to_string(j) +
                                  " share coordinates; zero distance is always blockaded");
      }
      if (d < r_blockade) edges.emplace_back(i, j);
    }
  }
  result.graph = make_graph(n, std::move(edges), points);
  return result;
}

// ---- JSON instance format --------------------------------------------------
// {"n": int, "edges": [[i,j],...], "coords": [[x,y],...] | null,
//  "labels": [int,...]}; edges sorted lexicographically.

inline void to_json(nlohmann::json& j, const BlockadeGraph& g) {
  j = nlohmann::json{{"n", g.n}, {"edges", g.edges}, {"labels", g.labels}};
  if (g.coords) {
    j["coords"] = *g.coords;
  } else {
    j["coords"] = nullptr;
  }
}

inline void from_json(const nlohmann::json& j, BlockadeGraph& g) {
  const int n = j.at("n").get<int>();
  auto edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
  std::optional<std::vector<std::array<double, 2>>> coords;
  if (j.contains("coords") && !j.at("coords").is_null())
    coords = j.at("coords").get<std::vector<std::array<double, 2>>>();
  std::vector<int> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<int>>();
  g = make_graph(n, std::move(edges), std::move(coords), std::move(labels));
}

inline std::string instance_json(const BlockadeGraph& g) {
  return nlohmann::json(g).dump();
}

// FNV-1a over the canonical JSON; used as a content digest in records.
inline std::string instance_digest(const BlockadeGraph& g) {
  const std::string s = instance_json(g);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace rydcount
