#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rydcount/basis.hpp"
#include "rydcount/errors.hpp"
#include "rydcount/graph.hpp"

namespace rydcount {

using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }

// Count satisfying assignments by walking the constrained backtracking tree.
inline BigInt exact_count_bruteforce(const BlockadeGraph& g, int n_cap = 24) {
  if (g.n > n_cap)
    throw ResourceError("brute-force count requires n <= " + std::to_string(n_cap));
  if (g.n == 0) return 1;
  const auto nbr = neighbor_masks(g);
  unsigned long long count = 0;
  detail::walk_independent_sets(nbr, g.n, [&](std::uint64_t) {
    ++count;
    return true;
  });
  return BigInt(count);
}

namespace detail {

struct ColumnLayout {
  // vertex index -> (column id, bit position within column)
  std::vector<int> column;
  std::vector<int> bit;
  std::vector<std::vector<int>> members;  // per column, vertex indices
  std::vector<long long> xs;              // column x coordinate (rounded)
};

inline ColumnLayout column_layout(const BlockadeGraph& g, int width_cap) {
  if (!g.coords)
    throw InvalidArgument("transfer-matrix count needs coordinates (grid or chain)");
  ColumnLayout layout;
  layout.column.resize(static_cast<std::size_t>(g.n));
  layout.bit.resize(static_cast<std::size_t>(g.n));
  std::map<long long, std::vector<int>> by_x;
  for (int i = 0; i < g.n; ++i) {
    const double x = (*g.coords)[static_cast<std::size_t>(i)][0];
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-6)
      throw InvalidArgument("coordinates are not grid-aligned");
    by_x[static_cast<long long>(r)].push_back(i);
  }
  for (auto& [x, members] : by_x) {
    // Stable order within a column: by y coordinate.
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      return (*g.coords)[static_cast<std::size_t>(a)][1] <
             (*g.coords)[static_cast<std::size_t>(b)][1];
    });
    if (static_cast<int>(members.size()) > width_cap)
      throw ResourceError("column width " + std::to_string(members.size()) +
                          " exceeds cap " + std::to_string(width_cap));
    const int cid = static_cast<int>(layout.members.size());
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      layout.column[static_cast<std::size_t>(members[pos])] = cid;
      layout.bit[static_cast<std::size_t>(members[pos])] = static_cast<int>(pos);
    }
    layout.members.push_back(members);
    layout.xs.push_back(x);
  }
  return layout;
}

}  // namespace detail

// Exact count by transfer-matrix dynamic programming over grid columns.
// Works for chains, grids, and punched grids with column width <= width_cap;
// edges must stay within a column or between adjacent columns.
inline BigInt exact_count_dp(const BlockadeGraph& g, int width_cap = 20) {
  if (g.n == 0) return 1;
  const auto layout = detail::column_layout(g, width_cap);
  const int n_cols = static_cast<int>(layout.members.size());

  // Intra-column conflict masks and cross-column edge lists.
  std::vector<std::vector<std::pair<int, int>>> cross(static_cast<std::size_t>(n_cols));
  std::vector<std::vector<std::uint32_t>> intra(static_cast<std::size_t>(n_cols));
  for (int c = 0; c < n_cols; ++c)
    intra[static_cast<std::size_t>(c)].assign(layout.members[static_cast<std::size_t>(c)].size(), 0);
  for (const auto& [a, b] : g.edges) {
    const int ca = layout.column[static_cast<std::size_t>(a)];
    const int cb = layout.column[static_cast<std::size_t>(b)];
    const int ba = layout.bit[static_cast<std::size_t>(a)];
    const int bb = layout.bit[static_cast<std::size_t>(b)];
    if (ca == cb) {
      intra[static_cast<std::size_t>(ca)][static_cast<std::size_t>(ba)] |= 1u << bb;
      intra[static_cast<std::size_t>(ca)][static_cast<std::size_t>(bb)] |= 1u << ba;
    } else {
      const int lo = std::min(ca, cb), hi = std::max(ca, cb);
      if (layout.xs[static_cast<std::size_t>(hi)] - layout.xs[static_cast<std::size_t>(lo)] != 1)
        throw InvalidArgument("edge spans non-adjacent columns; not a grid instance");
      // Store as (bit in lo column, bit in hi column).
      cross[static_cast<std::size_t>(lo)].emplace_back(ca == lo ? ba : bb, ca == lo ? bb : ba);
    }
  }

  auto valid_masks = [&](int c) {
    const auto& conflicts = intra[static_cast<std::size_t>(c)];
    const int w = static_cast<int>(conflicts.size());
    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 0; m < (1u << w); ++m) {
      bool ok = true;
      for (int i = 0; i < w && ok; ++i)
        if (((m >> i) & 1u) && (m & conflicts[static_cast<std::size_t>(i)])) ok = false;
      if (ok) masks.push_back(m);
    }
    return masks;
  };

  std::vector<std::uint32_t> masks = valid_masks(0);
  std::vector<BigInt> weight(masks.size(), 1);
  for (int c = 1; c < n_cols; ++c) {
    const auto next_masks = valid_masks(c);
    std::vector<BigInt> next_weight(next_masks.size(), 0);
    const bool adjacent =
        layout.xs[static_cast<std::size_t>(c)] - layout.xs[static_cast<std::size_t>(c - 1)] == 1;
    // For each new-column mask, the set of previous-column bits it forbids.
    std::vector<std::uint32_t> forbidden(next_masks.size(), 0);
    if (adjacent) {
      for (std::size_t mi = 0; mi < next_masks.size(); ++mi) {
        for (const auto& [bit_prev, bit_next] : cross[static_cast<std::size_t>(c - 1)])
          if ((next_masks[mi] >> bit_next) & 1u)
            forbidden[mi] |= 1u << bit_prev;
      }
    }
    for (std::size_t mi = 0; mi < next_masks.size(); ++mi) {
      BigInt acc = 0;
      for (std::size_t pj = 0; pj < masks.size(); ++pj)
        if ((masks[pj] & forbidden[mi]) == 0) acc += weight[pj];
      next_weight[mi] = acc;
    }
    masks = next_masks;
    weight = std::move(next_weight);
  }
  BigInt total = 0;
  for (const auto& w : weight) total += w;
  return total;
}

}  // namespace rydcount
