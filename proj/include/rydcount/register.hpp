#pragma once

#include <map>
#include <string>
#include <vector>

#include "rydcount/errors.hpp"
#include "rydcount/graph.hpp"

namespace rydcount {

// A register is the original instance plus the partial assignment accumulated
// by self-reduction.  The active graph is the induced subgraph on unfixed
// vertices; fixed maps original labels to assigned bits.  Values are
// immutable; reductions return new registers.
struct Register {
  BlockadeGraph original;
  BlockadeGraph active;
  std::map<int, int> fixed;
};

inline Register make_register(BlockadeGraph g) {
  Register r;
  r.original = g;
  r.active = std::move(g);
  return r;
}

inline bool is_complete(const Register& r) { return r.active.n == 0; }

namespace detail {

inline int require_active_index(const Register& r, int label) {
  const auto idx = r.active.index_of_label(label);
  if (!idx)
    throw InvalidArgument("label " + std::to_string(label) + " is not active");
  return *idx;
}

inline Register remove_indices(const Register& r, std::vector<int> drop,
                               const std::map<int, int>& new_fixed) {
  std::sort(drop.begin(), drop.end());
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(r.active.n) - drop.size());
  std::size_t d = 0;
  for (int i = 0; i < r.active.n; ++i) {
    if (d < drop.size() && drop[d] == i) {
      ++d;
    } else {
      keep.push_back(i);
    }
  }
  Register out;
  out.original = r.original;
  out.active = induced_subgraph(r.active, keep);
  out.fixed = r.fixed;
  for (const auto& [label, bit] : new_fixed) out.fixed[label] = bit;
  return out;
}

}  // namespace detail

// Fix a variable to 0: a ground-state atom constrains nothing, so the vertex
// is simply omitted from the active graph.
inline Register fix_zero(const Register& r, int label) {
  const int idx = detail::require_active_index(r, label);
  return detail::remove_indices(r, {idx}, {{label, 0}});
}

// Fix a variable to 1: the blockade forces all active neighbors to 0, so the
// closed neighborhood leaves the active graph.
inline Register fix_one(const Register& r, int label) {
  const int idx = detail::require_active_index(r, label);
  std::vector<int> drop = {idx};
  std::map<int, int> fixed = {{label, 1}};
  for (int nb : r.active.adj[static_cast<std::size_t>(idx)]) {
    drop.push_back(nb);
    fixed[r.active.labels[static_cast<std::size_t>(nb)]] = 0;
  }
  return detail::remove_indices(r, drop, fixed);
}

inline Register complete_with_zeros(const Register& r) {
  Register out;
  out.original = r.original;
  out.fixed = r.fixed;
  for (int label : r.active.labels) out.fixed[label] = 0;
  out.active = induced_subgraph(r.active, {});
  return out;
}

// Full assignment over the original instance, in original index order.
// Requires a complete register.
inline Assignment full_assignment(const Register& r) {
  if (!is_complete(r)) throw InvalidArgument("register still has active vertices");
  Assignment a;
  a.n = r.original.n;
  for (int i = 0; i < r.original.n; ++i) {
    const int label = r.original.labels[static_cast<std::size_t>(i)];
    const auto it = r.fixed.find(label);
    if (it == r.fixed.end())
      throw NumericError("fixed assignment missing label " + std::to_string(label));
    if (it->second) a.bits |= 1ull << i;
  }
  return a;
}

}  // namespace rydcount
