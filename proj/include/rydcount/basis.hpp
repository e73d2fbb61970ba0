#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydcount/errors.hpp"
#include "rydcount/graph.hpp"

namespace rydcount {

inline constexpr std::size_t default_basis_cap = 2'000'000;

// Ordered enumeration of all blockade-satisfying bitstrings (independent
// sets), ascending by numeric value.  The all-zeros state is always index 0.
struct ConstrainedBasis {
  int n = 0;
  std::vector<std::uint64_t> states;

  std::size_t size() const { return states.size(); }

  std::optional<std::size_t> index_of(std::uint64_t mask) const {
    const auto it = std::lower_bound(states.begin(), states.end(), mask);
    if (it == states.end() || *it != mask) return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
  }

  bool contains(std::uint64_t mask) const { return index_of(mask).has_value(); }
};

namespace detail {

// Walk the constrained backtracking tree; assigning bits from the top index
// down with the 0-branch first visits leaves in ascending numeric order at
// cost O(|X| * n).  Visitor returns false to abort the walk.
template <typename Visitor>
inline void walk_independent_sets(const std::vector<std::uint64_t>& nbr, int n,
                                  Visitor&& visit) {
  std::vector<std::pair<int, std::uint64_t>> stack;
  stack.emplace_back(n - 1, 0);
  while (!stack.empty()) {
    const auto [i, mask] = stack.back();
    stack.pop_back();
    if (i < 0) {
      if (!visit(mask)) return;
      continue;
    }
    // Push the 1-branch first so the 0-branch is popped (and emitted) first.
    if ((mask & nbr[static_cast<std::size_t>(i)]) == 0)
      stack.emplace_back(i - 1, mask | (1ull << i));
    stack.emplace_back(i - 1, mask);
  }
}

}  // namespace detail

inline ConstrainedBasis enumerate_solutions(const BlockadeGraph& g,
                                            std::size_t max_states = default_basis_cap) {
  const auto nbr = neighbor_masks(g);
  ConstrainedBasis basis;
  basis.n = g.n;
  bool over = false;
  detail::walk_independent_sets(nbr, g.n, [&](std::uint64_t mask) {
    if (basis.states.size() >= max_states) {
      over = true;
      return false;
    }
    basis.states.push_back(mask);
    return true;
  });
  if (over) {
    // Report |X| when cheaply countable, else a lower bound.
    std::size_t count = 0;
    const std::size_t count_limit = 16 * max_states;
    detail::walk_independent_sets(nbr, g.n, [&](std::uint64_t) {
      return ++count < count_limit;
    });
    const std::string size_text = count < count_limit
                                      ? std::to_string(count)
                                      : "more than " + std::to_string(count);
    throw ResourceError("constrained basis has " + size_text +
                        " states, exceeding the cap of " + std::to_string(max_states));
  }
  return basis;
}

}  // namespace rydcount
