#pragma once

#include <string>
#include <vector>

#include "rydcount/graph.hpp"

namespace rydcount {

struct NamedInstance {
  std::string name;
  BlockadeGraph graph;
};

// Punched-grid ensemble used throughout the test and benchmark corpus.
// Hole labels refer to row-major grid indices (label = iy*lx + ix).
inline std::vector<NamedInstance> punched_grid_ensemble() {
  struct Spec {
    int lx, ly;
    std::vector<int> holes;
  };
  const std::vector<Spec> specs = {
      {3, 3, {4}},           // center hole, the 8-cycle
      {3, 3, {0, 8}},        // opposite corners
      {3, 4, {5}},
      {3, 4, {1, 10}},
      {3, 5, {7}},
      {3, 5, {4, 7}},
      {3, 5, {2, 12}},
      {4, 4, {5}},
      {4, 4, {5, 10}},       // both central cells
      {4, 4, {0, 5, 15}},
      {4, 4, {3, 6, 9, 12}}, // anti-diagonal
      {4, 5, {7, 12}},
      {4, 5, {2, 9, 17}},
      {4, 5, {0, 7, 12, 19}},
      {4, 5, {5, 6, 13, 14}},
  };
  std::vector<NamedInstance> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    std::string name = "punched-" + std::to_string(s.lx) + "x" + std::to_string(s.ly);
    for (int h : s.holes) name += "-" + std::to_string(h);
    out.push_back({name, punch_grid(build_grid(s.lx, s.ly), s.holes)});
  }
  return out;
}

// Fixed desk-scale corpus: chains up to n=20, grids up to 4x5, and the
// punched ensemble.  Used by the oracle-agreement and self-reduction suites.
inline std::vector<NamedInstance> corpus_instances() {
  std::vector<NamedInstance> out;
  for (int n = 1; n <= 20; ++n)
    out.push_back({"chain-" + std::to_string(n), build_chain(n)});
  for (int lx = 1; lx <= 4; ++lx)
    for (int ly = 2; ly <= 5; ++ly)
      out.push_back({"grid-" + std::to_string(lx) + "x" + std::to_string(ly),
                     build_grid(lx, ly)});
  for (auto& inst : punched_grid_ensemble()) out.push_back(std::move(inst));
  return out;
}

}  // namespace rydcount
