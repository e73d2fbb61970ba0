#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydcount/basis.hpp"
#include "rydcount/errors.hpp"
#include "rydcount/graph.hpp"

namespace rydcount {

enum class BasisKind { constrained, full };

inline std::string to_string(BasisKind k) {
  return k == BasisKind::constrained ? "constrained" : "full";
}

// Real symmetric sparse Hamiltonian in CSR form over either the constrained
// basis (PXP) or the full 2^n basis (Rydberg).  All energies in units with
// hbar = 1; times are quoted in units of 1/omega.
struct SparseHamiltonian {
  int dim = 0;
  BasisKind kind = BasisKind::constrained;
  double omega = 0.0;
  double v = 0.0;  // interaction strength; full basis only
  std::vector<std::size_t> row_start;  // dim + 1
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return col.size(); }

  void matvec(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    y.setZero(dim);
    for (int r = 0; r < dim; ++r) {
      std::complex<double> acc = 0;
      for (std::size_t e = row_start[static_cast<std::size_t>(r)];
           e < row_start[static_cast<std::size_t>(r) + 1]; ++e) {
        acc += val[e] * x[col[e]];
      }
      y[r] = acc;
    }
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (std::size_t e = row_start[static_cast<std::size_t>(r)];
           e < row_start[static_cast<std::size_t>(r) + 1]; ++e) {
        m(r, col[e]) = val[e];
      }
    }
    return m;
  }

  // Gershgorin bound on the spectral radius.
  double norm_bound() const {
    double bound = 0;
    for (int r = 0; r < dim; ++r) {
      double row = 0;
      for (std::size_t e = row_start[static_cast<std::size_t>(r)];
           e < row_start[static_cast<std::size_t>(r) + 1]; ++e) {
        row += std::abs(val[e]);
      }
      bound = std::max(bound, row);
    }
    return bound;
  }
};

namespace detail {

inline SparseHamiltonian from_row_entries(
    int dim, BasisKind kind, double omega, double v,
    std::vector<std::vector<std::pair<int, double>>>& rows) {
  SparseHamiltonian h;
  h.dim = dim;
  h.kind = kind;
  h.omega = omega;
  h.v = v;
  h.row_start.resize(static_cast<std::size_t>(dim) + 1, 0);
  std::size_t total = 0;
  for (int r = 0; r < dim; ++r) {
    std::sort(rows[static_cast<std::size_t>(r)].begin(), rows[static_cast<std::size_t>(r)].end());
    h.row_start[static_cast<std::size_t>(r)] = total;
    total += rows[static_cast<std::size_t>(r)].size();
  }
  h.row_start[static_cast<std::size_t>(dim)] = total;
  h.col.reserve(total);
  h.val.reserve(total);
  for (int r = 0; r < dim; ++r) {
    for (const auto& [c, x] : rows[static_cast<std::size_t>(r)]) {
      h.col.push_back(c);
      h.val.push_back(x);
    }
  }
  return h;
}

}  // namespace detail

// PXP Hamiltonian on the constrained basis: matrix element omega/2 between
// states differing in exactly one bit (both blockade-valid), zero diagonal.
inline SparseHamiltonian build_pxp(const BlockadeGraph& g, const ConstrainedBasis& basis,
                                   double omega) {
  if (!(omega > 0)) throw InvalidArgument("omega must be positive");
  if (basis.n != g.n) throw InvalidArgument("basis does not match graph");
  const auto nbr = neighbor_masks(g);
  for (std::uint64_t s : basis.states) {
    for (int i = 0; i < g.n; ++i) {
      if (((s >> i) & 1ull) && (s & nbr[static_cast<std::size_t>(i)]))
        throw InvalidArgument("basis contains a blockade-violating state");
    }
  }

  const int dim = static_cast<int>(basis.size());
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dim));
  const double coupling = omega / 2;
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t x = basis.states[static_cast<std::size_t>(a)];
    for (int i = 0; i < g.n; ++i) {
      if (x & nbr[static_cast<std::size_t>(i)]) continue;  // neighbor excited: bit frozen
      const std::uint64_t y = x ^ (1ull << i);
      const auto b = basis.index_of(y);
      if (!b) throw NumericError("single-bit flip left the constrained basis");
      rows[static_cast<std::size_t>(a)].emplace_back(static_cast<int>(*b), coupling);
    }
  }
  return detail::from_row_entries(dim, BasisKind::constrained, omega, 0.0, rows);
}

// Rydberg Hamiltonian on the full 2^n basis: diagonal v * (#edges with both
// endpoints excited), off-diagonal omega/2 between all Hamming-distance-1
// pairs.  Interactions act on graph edges only.
inline SparseHamiltonian build_rydberg(const BlockadeGraph& g, double omega, double v,
                                       int n_cap = 20) {
  if (!(omega > 0)) throw InvalidArgument("omega must be positive");
  if (g.n > n_cap)
    throw ResourceError("full basis needs n <= " + std::to_string(n_cap) + ", got " +
                        std::to_string(g.n));
  const int n = g.n;
  const std::uint64_t dim64 = 1ull << n;
  const int dim = static_cast<int>(dim64);
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dim));
  const double coupling = omega / 2;
  for (std::uint64_t x = 0; x < dim64; ++x) {
    auto& row = rows[static_cast<std::size_t>(x)];
    row.reserve(static_cast<std::size_t>(n) + 1);
    int violated = 0;
    for (const auto& [a, b] : g.edges)
      if (((x >> a) & 1ull) && ((x >> b) & 1ull)) ++violated;
    if (violated > 0) row.emplace_back(static_cast<int>(x), v * violated);
    for (int i = 0; i < n; ++i)
      row.emplace_back(static_cast<int>(x ^ (1ull << i)), coupling);
  }
  return detail::from_row_entries(dim, BasisKind::full, omega, v, rows);
}

// Heisenberg time 2*pi / (mean adjacent level spacing).  The mean adjacent
// spacing of a sorted spectrum telescopes to (max - min) / (dim - 1).
inline double heisenberg_time(const SparseHamiltonian& h) {
  if (h.dim < 2) throw InvalidArgument("heisenberg_time needs dim >= 2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.to_dense(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigenvalue computation failed");
  const double range = solver.eigenvalues()(h.dim - 1) - solver.eigenvalues()(0);
  if (!(range > 0)) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi * static_cast<double>(h.dim - 1) / range;
}

// Coordinate-list dump for cross-checking against external tools:
// header "dim nnz kind omega v", then one "i j value" line per entry.
inline void write_coo(std::ostream& out, const SparseHamiltonian& h) {
  out << h.dim << ' ' << h.nnz() << ' ' << to_string(h.kind) << ' ' << h.omega << ' '
      << h.v << '\n';
  char buf[64];
  for (int r = 0; r < h.dim; ++r) {
    for (std::size_t e = h.row_start[static_cast<std::size_t>(r)];
         e < h.row_start[static_cast<std::size_t>(r) + 1]; ++e) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, h.col[e], h.val[e]);
      out << buf;
    }
  }
}

}  // namespace rydcount
