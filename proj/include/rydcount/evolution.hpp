#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydcount/errors.hpp"
#include "rydcount/hamiltonian.hpp"

namespace rydcount {

struct EvolutionOptions {
  // Exact eigendecomposition below this dimension, Lanczos above.
  int exact_dim_cap = 4096;
  // Target local error per unit time for the Lanczos propagator.
  double krylov_tol_per_time = 1e-9;
  int krylov_subspace_dim = 48;
  enum class Select { automatic, exact, krylov };
  Select select = Select::automatic;
};

// Applies exp(-iHt).  Exact mode caches the eigendecomposition at
// construction; Krylov mode keeps no state, so const engines can serve
// parallel evolve calls, each owning its workspace.
class EvolutionEngine {
 public:
  enum class Method { exact, krylov };

  explicit EvolutionEngine(SparseHamiltonian h, EvolutionOptions opt = {})
      : h_(std::move(h)), opt_(opt) {
    if (h_.dim < 1) throw InvalidArgument("empty Hamiltonian");
    const bool exact = opt.select == EvolutionOptions::Select::exact ||
                       (opt.select == EvolutionOptions::Select::automatic &&
                        h_.dim <= opt.exact_dim_cap);
    method_ = exact ? Method::exact : Method::krylov;
    if (method_ == Method::exact) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_.to_dense());
      if (solver.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed");
      evals_ = solver.eigenvalues();
      evecs_ = solver.eigenvectors();
    }
  }

  Method method() const { return method_; }
  int dim() const { return h_.dim; }
  const SparseHamiltonian& hamiltonian() const { return h_; }

  const Eigen::VectorXd& eigenvalues() const {
    if (method_ != Method::exact)
      throw InvalidArgument("eigenvalues cached only in exact mode");
    return evals_;
  }

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const {
    if (psi.size() != h_.dim)
      throw InvalidArgument("state dimension " + std::to_string(psi.size()) +
                            " does not match Hamiltonian dimension " +
                            std::to_string(h_.dim));
    if (t < 0) throw InvalidArgument("evolution time must be >= 0");
    if (t == 0) return psi;
    if (method_ == Method::exact) return exact_evolve(psi, t);
    return krylov_evolve(psi, t);
  }

  Eigen::VectorXcd evolve_basis_state(int index, double t) const {
    if (index < 0 || index >= h_.dim) throw InvalidArgument("basis index out of range");
    if (method_ == Method::exact) {
      // <k|psi0> is just a row of the (real) eigenvector matrix.
      const Eigen::VectorXd c = evecs_.row(index);
      Eigen::VectorXd cre(h_.dim), cim(h_.dim);
      for (int k = 0; k < h_.dim; ++k) {
        const double ph = -evals_[k] * t;
        cre[k] = c[k] * std::cos(ph);
        cim[k] = c[k] * std::sin(ph);
      }
      Eigen::VectorXcd out(h_.dim);
      out.real() = evecs_ * cre;
      out.imag() = evecs_ * cim;
      return out;
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(h_.dim);
    psi[index] = 1.0;
    return evolve(psi, t);
  }

  // Amplitudes for one initial basis state at many times, one column per
  // time.  Exact mode runs as two real GEMMs; callers should chunk the time
  // list to bound memory.
  Eigen::MatrixXcd evolve_basis_state_batch(int index, std::span<const double> times) const {
    if (index < 0 || index >= h_.dim) throw InvalidArgument("basis index out of range");
    const int nt = static_cast<int>(times.size());
    if (method_ != Method::exact) {
      Eigen::MatrixXcd out(h_.dim, nt);
      for (int j = 0; j < nt; ++j) out.col(j) = evolve_basis_state(index, times[static_cast<std::size_t>(j)]);
      return out;
    }
    const Eigen::VectorXd c = evecs_.row(index);
    Eigen::MatrixXd pre(h_.dim, nt), pim(h_.dim, nt);
    for (int j = 0; j < nt; ++j) {
      const double t = times[static_cast<std::size_t>(j)];
      for (int k = 0; k < h_.dim; ++k) {
        const double ph = -evals_[k] * t;
        pre(k, j) = c[k] * std::cos(ph);
        pim(k, j) = c[k] * std::sin(ph);
      }
    }
    Eigen::MatrixXcd out(h_.dim, nt);
    out.real() = evecs_ * pre;
    out.imag() = evecs_ * pim;
    return out;
  }

  double survival_probability(const Eigen::VectorXcd& psi0, double t) const {
    if (psi0.size() != h_.dim) throw InvalidArgument("state dimension mismatch");
    if (t < 0) throw InvalidArgument("evolution time must be >= 0");
    if (method_ == Method::exact) {
      const Eigen::VectorXd w = spectral_weights(psi0);
      return survival_from_weights(w, t);
    }
    const Eigen::VectorXcd psi_t = evolve(psi0, t);
    const std::complex<double> amp = psi0.dot(psi_t);
    return std::norm(amp);
  }

  // |<psi0|k>|^2 weights; survival is a pure phase sum over these.
  Eigen::VectorXd spectral_weights(const Eigen::VectorXcd& psi0) const {
    if (method_ != Method::exact)
      throw InvalidArgument("spectral weights need exact mode");
    const Eigen::VectorXd cre = evecs_.transpose() * psi0.real();
    const Eigen::VectorXd cim = evecs_.transpose() * psi0.imag();
    return cre.array().square() + cim.array().square();
  }

  double survival_from_weights(const Eigen::VectorXd& w, double t) const {
    std::complex<double> amp = 0;
    for (int k = 0; k < h_.dim; ++k) {
      const double ph = -evals_[k] * t;
      amp += w[k] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return std::norm(amp);
  }

  double heisenberg_time() const {
    if (method_ == Method::exact) {
      const double range = evals_[h_.dim - 1] - evals_[0];
      if (!(range > 0)) return std::numeric_limits<double>::infinity();
      return 2.0 * std::numbers::pi * static_cast<double>(h_.dim - 1) / range;
    }
    return rydcount::heisenberg_time(h_);
  }

 private:
  Eigen::VectorXcd exact_evolve(const Eigen::VectorXcd& psi, double t) const {
    const Eigen::VectorXd cre = evecs_.transpose() * psi.real();
    const Eigen::VectorXd cim = evecs_.transpose() * psi.imag();
    Eigen::VectorXd rre(h_.dim), rim(h_.dim);
    for (int k = 0; k < h_.dim; ++k) {
      const double ph = -evals_[k] * t;
      const double cph = std::cos(ph), sph = std::sin(ph);
      rre[k] = cre[k] * cph - cim[k] * sph;
      rim[k] = cre[k] * sph + cim[k] * cph;
    }
    Eigen::VectorXcd out(h_.dim);
    out.real() = evecs_ * rre;
    out.imag() = evecs_ * rim;
    return out;
  }

  // Lanczos propagator with full reorthogonalization.  Each outer step builds
  // one Krylov subspace, then takes the largest substep whose a-posteriori
  // error estimate beta_next * |last component| stays below tol * dt.  The
  // substep is a unitary rotation within the subspace, so norms are preserved
  // to rounding even when the trajectory error is larger.
  Eigen::VectorXcd krylov_evolve(const Eigen::VectorXcd& psi, double t) const {
    const int m_max = std::min(opt_.krylov_subspace_dim, h_.dim);
    const double tol = opt_.krylov_tol_per_time;
    const double scale = std::max(h_.norm_bound(), 1e-300);

    Eigen::VectorXcd cur = psi;
    double remaining = t;
    while (remaining > 0) {
      const double beta0 = cur.norm();
      if (beta0 == 0) return cur;

      Eigen::MatrixXcd basis(h_.dim, m_max);
      Eigen::VectorXd alpha(m_max), beta(m_max);
      basis.col(0) = cur / beta0;
      int m = 0;
      double beta_next = 0;
      Eigen::VectorXcd w(h_.dim);
      for (int j = 0; j < m_max; ++j) {
        h_.matvec(basis.col(j), w);
        alpha[j] = w.dot(basis.col(j)).real();
        w -= alpha[j] * basis.col(j);
        if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
        // Full reorthogonalization, two passes.
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
        m = j + 1;
        beta_next = w.norm();
        if (beta_next < 1e-13 * scale) {
          beta_next = 0;  // invariant subspace: result exact for any dt
          break;
        }
        if (j + 1 < m_max) {
          beta[j] = beta_next;
          basis.col(j + 1) = w / beta_next;
        }
      }

      Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
      for (int j = 0; j < m; ++j) {
        tmat(j, j) = alpha[j];
        if (j + 1 < m) tmat(j, j + 1) = tmat(j + 1, j) = beta[j];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tmat);
      if (solver.info() != Eigen::Success) throw NumericError("Lanczos eigensolve failed");
      const Eigen::MatrixXd& q = solver.eigenvectors();
      const Eigen::VectorXd& theta = solver.eigenvalues();
      const Eigen::VectorXd q0 = q.row(0);

      auto subspace_coeffs = [&](double dt) {
        Eigen::VectorXcd y(m);
        for (int r = 0; r < m; ++r) {
          std::complex<double> acc = 0;
          for (int k = 0; k < m; ++k) {
            const double ph = -theta[k] * dt;
            acc += q(r, k) * q0[k] * std::complex<double>(std::cos(ph), std::sin(ph));
          }
          y[r] = acc;
        }
        return y;
      };

      double dt = remaining;
      Eigen::VectorXcd y = subspace_coeffs(dt);
      if (beta_next > 0) {
        while (beta_next * std::abs(y[m - 1]) > tol * dt) {
          dt *= 0.5;
          if (dt < 1e-12 * std::max(t, 1.0))
            throw NumericError("Krylov step size underflow");
          y = subspace_coeffs(dt);
        }
      }
      cur = basis.leftCols(m) * (beta0 * y);
      remaining -= dt;
    }
    return cur;
  }

  SparseHamiltonian h_;
  EvolutionOptions opt_;
  Method method_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

inline double averaged_survival(const EvolutionEngine& engine, const Eigen::VectorXcd& psi0,
                                std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("averaged_survival needs at least one time");
  double total = 0;
  if (engine.method() == EvolutionEngine::Method::exact) {
    const Eigen::VectorXd w = engine.spectral_weights(psi0);
    for (double t : times) total += engine.survival_from_weights(w, t);
  } else {
    for (double t : times) total += engine.survival_probability(psi0, t);
  }
  return total / static_cast<double>(times.size());
}

struct ExpFit {
  double alpha = 0;
  double beta = 0;
  double residual = 0;  // rms of log-residuals
};

// Least squares fit of ln(value) = -alpha * n - beta.
inline ExpFit fit_exponential(std::span<const int> ns, std::span<const double> values) {
  if (ns.size() != values.size()) throw InvalidArgument("size mismatch");
  const std::size_t m = ns.size();
  if (m < 2) throw InvalidArgument("fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(values[i] > 0)) throw InvalidArgument("fit values must be positive");
    const double x = static_cast<double>(ns[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (denom == 0) throw InvalidArgument("degenerate fit abscissae");
  const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(m);
  ExpFit fit;
  fit.alpha = -slope;
  fit.beta = -intercept;
  double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = -fit.alpha * static_cast<double>(ns[i]) - fit.beta;
    const double r = std::log(values[i]) - pred;
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> values;
};

struct RampDipReport {
  SurvivalCurve curve;
  bool has_dip = false;
  double t_dip = 0;
  double s_dip = 1;
  double long_time_mean = 1;
  // First time after the dip where the 1/omega-window mean of the curve holds
  // within a factor 2 of the [100, 1000] mean for two consecutive windows.
  // Pointwise containment never happens for chaotic curves (interference
  // zeros occur in every window), so the window mean is the settled quantity.
  std::optional<double> t_settle;
};

inline RampDipReport ramp_dip_scan(const EvolutionEngine& engine,
                                   const Eigen::VectorXcd& psi0,
                                   std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time grid must ascend");

  RampDipReport report;
  report.curve.times.assign(t_grid.begin(), t_grid.end());
  report.curve.values.reserve(t_grid.size());
  std::optional<Eigen::VectorXd> weights;
  if (engine.method() == EvolutionEngine::Method::exact)
    weights = engine.spectral_weights(psi0);
  for (double t : t_grid) {
    const double s = weights ? engine.survival_from_weights(*weights, t)
                             : engine.survival_probability(psi0, t);
    report.curve.values.push_back(s);
  }

  // Long-time reference over a fixed deterministic grid in [100, 1000].
  {
    std::vector<double> ref(256);
    for (std::size_t i = 0; i < ref.size(); ++i)
      ref[i] = 100.0 + 900.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(ref.size());
    report.long_time_mean = averaged_survival(engine, psi0, ref);
  }

  std::size_t dip_idx = 0;
  for (std::size_t i = 1; i < report.curve.values.size(); ++i)
    if (report.curve.values[i] < report.curve.values[dip_idx]) dip_idx = i;
  report.t_dip = report.curve.times[dip_idx];
  report.s_dip = report.curve.values[dip_idx];
  report.has_dip = report.s_dip < 0.5;
  if (!report.has_dip) return report;

  const double lo = report.long_time_mean / 2.0;
  const double hi = report.long_time_mean * 2.0;
  const auto& ts = report.curve.times;
  const auto& vs = report.curve.values;
  auto window_mean = [&](std::size_t start, double t0) -> std::optional<double> {
    double acc = 0;
    std::size_t count = 0;
    for (std::size_t j = start; j < ts.size(); ++j) {
      if (ts[j] >= t0 + 1.0) return count ? std::optional<double>(acc / count) : std::nullopt;
      acc += vs[j];
      ++count;
    }
    return std::nullopt;  // grid ends before the window does
  };
  for (std::size_t i = dip_idx; i < ts.size(); ++i) {
    const auto first = window_mean(i, ts[i]);
    if (!first || *first < lo || *first > hi) continue;
    std::size_t j = i;
    while (j < ts.size() && ts[j] < ts[i] + 1.0) ++j;
    const auto second = window_mean(j, ts[i] + 1.0);
    if (second && *second >= lo && *second <= hi) {
      report.t_settle = ts[i];
      break;
    }
  }
  return report;
}

}  // namespace rydcount
