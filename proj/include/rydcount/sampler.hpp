#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rydcount/basis.hpp"
#include "rydcount/bits.hpp"
#include "rydcount/errors.hpp"
#include "rydcount/evolution.hpp"
#include "rydcount/rng.hpp"

namespace rydcount {

enum class Protocol { fi, ff, practical_ff };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::fi: return "fi";
    case Protocol::ff: return "ff";
    case Protocol::practical_ff: return "pff";
  }
  return "fi";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "fi") return Protocol::fi;
  if (s == "ff") return Protocol::ff;
  if (s == "pff") return Protocol::practical_ff;
  throw InvalidArgument("unknown protocol '" + s + "' (expected fi|ff|pff)");
}

struct SamplerConfig {
  double t_min = 10.0;   // units of 1/omega
  double t_max = 1000.0;
  long long n_samp = 1;
  Protocol protocol = Protocol::fi;
  int k = 1;                      // feed-forward step count
  long long shots_per_step = 1;   // practical FF only
  std::uint64_t seed = 0;
  bool enforce_heisenberg_spacing = false;

  void validate() const {
    if (!(t_min >= 0)) throw InvalidArgument("t_min must be >= 0");
    if (!(t_max >= t_min)) throw InvalidArgument("t_max must be >= t_min");
    if (n_samp < 1) throw InvalidArgument("n_samp must be >= 1");
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (shots_per_step < 1) throw InvalidArgument("shots_per_step must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const SamplerConfig& cfg) {
  j = nlohmann::json{{"t_min", cfg.t_min},
                     {"t_max", cfg.t_max},
                     {"n_samp", cfg.n_samp},
                     {"protocol", to_string(cfg.protocol)},
                     {"k", cfg.k},
                     {"shots_per_step", cfg.shots_per_step},
                     {"enforce_heisenberg_spacing", cfg.enforce_heisenberg_spacing}};
}

// Measured bitstring multiset.
struct SampleSet {
  int n_bits = 0;
  std::map<std::uint64_t, long long> counts;
  long long total = 0;

  void add(std::uint64_t mask, long long c = 1) {
    counts[mask] += c;
    total += c;
  }
};

inline nlohmann::json sample_set_to_json(const SampleSet& s, const SamplerConfig& cfg) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [mask, c] : s.counts) counts[to_bitstring(mask, s.n_bits)] = c;
  return nlohmann::json{{"counts", counts},
                        {"total", s.total},
                        {"config", cfg},
                        {"seed", cfg.seed}};
}

struct DistributionStats {
  Eigen::VectorXd probs;  // basis order
  double eta = 0;
  std::size_t support_size = 0;
};

// Eta = total variation distance from uniform over the solution set.
inline double non_uniformity(const Eigen::VectorXd& probs, std::size_t basis_size) {
  if (static_cast<std::size_t>(probs.size()) != basis_size)
    throw InvalidArgument("probability vector does not match basis size");
  const double u = 1.0 / static_cast<double>(basis_size);
  double acc = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) acc += std::abs(probs[i] - u);
  return acc / 2.0;
}

inline double non_uniformity(const SampleSet& s, const ConstrainedBasis& basis) {
  if (s.total <= 0) throw InvalidArgument("empty sample set");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [mask, c] : s.counts) {
    const auto idx = basis.index_of(mask);
    if (!idx)
      throw InvalidArgument("invalid sample: bitstring " + to_bitstring(mask, s.n_bits) +
                            " is not a solution");
    probs[static_cast<Eigen::Index>(*idx)] =
        static_cast<double>(c) / static_cast<double>(s.total);
  }
  return non_uniformity(probs, basis.size());
}

// n_samp i.i.d. uniform draws from [t_min, t_max].  With Heisenberg spacing
// enabled, draws are rejection-resampled until every pair is at least
// t_heisenberg apart (pairwise reading, the stricter one).
inline std::vector<double> draw_times(const SamplerConfig& cfg, double t_heisenberg = 0.0) {
  cfg.validate();
  RngStream stream(derive_seed(cfg.seed, Stream::times));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(cfg.n_samp));
  if (!cfg.enforce_heisenberg_spacing) {
    for (long long i = 0; i < cfg.n_samp; ++i)
      times.push_back(stream.uniform(cfg.t_min, cfg.t_max));
    return times;
  }
  const double window = cfg.t_max - cfg.t_min;
  if (static_cast<double>(cfg.n_samp) * t_heisenberg > window)
    throw InvalidArgument(
        "Heisenberg spacing infeasible: n_samp * t_H = " +
        std::to_string(static_cast<double>(cfg.n_samp) * t_heisenberg) +
        " exceeds the window " + std::to_string(window) +
        "; enlarge [t_min, t_max] or reduce n_samp");
  std::vector<double> sorted;
  for (long long i = 0; i < cfg.n_samp; ++i) {
    double t = 0;
    bool ok = false;
    for (int attempt = 0; attempt < 100000; ++attempt) {
      t = stream.uniform(cfg.t_min, cfg.t_max);
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
      const bool clash = (it != sorted.end() && *it - t < t_heisenberg) ||
                         (it != sorted.begin() && t - *(it - 1) < t_heisenberg);
      if (!clash) {
        sorted.insert(it, t);
        ok = true;
        break;
      }
    }
    if (!ok)
      throw NumericError("Heisenberg-spaced rejection sampling failed to converge");
    times.push_back(t);
  }
  return times;
}

namespace detail {

inline void cumulative_probs(const Eigen::MatrixXcd& amps, int col, std::vector<double>& cum) {
  const Eigen::Index dim = amps.rows();
  cum.resize(static_cast<std::size_t>(dim));
  double acc = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    acc += std::norm(amps(i, col));
    cum[static_cast<std::size_t>(i)] = acc;
  }
}

inline void cumulative_probs(const Eigen::VectorXcd& amps, std::vector<double>& cum) {
  const Eigen::Index dim = amps.size();
  cum.resize(static_cast<std::size_t>(dim));
  double acc = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    acc += std::norm(amps[i]);
    cum[static_cast<std::size_t>(i)] = acc;
  }
}

}  // namespace detail

// Fixed-input protocol: each sample evolves |0...0> to its own random time
// and measures once.  Constrained-basis evolution cannot leak, so every
// sample satisfies the instance by construction.
inline SampleSet ryd_samp_fi(const EvolutionEngine& engine, const ConstrainedBasis& basis,
                             const SamplerConfig& cfg) {
  cfg.validate();
  if (engine.dim() != static_cast<int>(basis.size()))
    throw InvalidArgument("engine dimension does not match basis");
  const double t_h = cfg.enforce_heisenberg_spacing ? engine.heisenberg_time() : 0.0;
  const std::vector<double> times = draw_times(cfg, t_h);
  RngStream measure(derive_seed(cfg.seed, Stream::measure));

  SampleSet out;
  out.n_bits = basis.n;
  const std::size_t chunk = 256;
  std::vector<double> cum;
  for (std::size_t start = 0; start < times.size(); start += chunk) {
    const std::size_t len = std::min(chunk, times.size() - start);
    const Eigen::MatrixXcd amps = engine.evolve_basis_state_batch(
        0, std::span<const double>(times.data() + start, len));
    for (std::size_t j = 0; j < len; ++j) {
      detail::cumulative_probs(amps, static_cast<int>(j), cum);
      const std::size_t idx = draw_cumulative(cum, measure.uniform(0.0, 1.0));
      out.add(basis.states[idx]);
    }
  }
  return out;
}

// Exact per-time-averaged output distribution of the FI protocol,
// D(x) = mean over times of |<x|U(t)|0...0>|^2.
inline DistributionStats effective_distribution_fi(const EvolutionEngine& engine,
                                                   const ConstrainedBasis& basis,
                                                   std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("at least one time required");
  if (engine.dim() != static_cast<int>(basis.size()))
    throw InvalidArgument("engine dimension does not match basis");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(engine.dim());
  const std::size_t chunk = 256;
  for (std::size_t start = 0; start < times.size(); start += chunk) {
    const std::size_t len = std::min(chunk, times.size() - start);
    const Eigen::MatrixXcd amps =
        engine.evolve_basis_state_batch(0, times.subspan(start, len));
    acc += amps.cwiseAbs2().rowwise().sum();
  }
  DistributionStats stats;
  stats.probs = acc / static_cast<double>(times.size());
  stats.eta = non_uniformity(stats.probs, basis.size());
  stats.support_size = 0;
  for (Eigen::Index i = 0; i < stats.probs.size(); ++i)
    if (stats.probs[i] > 0) ++stats.support_size;
  return stats;
}

inline nlohmann::json distribution_to_json(const DistributionStats& stats,
                                           const ConstrainedBasis& basis) {
  nlohmann::json probs = nlohmann::json::object();
  for (std::size_t i = 0; i < basis.size(); ++i)
    probs[to_bitstring(basis.states[i], basis.n)] = stats.probs[static_cast<Eigen::Index>(i)];
  return nlohmann::json{{"probs", probs},
                        {"eta", stats.eta},
                        {"support_size", stats.support_size}};
}

struct FeedForwardRun {
  SampleSet samples;                    // all k measurements
  std::vector<std::uint64_t> trajectory;  // measured bitstrings in order
  std::vector<double> times;
};

// Feed-forward protocol: k chained evolutions, each starting from the
// bitstring measured at the previous step (step 1 from all-zeros).
inline FeedForwardRun ryd_samp_ff(const EvolutionEngine& engine, const ConstrainedBasis& basis,
                                  const SamplerConfig& cfg) {
  cfg.validate();
  if (engine.dim() != static_cast<int>(basis.size()))
    throw InvalidArgument("engine dimension does not match basis");
  RngStream times_stream(derive_seed(cfg.seed, Stream::times));
  RngStream measure(derive_seed(cfg.seed, Stream::measure));

  FeedForwardRun run;
  run.samples.n_bits = basis.n;
  std::size_t cur = 0;  // all-zeros index
  std::vector<double> cum;
  for (int step = 0; step < cfg.k; ++step) {
    const double t = times_stream.uniform(cfg.t_min, cfg.t_max);
    run.times.push_back(t);
    const Eigen::VectorXcd amps = engine.evolve_basis_state(static_cast<int>(cur), t);
    detail::cumulative_probs(amps, cum);
    const std::size_t idx = draw_cumulative(cum, measure.uniform(0.0, 1.0));
    run.samples.add(basis.states[idx]);
    run.trajectory.push_back(basis.states[idx]);
    cur = idx;
  }
  return run;
}

struct PracticalFfRun {
  SampleSet samples;                        // union multiset of all shots
  std::vector<std::uint64_t> initial_states;  // realized initial state per step
  std::vector<double> times;
};

// Practical feed-forward: at each of k steps take shots_per_step
// measurements of the same evolved state at one random time; one uniformly
// chosen shot becomes the next initial state and every shot is retained.
inline PracticalFfRun practical_ff(const EvolutionEngine& engine, const ConstrainedBasis& basis,
                                   const SamplerConfig& cfg) {
  cfg.validate();
  if (engine.dim() != static_cast<int>(basis.size()))
    throw InvalidArgument("engine dimension does not match basis");
  RngStream times_stream(derive_seed(cfg.seed, Stream::times));
  RngStream measure(derive_seed(cfg.seed, Stream::measure));
  RngStream pick(derive_seed(cfg.seed, Stream::feed_forward));

  PracticalFfRun run;
  run.samples.n_bits = basis.n;
  std::size_t cur = 0;
  std::vector<double> cum;
  std::vector<std::size_t> shot_indices(static_cast<std::size_t>(cfg.shots_per_step));
  for (int step = 0; step < cfg.k; ++step) {
    run.initial_states.push_back(basis.states[cur]);
    const double t = times_stream.uniform(cfg.t_min, cfg.t_max);
    run.times.push_back(t);
    const Eigen::VectorXcd amps = engine.evolve_basis_state(static_cast<int>(cur), t);
    detail::cumulative_probs(amps, cum);
    for (long long s = 0; s < cfg.shots_per_step; ++s) {
      const std::size_t idx = draw_cumulative(cum, measure.uniform(0.0, 1.0));
      shot_indices[static_cast<std::size_t>(s)] = idx;
      run.samples.add(basis.states[idx]);
    }
    cur = shot_indices[pick.uniform_index(static_cast<std::uint64_t>(cfg.shots_per_step))];
  }
  return run;
}

}  // namespace rydcount
