#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydcount/basis.hpp"
#include "rydcount/errors.hpp"
#include "rydcount/evolution.hpp"
#include "rydcount/register.hpp"
#include "rydcount/rng.hpp"
#include "rydcount/sampler.hpp"

namespace rydcount {

struct Likelihoods {
  std::vector<int> labels;  // aligned with p
  std::vector<double> p;    // empirical marginal of bit = 1
};

// p_i = fraction of samples with bit i set, per active label.
inline Likelihoods likelihoods(const SampleSet& s, const std::vector<int>& labels) {
  if (s.total <= 0) throw InvalidArgument("empty sample set");
  if (static_cast<std::size_t>(s.n_bits) != labels.size())
    throw InvalidArgument("label list does not match sample width");
  Likelihoods out;
  out.labels = labels;
  out.p.assign(labels.size(), 0.0);
  for (const auto& [mask, c] : s.counts) {
    for (int i = 0; i < s.n_bits; ++i)
      if ((mask >> i) & 1ull) out.p[static_cast<std::size_t>(i)] += static_cast<double>(c);
  }
  for (double& v : out.p) v /= static_cast<double>(s.total);
  return out;
}

// Argmax likelihood; ties broken by smallest label.  Returns nullopt when
// every likelihood is zero (termination signal for the counting loop).
inline std::optional<int> select_variable(const Likelihoods& lk) {
  if (lk.p.empty()) throw InvalidArgument("empty likelihood vector");
  double best = 0;
  std::optional<int> best_label;
  for (std::size_t i = 0; i < lk.p.size(); ++i) {
    const int label = lk.labels[i];
    if (lk.p[i] > best || (lk.p[i] == best && best_label && label < *best_label && best > 0)) {
      best = lk.p[i];
      best_label = label;
    }
  }
  if (best <= 0) return std::nullopt;
  return best_label;
}

struct CountStep {
  int label = 0;
  double p_c = 0;
  long long n_samp = 0;
  std::uint64_t seed = 0;
};

struct CountEstimate {
  double kappa = 1.0;
  double log_kappa = 0.0;  // accumulated in log space
  std::vector<CountStep> steps;
  std::map<int, int> assignment;  // label -> bit, witness solution
};

inline nlohmann::json count_estimate_to_json(const CountEstimate& est) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : est.steps)
    steps.push_back(nlohmann::json{
        {"label", s.label}, {"p_c", s.p_c}, {"n_samp", s.n_samp}, {"seed", s.seed}});
  nlohmann::json assignment = nlohmann::json::object();
  for (const auto& [label, bit] : est.assignment)
    assignment[std::to_string(label)] = bit;
  return nlohmann::json{{"kappa", est.kappa},
                        {"log_kappa", est.log_kappa},
                        {"steps", steps},
                        {"assignment", assignment}};
}

struct CountOptions {
  double omega = 1.0;
  EvolutionOptions evolution;
  std::size_t basis_cap = default_basis_cap;
};

// Engines keyed by instance digest; self-reduction runs over many seeds often
// revisit the same reduced graph (always the first step), and the spectra are
// immutable, so sharing is safe.
class EngineCache {
 public:
  struct Entry {
    ConstrainedBasis basis;
    std::shared_ptr<const EvolutionEngine> engine;
  };

  std::shared_ptr<const Entry> get(const BlockadeGraph& g, const CountOptions& opt) {
    const std::string key = instance_digest(g);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto entry = std::make_shared<Entry>();
    entry->basis = enumerate_solutions(g, opt.basis_cap);
    entry->engine = std::make_shared<const EvolutionEngine>(
        build_pxp(g, entry->basis, opt.omega), opt.evolution);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.try_emplace(key, std::move(entry)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Entry>> cache_;
};

// Default practical-FF split of a per-step sample budget: many feed-forward
// steps with a couple of shots each mixes D(k) fastest; the step count is
// capped to bound the number of evolutions on large registers.
inline std::pair<int, long long> practical_ff_split(long long n_samp) {
  const long long k = std::min<long long>((n_samp + 1) / 2, 2048);
  const long long shots = (n_samp + k - 1) / k;
  return {static_cast<int>(k), shots};
}

namespace detail {

template <typename SampleFn>
CountEstimate self_reduce(Register r, SampleFn&& sample_step) {
  if (!r.fixed.empty()) throw InvalidArgument("register must be fully active");
  const BlockadeGraph original = r.original;
  CountEstimate est;
  int step_index = 0;
  while (!is_complete(r)) {
    auto [samples, step_seed] = sample_step(r, step_index);
    const Likelihoods lk = likelihoods(samples, r.active.labels);
    const auto chosen = select_variable(lk);
    if (!chosen) {
      // All likelihoods zero: the evidence supports only the all-zeros
      // completion, which always satisfies the residual instance.
      r = complete_with_zeros(r);
      break;
    }
    double p_c = 0;
    for (std::size_t i = 0; i < lk.labels.size(); ++i)
      if (lk.labels[i] == *chosen) p_c = lk.p[i];
    est.log_kappa += -std::log(p_c);
    est.steps.push_back(CountStep{*chosen, p_c, samples.total, step_seed});
    r = fix_one(r, *chosen);
    ++step_index;
  }
  est.kappa = std::exp(est.log_kappa);
  est.assignment = r.fixed;
  if (!satisfies(original, full_assignment(r)))
    throw NumericError("witness assignment violates the instance");
  return est;
}

}  // namespace detail

// RydCount: JVV self-reduction over the quantum sampler.  Each step samples
// the current register with the configured protocol, fixes the most-likely
// variable to 1 (removing its closed neighborhood), and accumulates
// kappa *= 1/p_c until every variable is set.
inline CountEstimate ryd_count(const Register& r, const SamplerConfig& cfg,
                               const CountOptions& opt = {}, EngineCache* cache = nullptr) {
  cfg.validate();
  EngineCache local_cache;
  EngineCache& engines = cache ? *cache : local_cache;
  return detail::self_reduce(r, [&](const Register& cur, int step_index) {
    const auto entry = engines.get(cur.active, opt);
    SamplerConfig step_cfg = cfg;
    step_cfg.seed = derive_seed(cfg.seed, Stream::count_step,
                                static_cast<std::uint64_t>(step_index));
    SampleSet samples;
    switch (cfg.protocol) {
      case Protocol::fi:
        samples = ryd_samp_fi(*entry->engine, entry->basis, step_cfg);
        break;
      case Protocol::ff: {
        // Algorithm-level FF: one sample per feed-forward step, n_samp steps.
        step_cfg.k = static_cast<int>(cfg.n_samp);
        samples = ryd_samp_ff(*entry->engine, entry->basis, step_cfg).samples;
        break;
      }
      case Protocol::practical_ff:
        samples = practical_ff(*entry->engine, entry->basis, step_cfg).samples;
        break;
    }
    return std::make_pair(std::move(samples), step_cfg.seed);
  });
}

// Same self-reduction loop, but sampling exactly uniformly from the solution
// set of the current register.  Isolates the JVV layer from sampler bias.
inline CountEstimate ryd_count_with_oracle_sampler(const Register& r, long long n_samp,
                                                   std::uint64_t seed,
                                                   std::size_t basis_cap = default_basis_cap) {
  if (n_samp < 1) throw InvalidArgument("n_samp must be >= 1");
  return detail::self_reduce(r, [&](const Register& cur, int step_index) {
    const std::uint64_t step_seed =
        derive_seed(seed, Stream::count_step, static_cast<std::uint64_t>(step_index));
    const ConstrainedBasis basis = enumerate_solutions(cur.active, basis_cap);
    RngStream stream(derive_seed(step_seed, Stream::oracle));
    SampleSet samples;
    samples.n_bits = basis.n;
    for (long long i = 0; i < n_samp; ++i)
      samples.add(basis.states[stream.uniform_index(basis.size())]);
    return std::make_pair(std::move(samples), step_seed);
  });
}

}  // namespace rydcount
