// Command-line front end: instance generation, quench sampling, non-uniformity
// reports, survival scans, and RydCount runs with exact-count cross-checks.
// All outputs are deterministic under a fixed seed; wall-clock timings go to
// stderr so records replay byte-for-byte.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydcount/cnf.hpp"
#include "rydcount/corpus.hpp"
#include "rydcount/counter.hpp"
#include "rydcount/exact_count.hpp"
#include "rydcount/version.hpp"

namespace {

using nlohmann::json;
using namespace rydcount;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_resource = 3;
constexpr int exit_numeric = 4;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw InvalidArgument("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open instance file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BlockadeGraph load_instance(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text).get<BlockadeGraph>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid instance JSON: ") + e.what());
    }
  }
  return parse_cnf(text);
}

std::size_t default_max_basis() {
  if (const char* env = std::getenv("RYDCOUNT_MAX_BASIS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw InvalidArgument("RYDCOUNT_MAX_BASIS must be a positive integer");
  }
  return default_basis_cap;
}

std::optional<BigInt> try_exact_count(const BlockadeGraph& g) {
  try {
    return exact_count_dp(g);
  } catch (const Error&) {
  }
  try {
    return exact_count_bruteforce(g);
  } catch (const Error&) {
  }
  return std::nullopt;
}

json instance_summary(const BlockadeGraph& g, const std::string& path) {
  return json{{"path", path}, {"digest", instance_digest(g)}, {"n", g.n},
              {"edges", g.edges.size()}};
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  void report(const std::string& what) const {
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    std::fprintf(stderr, "timing: %s %.3fs\n", what.c_str(), dt.count());
  }
};

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::vector<int> dims;
  std::vector<int> holes;
  std::string out;
  std::string cnf_out;
  std::string format = "json";
};

int run_gen(const GenArgs& a) {
  BlockadeGraph g;
  if (a.kind == "chain") {
    if (a.dims.size() != 1) throw InvalidArgument("gen chain needs one dimension");
    g = build_chain(a.dims[0]);
  } else if (a.kind == "grid") {
    if (a.dims.size() != 2) throw InvalidArgument("gen grid needs two dimensions");
    g = build_grid(a.dims[0], a.dims[1]);
  } else if (a.kind == "punched") {
    if (a.dims.size() != 2) throw InvalidArgument("gen punched needs two dimensions");
    g = punch_grid(build_grid(a.dims[0], a.dims[1]), a.holes);
  } else {
    throw InvalidArgument("unknown instance kind '" + a.kind + "' (chain|grid|punched)");
  }
  if (a.format == "json") {
    write_file_atomic(a.out, json(g).dump(2) + "\n");
  } else if (a.format == "dimacs") {
    write_file_atomic(a.out, to_cnf(g));
  } else {
    throw InvalidArgument("unknown format '" + a.format + "' (json|dimacs)");
  }
  if (!a.cnf_out.empty()) write_file_atomic(a.cnf_out, to_cnf(g));
  std::fprintf(stderr, "wrote %s (n=%d, %zu edges)\n", a.out.c_str(), g.n, g.edges.size());
  return exit_ok;
}

// ---- count -----------------------------------------------------------------

struct CountArgs {
  std::string instance;
  std::string protocol = "pff";
  long long n_samp = 0;  // 0 = auto n^4
  int k = 0;             // 0 = auto split
  long long shots = 0;
  double t_min = 10.0, t_max = 1000.0, omega = 1.0;
  std::uint64_t seed = 0;
  int repeat = 1;
  int jobs = 1;
  std::size_t max_basis = 0;
  std::string out;
  std::string csv;
};

SamplerConfig resolve_sampler_config(const CountArgs& a, int n) {
  SamplerConfig cfg;
  cfg.protocol = protocol_from_string(a.protocol);
  cfg.t_min = a.t_min;
  cfg.t_max = a.t_max;
  cfg.n_samp = a.n_samp > 0 ? a.n_samp
                            : static_cast<long long>(n) * n * n * n;
  cfg.seed = a.seed;
  if (cfg.protocol == Protocol::practical_ff) {
    const auto [auto_k, auto_shots] = practical_ff_split(cfg.n_samp);
    cfg.k = a.k > 0 ? a.k : auto_k;
    cfg.shots_per_step = a.shots > 0 ? a.shots
                                     : (cfg.n_samp + cfg.k - 1) / cfg.k;
    if (a.k > 0 && a.shots > 0) cfg.n_samp = static_cast<long long>(a.k) * a.shots;
  } else {
    cfg.k = std::max(a.k, 1);
    cfg.shots_per_step = std::max<long long>(a.shots, 1);
  }
  return cfg;
}

std::string seed_out_path(const std::string& base, std::uint64_t seed, bool multi) {
  if (!multi) return base;
  const auto dot = base.rfind('.');
  const std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
  const std::string ext = dot == std::string::npos ? "" : base.substr(dot);
  return stem + "-seed" + std::to_string(seed) + ext;
}

int run_count(const CountArgs& a) {
  const Timer timer;
  const BlockadeGraph g = load_instance(a.instance);
  const std::optional<BigInt> exact = try_exact_count(g);

  CountOptions opt;
  opt.omega = a.omega;
  opt.basis_cap = a.max_basis;

  const bool multi = a.repeat > 1;
  EngineCache cache;
  std::vector<json> records(static_cast<std::size_t>(a.repeat));
  std::vector<std::string> csv_rows(static_cast<std::size_t>(a.repeat));

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= a.repeat || failed.load()) return;
      try {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
        CountArgs seeded = a;
        seeded.seed = seed;
        const SamplerConfig cfg = resolve_sampler_config(seeded, g.n);
        const CountEstimate est = ryd_count(make_register(g), cfg, opt, &cache);

        json rec = count_estimate_to_json(est);
        rec["command"] = "count";
        rec["tool"] = "rydcount";
        rec["version"] = std::string(version);
        rec["instance"] = instance_summary(g, a.instance);
        rec["root_seed"] = seed;
        rec["config"] = json{{"sampler", cfg},
                             {"omega", a.omega},
                             {"max_basis", a.max_basis},
                             {"protocol", to_string(cfg.protocol)}};
        if (exact) {
          const double ex = to_double(*exact);
          rec["exact"] = exact->str();
          rec["rel_error"] = std::abs(est.kappa - ex) / ex;
        } else {
          rec["exact"] = nullptr;
          rec["rel_error"] = nullptr;
        }
        records[static_cast<std::size_t>(i)] = rec;

        std::ostringstream row;
        row << a.instance << ',' << g.n << ',' << to_string(cfg.protocol) << ','
            << cfg.n_samp << ',' << format_double(est.kappa) << ','
            << (exact ? exact->str() : "") << ','
            << (exact ? format_double(rec["rel_error"].get<double>()) : "") << ','
            << seed;
        csv_rows[static_cast<std::size_t>(i)] = row.str();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed = true;
        if (!error) error = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min(a.jobs, a.repeat));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed) std::rethrow_exception(error);

  for (int i = 0; i < a.repeat; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    write_file_atomic(seed_out_path(a.out, seed, multi),
                      records[static_cast<std::size_t>(i)].dump(2) + "\n");
  }
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << "instance,n,protocol,n_samp,kappa,exact,rel_error,seed\n";
    for (const auto& row : csv_rows) csv << row << '\n';
    write_file_atomic(a.csv, csv.str());
  }
  for (const auto& rec : records) {
    std::fprintf(stderr, "kappa %s%s\n", format_double(rec["kappa"].get<double>()).c_str(),
                 rec["rel_error"].is_null()
                     ? ""
                     : (" rel_error " + format_double(rec["rel_error"].get<double>())).c_str());
  }
  timer.report("count");
  return exit_ok;
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string instance;
  std::string protocol = "fi";
  long long n_samp = 1000;
  int k = 1;
  long long shots = 1;
  double t_min = 10.0, t_max = 1000.0, omega = 1.0;
  bool heisenberg = false;
  std::uint64_t seed = 0;
  std::size_t max_basis = 0;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  const Timer timer;
  const BlockadeGraph g = load_instance(a.instance);
  const ConstrainedBasis basis = enumerate_solutions(g, a.max_basis);
  const EvolutionEngine engine(build_pxp(g, basis, a.omega));

  SamplerConfig cfg;
  cfg.protocol = protocol_from_string(a.protocol);
  cfg.t_min = a.t_min;
  cfg.t_max = a.t_max;
  cfg.n_samp = a.n_samp;
  cfg.k = a.k;
  cfg.shots_per_step = a.shots;
  cfg.seed = a.seed;
  cfg.enforce_heisenberg_spacing = a.heisenberg;

  SampleSet samples;
  switch (cfg.protocol) {
    case Protocol::fi:
      samples = ryd_samp_fi(engine, basis, cfg);
      break;
    case Protocol::ff:
      samples = ryd_samp_ff(engine, basis, cfg).samples;
      break;
    case Protocol::practical_ff:
      samples = practical_ff(engine, basis, cfg).samples;
      break;
  }
  json rec = sample_set_to_json(samples, cfg);
  rec["command"] = "sample";
  rec["tool"] = "rydcount";
  rec["version"] = std::string(version);
  rec["instance"] = instance_summary(g, a.instance);
  write_file_atomic(a.out, rec.dump(2) + "\n");
  timer.report("sample");
  return exit_ok;
}

// ---- eta -------------------------------------------------------------------

struct EtaArgs {
  std::string instance;
  std::string protocol = "exact-fi";
  long long n_samp = 10000;
  int k = 1;
  long long shots = 1;
  int n_times = 200;
  double t_min = 10.0, t_max = 1000.0, omega = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_basis = 0;
  std::string out;
  std::string distribution_out;
};

int run_eta(const EtaArgs& a) {
  const Timer timer;
  const BlockadeGraph g = load_instance(a.instance);
  const ConstrainedBasis basis = enumerate_solutions(g, a.max_basis);
  const EvolutionEngine engine(build_pxp(g, basis, a.omega));

  double eta = 0;
  json detail;
  if (a.protocol == "exact-fi") {
    SamplerConfig time_cfg;
    time_cfg.t_min = a.t_min;
    time_cfg.t_max = a.t_max;
    time_cfg.n_samp = a.n_times;
    time_cfg.seed = a.seed;
    const auto times = draw_times(time_cfg);
    const DistributionStats stats = effective_distribution_fi(engine, basis, times);
    eta = stats.eta;
    detail = json{{"n_times", a.n_times}, {"support_size", stats.support_size}};
    if (!a.distribution_out.empty())
      write_file_atomic(a.distribution_out,
                        distribution_to_json(stats, basis).dump(2) + "\n");
  } else {
    SamplerConfig cfg;
    cfg.protocol = protocol_from_string(a.protocol);
    cfg.t_min = a.t_min;
    cfg.t_max = a.t_max;
    cfg.n_samp = a.n_samp;
    cfg.k = a.k;
    cfg.shots_per_step = a.shots;
    cfg.seed = a.seed;
    SampleSet samples;
    switch (cfg.protocol) {
      case Protocol::fi:
        samples = ryd_samp_fi(engine, basis, cfg);
        break;
      case Protocol::ff:
        samples = ryd_samp_ff(engine, basis, cfg).samples;
        break;
      case Protocol::practical_ff:
        samples = practical_ff(engine, basis, cfg).samples;
        break;
    }
    eta = non_uniformity(samples, basis);
    detail = json{{"total_samples", samples.total}, {"config", cfg}};
  }

  json rec{{"command", "eta"},
           {"tool", "rydcount"},
           {"version", std::string(version)},
           {"instance", instance_summary(g, a.instance)},
           {"protocol", a.protocol},
           {"seed", a.seed},
           {"basis_size", basis.size()},
           {"eta", eta},
           {"n_eta", static_cast<double>(g.n) * eta},
           {"detail", detail}};
  write_file_atomic(a.out, rec.dump(2) + "\n");
  std::fprintf(stderr, "eta %.6f n*eta %.6f\n", eta, g.n * eta);
  timer.report("eta");
  return exit_ok;
}

// ---- survival --------------------------------------------------------------

struct SurvivalArgs {
  std::string instance;
  std::string sweep_chains;  // "nmin:nmax"
  int n_times = 200;
  std::string t_grid;  // "lo:hi:steps"
  double t_min = 10.0, t_max = 1000.0, omega = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_basis = 0;
  std::string out;  // prefix: writes <out>.csv and <out>.json
};

Eigen::VectorXcd zero_state(int dim) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[0] = 1.0;
  return psi;
}

std::vector<double> random_times(int n_times, double t_min, double t_max,
                                 std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.t_min = t_min;
  cfg.t_max = t_max;
  cfg.n_samp = n_times;
  cfg.seed = seed;
  return draw_times(cfg);
}

int run_survival(const SurvivalArgs& a) {
  const Timer timer;
  if (!a.sweep_chains.empty()) {
    int nmin = 0, nmax = 0;
    if (std::sscanf(a.sweep_chains.c_str(), "%d:%d", &nmin, &nmax) != 2 || nmin < 1 ||
        nmax < nmin)
      throw InvalidArgument("--sweep-chains expects NMIN:NMAX");
    std::vector<int> ns;
    std::vector<double> sim, thermal;
    for (int n = nmin; n <= nmax; ++n) {
      const BlockadeGraph g = build_chain(n);
      const ConstrainedBasis basis = enumerate_solutions(g, a.max_basis);
      const EvolutionEngine engine(build_pxp(g, basis, a.omega));
      const auto times = random_times(a.n_times, a.t_min, a.t_max,
                                      derive_seed(a.seed, Stream::times,
                                                  static_cast<std::uint64_t>(n)));
      ns.push_back(n);
      sim.push_back(averaged_survival(engine, zero_state(engine.dim()), times));
      thermal.push_back(1.0 / static_cast<double>(basis.size()));
    }
    const ExpFit fit_sim = fit_exponential(ns, sim);
    const ExpFit fit_th = fit_exponential(ns, thermal);

    std::ostringstream csv;
    csv << "n,sp_mean,thermal\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
      csv << ns[i] << ',' << format_double(sim[i]) << ',' << format_double(thermal[i])
          << '\n';
    write_file_atomic(a.out + ".csv", csv.str());

    json rec{{"command", "survival"},
             {"tool", "rydcount"},
             {"version", std::string(version)},
             {"mode", "chain-sweep"},
             {"sweep", a.sweep_chains},
             {"n_times", a.n_times},
             {"t_min", a.t_min},
             {"t_max", a.t_max},
             {"omega", a.omega},
             {"seed", a.seed},
             {"fit_sim", {{"alpha", fit_sim.alpha}, {"beta", fit_sim.beta},
                          {"residual", fit_sim.residual}}},
             {"fit_thermal", {{"alpha", fit_th.alpha}, {"beta", fit_th.beta},
                              {"residual", fit_th.residual}}}};
    write_file_atomic(a.out + ".json", rec.dump(2) + "\n");
    std::fprintf(stderr, "alpha_sim %.4f alpha_thermal %.4f\n", fit_sim.alpha,
                 fit_th.alpha);
    timer.report("survival sweep");
    return exit_ok;
  }

  if (a.instance.empty())
    throw InvalidArgument("survival needs an instance or --sweep-chains");
  const BlockadeGraph g = load_instance(a.instance);
  const ConstrainedBasis basis = enumerate_solutions(g, a.max_basis);
  const EvolutionEngine engine(build_pxp(g, basis, a.omega));
  const Eigen::VectorXcd psi0 = zero_state(engine.dim());

  json rec{{"command", "survival"},
           {"tool", "rydcount"},
           {"version", std::string(version)},
           {"instance", instance_summary(g, a.instance)},
           {"omega", a.omega},
           {"seed", a.seed}};

  std::ostringstream csv;
  csv << "t,sp\n";
  if (!a.t_grid.empty()) {
    double lo = 0, hi = 0;
    int steps = 0;
    if (std::sscanf(a.t_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 2 ||
        !(hi > lo) || lo < 0)
      throw InvalidArgument("--t-grid expects LO:HI:STEPS");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      grid[static_cast<std::size_t>(i)] =
          lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    const RampDipReport report = ramp_dip_scan(engine, psi0, grid);
    for (std::size_t i = 0; i < report.curve.times.size(); ++i)
      csv << format_double(report.curve.times[i]) << ','
          << format_double(report.curve.values[i]) << '\n';
    rec["mode"] = "ramp-dip";
    rec["t_grid"] = a.t_grid;
    rec["ramp_dip"] = json{{"has_dip", report.has_dip},
                           {"t_dip", report.t_dip},
                           {"s_dip", report.s_dip},
                           {"long_time_mean", report.long_time_mean}};
    if (report.t_settle) {
      rec["ramp_dip"]["t_settle"] = *report.t_settle;
    } else {
      rec["ramp_dip"]["t_settle"] = nullptr;
    }
    if (report.has_dip && report.t_settle)
      std::fprintf(stderr, "dip at t=%.3f settle at t=%.3f\n", report.t_dip,
                   *report.t_settle);
  } else {
    const auto times = random_times(a.n_times, a.t_min, a.t_max, a.seed);
    std::vector<std::pair<double, double>> curve;
    const Eigen::VectorXd w = engine.method() == EvolutionEngine::Method::exact
                                  ? engine.spectral_weights(psi0)
                                  : Eigen::VectorXd();
    for (double t : times) {
      const double s = w.size() ? engine.survival_from_weights(w, t)
                                : engine.survival_probability(psi0, t);
      curve.emplace_back(t, s);
    }
    std::sort(curve.begin(), curve.end());
    double mean = 0;
    for (const auto& [t, s] : curve) {
      csv << format_double(t) << ',' << format_double(s) << '\n';
      mean += s;
    }
    mean /= static_cast<double>(curve.size());
    rec["mode"] = "random-times";
    rec["n_times"] = a.n_times;
    rec["t_min"] = a.t_min;
    rec["t_max"] = a.t_max;
    rec["sp_mean"] = mean;
    rec["thermal"] = 1.0 / static_cast<double>(basis.size());
    std::fprintf(stderr, "sp_mean %.6g thermal %.6g\n", mean,
                 1.0 / static_cast<double>(basis.size()));
  }
  write_file_atomic(a.out + ".csv", csv.str());
  write_file_atomic(a.out + ".json", rec.dump(2) + "\n");
  timer.report("survival");
  return exit_ok;
}

// ---- matrix ----------------------------------------------------------------

struct MatrixArgs {
  std::string instance;
  std::string kind = "pxp";
  double omega = 1.0, v = 50.0;
  std::size_t max_basis = 0;
  std::string out;
};

int run_matrix(const MatrixArgs& a) {
  const BlockadeGraph g = load_instance(a.instance);
  SparseHamiltonian h;
  if (a.kind == "pxp") {
    const ConstrainedBasis basis = enumerate_solutions(g, a.max_basis);
    h = build_pxp(g, basis, a.omega);
  } else if (a.kind == "rydberg") {
    h = build_rydberg(g, a.omega, a.v);
  } else {
    throw InvalidArgument("unknown matrix kind '" + a.kind + "' (pxp|rydberg)");
  }
  std::ostringstream out;
  write_coo(out, h);
  write_file_atomic(a.out, out.str());
  std::fprintf(stderr, "wrote %s (dim=%d nnz=%zu)\n", a.out.c_str(), h.dim, h.nnz());
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-blockade quench sampling and sampling-based #2SAT counting"};
  app.set_version_flag("--version", std::string(rydcount::version));
  app.set_config("--config", "", "Read defaults from an INI config file");
  app.require_subcommand(1);

  const std::size_t env_max_basis = [] {
    try {
      return default_max_basis();
    } catch (...) {
      return default_basis_cap;
    }
  }();
  if (const char* env = std::getenv("RYDCOUNT_MAX_BASIS")) {
    // Validate eagerly so a bad value fails loudly.
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (!end || *end != '\0' || v == 0) {
      std::fprintf(stderr, "error: RYDCOUNT_MAX_BASIS must be a positive integer\n");
      return exit_usage;
    }
  }

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance file");
  gen_cmd->add_option("kind", gen.kind, "chain|grid|punched")->required();
  gen_cmd->add_option("dims", gen.dims, "Dimensions (chain: N; grid/punched: LX LY)");
  gen_cmd->add_option("--holes", gen.holes, "Hole labels for punched grids")
      ->delimiter(',');
  gen_cmd->add_option("--out", gen.out, "Output path")->required();
  gen_cmd->add_option("--cnf", gen.cnf_out, "Also write DIMACS CNF to this path");
  gen_cmd->add_option("--format", gen.format, "json|dimacs (default json)");

  CountArgs count;
  count.max_basis = env_max_basis;
  auto* count_cmd = app.add_subcommand("count", "Run RydCount on an instance");
  count_cmd->add_option("instance", count.instance, "Instance file (JSON or DIMACS)")
      ->required();
  count_cmd->add_option("--protocol", count.protocol, "fi|ff|pff (default pff)");
  count_cmd->add_option("--n-samp", count.n_samp, "Samples per step (default n^4)");
  count_cmd->add_option("--k", count.k, "Feed-forward steps (pff; default auto)");
  count_cmd->add_option("--shots-per-step", count.shots, "Shots per step (pff; default auto)");
  count_cmd->add_option("--t-min", count.t_min, "Minimum evolution time");
  count_cmd->add_option("--t-max", count.t_max, "Maximum evolution time");
  count_cmd->add_option("--omega", count.omega, "Rabi frequency");
  count_cmd->add_option("--seed", count.seed, "Root seed");
  count_cmd->add_option("--repeat", count.repeat, "Run seeds seed..seed+R-1");
  count_cmd->add_option("--jobs", count.jobs, "Parallel workers for --repeat");
  count_cmd->add_option("--max-basis", count.max_basis, "Constrained-basis size cap");
  count_cmd->add_option("--out", count.out, "Record JSON path")->required();
  count_cmd->add_option("--csv", count.csv, "Also write a CSV summary");

  SampleArgs sample;
  sample.max_basis = env_max_basis;
  auto* sample_cmd = app.add_subcommand("sample", "Draw samples from a quench protocol");
  sample_cmd->add_option("instance", sample.instance)->required();
  sample_cmd->add_option("--protocol", sample.protocol, "fi|ff|pff (default fi)");
  sample_cmd->add_option("--n-samp", sample.n_samp, "Sample count (fi)");
  sample_cmd->add_option("--k", sample.k, "Feed-forward steps (ff/pff)");
  sample_cmd->add_option("--shots-per-step", sample.shots, "Shots per step (pff)");
  sample_cmd->add_option("--t-min", sample.t_min, "Minimum evolution time");
  sample_cmd->add_option("--t-max", sample.t_max, "Maximum evolution time");
  sample_cmd->add_option("--omega", sample.omega, "Rabi frequency");
  sample_cmd->add_flag("--heisenberg-spacing", sample.heisenberg,
                       "Reject times closer than the Heisenberg time");
  sample_cmd->add_option("--seed", sample.seed, "Root seed");
  sample_cmd->add_option("--max-basis", sample.max_basis, "Constrained-basis size cap");
  sample_cmd->add_option("--out", sample.out, "Output JSON path")->required();

  EtaArgs eta;
  eta.max_basis = env_max_basis;
  auto* eta_cmd = app.add_subcommand("eta", "Non-uniformity report");
  eta_cmd->add_option("instance", eta.instance)->required();
  eta_cmd->add_option("--protocol", eta.protocol, "exact-fi|fi|ff|pff (default exact-fi)");
  eta_cmd->add_option("--n-samp", eta.n_samp, "Sample count (fi)");
  eta_cmd->add_option("--k", eta.k, "Feed-forward steps (ff/pff)");
  eta_cmd->add_option("--shots-per-step", eta.shots, "Shots per step (pff)");
  eta_cmd->add_option("--n-times", eta.n_times, "Random times for exact-fi");
  eta_cmd->add_option("--t-min", eta.t_min, "Minimum evolution time");
  eta_cmd->add_option("--t-max", eta.t_max, "Maximum evolution time");
  eta_cmd->add_option("--omega", eta.omega, "Rabi frequency");
  eta_cmd->add_option("--seed", eta.seed, "Root seed");
  eta_cmd->add_option("--max-basis", eta.max_basis, "Constrained-basis size cap");
  eta_cmd->add_option("--out", eta.out, "Output JSON path")->required();
  eta_cmd->add_option("--distribution-out", eta.distribution_out,
                      "Write the full distribution (exact-fi)");

  SurvivalArgs survival;
  survival.max_basis = env_max_basis;
  auto* survival_cmd = app.add_subcommand("survival", "Survival-probability scans");
  survival_cmd->add_option("instance", survival.instance, "Instance file");
  survival_cmd->add_option("--sweep-chains", survival.sweep_chains,
                           "Averaged survival for chains NMIN:NMAX plus fits");
  survival_cmd->add_option("--n-times", survival.n_times, "Random time count");
  survival_cmd->add_option("--t-grid", survival.t_grid,
                           "Deterministic grid LO:HI:STEPS (ramp-dip scan)");
  survival_cmd->add_option("--t-min", survival.t_min, "Minimum random time");
  survival_cmd->add_option("--t-max", survival.t_max, "Maximum random time");
  survival_cmd->add_option("--omega", survival.omega, "Rabi frequency");
  survival_cmd->add_option("--seed", survival.seed, "Root seed");
  survival_cmd->add_option("--max-basis", survival.max_basis, "Constrained-basis size cap");
  survival_cmd->add_option("--out", survival.out, "Output prefix (.csv/.json)")
      ->required();

  MatrixArgs matrix;
  matrix.max_basis = env_max_basis;
  auto* matrix_cmd = app.add_subcommand("matrix", "Dump a sparse Hamiltonian");
  matrix_cmd->add_option("instance", matrix.instance)->required();
  matrix_cmd->add_option("--kind", matrix.kind, "pxp|rydberg (default pxp)");
  matrix_cmd->add_option("--omega", matrix.omega, "Rabi frequency");
  matrix_cmd->add_option("--v", matrix.v, "Interaction strength (rydberg)");
  matrix_cmd->add_option("--max-basis", matrix.max_basis, "Constrained-basis size cap");
  matrix_cmd->add_option("--out", matrix.out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*count_cmd) return run_count(count);
    if (*sample_cmd) return run_sample(sample);
    if (*eta_cmd) return run_eta(eta);
    if (*survival_cmd) return run_survival(survival);
    if (*matrix_cmd) return run_matrix(matrix);
    std::fprintf(stderr, "error: no subcommand\n");
    return exit_usage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_resource;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_numeric;
  }
}
