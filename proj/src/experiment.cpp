#include "zovr/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "zovr/quadratic.hpp"
#include "zovr/simplex.hpp"

namespace zovr {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::string_view sv(value);
  if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
  T out{};
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  if (sv.empty() || ec != std::errc() || ptr != sv.data() + sv.size())
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out) && value != "inf") throw ConfigError("non-finite value for '" + key + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "infinity") return std::numeric_limits<double>::infinity();
  return parse_number<double>(key, value);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  return parse_number<std::int64_t>(key, value);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const std::int64_t v = parse_int(key, value);
  if (v < 0) throw ConfigError("'" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

int parse_small(const std::string& key, const std::string& value) {
  const std::int64_t v = parse_int(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("'" + key + "' out of range");
  return static_cast<int>(v);
}

Algorithm parse_algorithm(const std::string& v) {
  if (v == "zo-vrgda") return Algorithm::Vrgda;
  if (v == "zo-isarah") return Algorithm::Isarah;
  if (v == "zo-sgda") return Algorithm::Sgda;
  if (v == "zo-sgdmsa") return Algorithm::Sgdmsa;
  throw ConfigError("unknown algorithm '" + v + "'");
}

const std::vector<std::string>& override_keys() {
  static const std::vector<std::string> keys = {
      "alpha",      "beta",           "epoch_len", "inner_len", "batch_x", "batch_y",
      "snapshot_batch", "snapshot_mode", "outer_len", "zeta",  "mu1",     "mu2",
      "tau",        "delta",          "init"};
  return keys;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Vrgda: return "zo-vrgda";
    case Algorithm::Isarah: return "zo-isarah";
    case Algorithm::Sgda: return "zo-sgda";
    case Algorithm::Sgdmsa: return "zo-sgdmsa";
  }
  return "unknown";
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& k = key;
  const std::string& v = value;
  if (k == "problem") {
    if (v != "quadratic" && v != "dro") throw ConfigError("problem must be quadratic or dro");
    cfg.problem = v;
  } else if (k == "d1") {
    cfg.d1 = static_cast<Index>(parse_count(k, v));
  } else if (k == "d2") {
    cfg.d2 = static_cast<Index>(parse_count(k, v));
  } else if (k == "kappa") {
    cfg.kappa = parse_real(k, v);
  } else if (k == "sigma") {
    cfg.sigma = parse_real(k, v);
  } else if (k == "c_spread") {
    cfg.c_spread = parse_real(k, v);
  } else if (k == "regime") {
    if (v != "online" && v != "finite") throw ConfigError("regime must be online or finite");
    cfg.finite_sum = v == "finite";
  } else if (k == "n") {
    cfg.n = parse_count(k, v);
  } else if (k == "problem_seed") {
    cfg.problem_seed = static_cast<std::uint64_t>(parse_count(k, v));
  } else if (k == "data") {
    cfg.data = v;
  } else if (k == "num_features") {
    cfg.num_features = static_cast<Index>(parse_count(k, v));
  } else if (k == "minority_count") {
    cfg.minority_count = parse_count(k, v);
  } else if (k == "ratio") {
    cfg.ratio = parse_count(k, v);
  } else if (k == "minority") {
    if (v == "positive") cfg.minority = MinorityClass::Positive;
    else if (v == "negative") cfg.minority = MinorityClass::Negative;
    else throw ConfigError("minority must be positive or negative");
  } else if (k == "reg_weight") {
    cfg.reg_weight = parse_real(k, v);
  } else if (k == "subsample_seed") {
    cfg.subsample_seed = static_cast<std::uint64_t>(parse_count(k, v));
  } else if (k == "algorithm" || k == "algo") {
    cfg.algorithm = parse_algorithm(v);
  } else if (k == "profile") {
    if (v == "theory") cfg.profile = Profile::Theory;
    else if (v == "practical") cfg.profile = Profile::Practical;
    else throw ConfigError("profile must be theory or practical");
  } else if (k == "schedule") {
    if (v == "default") cfg.schedule = Schedule::Default;
    else if (v == "benchmark") cfg.schedule = Schedule::Benchmark;
    else throw ConfigError("schedule must be default or benchmark");
  } else if (k == "eps") {
    cfg.eps = parse_real(k, v);
  } else if (k == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_count(k, v));
  } else if (k == "query_budget" || k == "budget") {
    cfg.query_budget = parse_int(k, v);
  } else if (k == "eval_every") {
    cfg.eval_every = parse_small(k, v);
  } else if (k == "output" || k == "out") {
    cfg.output = v;
  } else if (k == "phi_gap") {
    cfg.phi_gap = parse_real(k, v);
  } else if (k == "x0_scale") {
    cfg.x0_scale = parse_real(k, v);
  } else if (k == "batch_c") {
    cfg.batch_c = parse_real(k, v);
  } else if (k == "eta") {
    cfg.eta = parse_real(k, v);
  } else if (k == "timescale_ratio") {
    cfg.timescale_ratio = parse_real(k, v);
  } else if (k == "msa_inner_len") {
    cfg.msa_inner_len = parse_small(k, v);
  } else if (k == "bench_inner_len") {
    cfg.bench_inner_len = parse_small(k, v);
  } else if (k == "bench_smoothing") {
    cfg.bench_smoothing = parse_real(k, v);
  } else if (std::find(override_keys().begin(), override_keys().end(), k) != override_keys().end()) {
    if (k == "snapshot_mode" && v != "large" && v != "full")
      throw ConfigError("snapshot_mode must be large or full");
    if (k == "init" && v != "auto" && v != "light" && v != "none")
      throw ConfigError("init must be auto, light or none");
    if (k != "snapshot_mode" && k != "init") (void)parse_real(k, v);
    cfg.overrides[k] = v;
  } else {
    throw ConfigError("unknown key '" + k + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (cfg.query_budget && *cfg.query_budget <= 0) throw ConfigError("query_budget must be > 0");
  if (cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (!(cfg.phi_gap > 0.0)) throw ConfigError("phi_gap must be > 0");
  if (!(cfg.batch_c > 0.0)) throw ConfigError("batch_c must be > 0");
  if (!(cfg.eta >= 0.0)) throw ConfigError("eta must be >= 0");
  if (!(cfg.timescale_ratio > 0.0)) throw ConfigError("timescale_ratio must be > 0");
  if (cfg.msa_inner_len < 1 || cfg.bench_inner_len < 0)
    throw ConfigError("inner lengths must be positive");
  if (!(cfg.bench_smoothing > 0.0)) throw ConfigError("bench_smoothing must be > 0");
  if (cfg.output.empty()) throw ConfigError("output path is empty");
  if (cfg.problem == "quadratic") {
    if (cfg.d1 < 1 || cfg.d2 < 1) throw ConfigError("d1, d2 must be >= 1");
    if (!(cfg.kappa >= 1.0)) throw ConfigError("kappa must be >= 1");
    if (!(cfg.sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    if (!(cfg.c_spread >= 1.0)) throw ConfigError("c_spread must be >= 1");
    if (cfg.finite_sum && cfg.n < 1) throw ConfigError("n must be >= 1");
  } else {
    if (cfg.data.empty()) throw ConfigError("dro problem needs 'data'");
    if (!(cfg.reg_weight > 0.0)) throw ConfigError("reg_weight must be > 0");
    if (cfg.minority_count > 0 && cfg.ratio < 1) throw ConfigError("ratio must be >= 1");
  }
}

ExperimentProblem make_problem(const DroInstance& instance, const Vector& x0) {
  ExperimentProblem ep;
  auto owned = std::make_unique<DroInstance>(instance);
  const DroInstance* inst = owned.get();
  ep.evaluator = [inst](const Vector& x) {
    const PhiValue v = inst->phi_and_grad(x);
    return PhiReport{v.phi, v.grad.norm(), static_cast<std::int64_t>(inst->n())};
  };
  ep.problem = std::move(owned);
  ep.x0 = x0;
  return ep;
}

ExperimentProblem make_problem(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.problem == "dro") {
    std::ifstream in(cfg.data);
    if (!in) throw ConfigError("cannot open data file '" + cfg.data + "'");
    SparseDataset ds = parse_libsvm(in, cfg.num_features);
    if (cfg.minority_count > 0) {
      RandomStream rng = RandomStream(cfg.subsample_seed).substream("subsample");
      ds = subsample_unbalanced(ds, cfg.minority_count, cfg.ratio, rng, cfg.minority);
    }
    const DroInstance inst(ds, cfg.reg_weight);
    return make_problem(inst, Vector::Zero(inst.dim_x()));
  }

  QuadraticSaddle::ConditionedSpec spec;
  spec.d1 = cfg.d1;
  spec.d2 = cfg.d2;
  spec.kappa = cfg.kappa;
  spec.c_spread = cfg.c_spread;
  spec.noise.sigma = cfg.sigma;
  spec.noise.regime = cfg.finite_sum ? Regime(FiniteSum{cfg.n}) : Regime(Online{});
  spec.noise.seed = cfg.problem_seed;
  spec.seed = cfg.problem_seed;
  auto owned = std::make_unique<QuadraticSaddle>(QuadraticSaddle::conditioned(spec));
  const QuadraticSaddle* q = owned.get();
  ExperimentProblem ep;
  ep.evaluator = [q](const Vector& x) {
    const PhiValue v = q->phi_and_grad(x);
    return PhiReport{v.phi, v.grad.norm(), 0};
  };
  // x0 ~ N(0, scale^2 / d1 I), so E||x0||^2 = scale^2.
  ep.x0 = (cfg.x0_scale / std::sqrt(static_cast<double>(cfg.d1))) *
          RandomStream(cfg.problem_seed).substream("x0").normal_vector(cfg.d1);
  ep.problem = std::move(owned);
  return ep;
}

namespace {

std::optional<std::size_t> finite_n(const MinimaxProblem& p) {
  if (is_finite_sum(p.regime())) return finite_sum_size(p.regime());
  return std::nullopt;
}

int to_batch(double v) {
  const std::int64_t b = ceil_count(v);
  if (b > std::numeric_limits<int>::max()) throw ConfigError("batch size overflows int");
  return static_cast<int>(std::max<std::int64_t>(1, b));
}

void apply_smoothing_overrides(const ExperimentConfig& cfg, SmoothingConfig& s) {
  for (const auto& [k, v] : cfg.overrides) {
    if (k == "mu1") s.mu1 = parse_real(k, v);
    else if (k == "mu2") s.mu2 = parse_real(k, v);
    else if (k == "tau") s.tau = parse_real(k, v);
    else if (k == "delta") s.delta = parse_real(k, v);
  }
}

}  // namespace

VrgdaParams make_vrgda_params(const ExperimentConfig& cfg, const MinimaxProblem& problem) {
  const Index d1 = problem.dim_x(), d2 = problem.dim_y();
  const auto n = finite_n(problem);
  const Profile profile = cfg.schedule == Schedule::Benchmark ? Profile::Practical : cfg.profile;
  VrgdaParams p = vrgda_defaults(problem.constants(), d1, d2, cfg.eps, cfg.phi_gap, profile, n);
  if (cfg.schedule == Schedule::Benchmark) {
    p.alpha = cfg.eta;
    p.beta = cfg.eta;
    p.batch_x = to_batch(cfg.batch_c * static_cast<double>(d1) / cfg.eps);
    p.batch_y = to_batch(cfg.batch_c * static_cast<double>(d2) / cfg.eps);
    if (n) p.snapshot_mode = SnapshotMode::FullSum;
    p.epoch_len = to_batch(1.0 / cfg.eps);
    p.inner_len = cfg.bench_inner_len;
    p.smoothing = SmoothingConfig{cfg.bench_smoothing, cfg.bench_smoothing, cfg.bench_smoothing,
                                  cfg.bench_smoothing};
  }

  std::string init = cfg.schedule == Schedule::Benchmark ? "light" : "auto";
  for (const auto& [k, v] : cfg.overrides) {
    if (k == "alpha") p.alpha = parse_real(k, v);
    else if (k == "beta") p.beta = parse_real(k, v);
    else if (k == "epoch_len") p.epoch_len = parse_small(k, v);
    else if (k == "inner_len") p.inner_len = parse_small(k, v);
    else if (k == "batch_x") p.batch_x = parse_small(k, v);
    else if (k == "batch_y") p.batch_y = parse_small(k, v);
    else if (k == "snapshot_batch") p.snapshot_batch = parse_int(k, v);
    else if (k == "snapshot_mode") p.snapshot_mode = v == "full" ? SnapshotMode::FullSum : SnapshotMode::LargeBatch;
    else if (k == "outer_len") p.outer_len = parse_int(k, v);
    else if (k == "zeta") p.zeta = parse_real(k, v);
    else if (k == "init") init = v;
  }
  apply_smoothing_overrides(cfg, p.smoothing);

  if (init == "none") {
    p.init = VrgdaParams::Init::Skip;
  } else if (init == "light") {
    // One cheap epoch at the ascent stepsize.
    p.init = VrgdaParams::Init::Fixed;
    IsarahParams& ip = p.init_params;
    ip.gamma = p.beta;
    ip.inner_len = std::max(1, p.inner_len);
    ip.outer_len = 1;
    ip.inner_batch = p.batch_y;
    ip.snapshot_mode = p.snapshot_mode;
    ip.snapshot_batch = static_cast<int>(std::min<std::int64_t>(p.snapshot_batch, std::numeric_limits<int>::max()));
    ip.tau = p.smoothing.mu2;
    ip.delta = p.smoothing.delta;
  }
  p.validate();
  return p;
}

BaselineParams make_baseline_params(const ExperimentConfig& cfg, const MinimaxProblem& problem) {
  const Index d1 = problem.dim_x(), d2 = problem.dim_y();
  SmoothingConfig smoothing;
  std::int64_t outer_len;
  if (cfg.schedule == Schedule::Benchmark) {
    smoothing = SmoothingConfig{cfg.bench_smoothing, cfg.bench_smoothing, cfg.bench_smoothing,
                                cfg.bench_smoothing};
    outer_len = vrgda_defaults(problem.constants(), d1, d2, cfg.eps, cfg.phi_gap,
                               Profile::Practical, finite_n(problem))
                    .outer_len;
  } else {
    const VrgdaParams ref = vrgda_defaults(problem.constants(), d1, d2, cfg.eps, cfg.phi_gap,
                                           cfg.profile, finite_n(problem));
    smoothing = ref.smoothing;
    outer_len = ref.outer_len;
  }
  BaselineParams p = baseline_defaults(d1, d2, cfg.eps, smoothing, outer_len, cfg.batch_c, cfg.eta,
                                       cfg.timescale_ratio, cfg.msa_inner_len);
  for (const auto& [k, v] : cfg.overrides) {
    if (k == "batch_x") p.batch_x = parse_small(k, v);
    else if (k == "batch_y") p.batch_y = parse_small(k, v);
    else if (k == "outer_len") p.outer_len = parse_int(k, v);
  }
  apply_smoothing_overrides(cfg, p.smoothing);
  p.validate();
  return p;
}

namespace {

RunTrace run_isarah(const ExperimentConfig& cfg, const ExperimentProblem& ep,
                    const RunOptions& options) {
  const MinimaxProblem& problem = *ep.problem;
  const RandomStream root(cfg.seed);
  RandomStream init_rng = root.substream("init");
  Projection projection;
  if (problem.y_constraint() == YConstraint::Simplex) projection = project_simplex;
  Vector y0 = initial_y(problem, options);
  if (projection) y0 = projection(y0);

  const NegatedInnerObjective objective(problem, ep.x0);
  const bool full_sum = is_finite_sum(problem.regime());
  RunTrace trace;
  trace.x_last = ep.x0;
  trace.y_last = y0;

  auto emit = [&](std::int64_t iter, std::int64_t queries, const Vector& w) {
    IterationRecord rec;
    rec.iter = iter;
    rec.queries = queries;
    rec.x = w;
    if (is_eval_iteration(iter, options)) {
      if (auto v = objective.true_value(w)) rec.phi = *v;
      if (auto g = objective.true_gradient(w)) {
        rec.grad_phi_norm = g->norm();
        rec.delta_t = g->squaredNorm();
      }
    }
    trace.records.push_back(std::move(rec));
    if (options.on_record) options.on_record(trace.records.back());
  };

  try {
    if (options.query_budget &&
        isarah_probe_cost(objective.dim(), problem.constants(), cfg.eps, finite_n(problem)) >
            *options.query_budget) {
      trace.budget_exhausted = true;
      trace.x_hat = trace.y_last;
      return trace;
    }
    IsarahSchedule schedule =
        isarah_probe_schedule(objective, y0, problem.constants(), cfg.eps, full_sum, init_rng);
    trace.counter.add("probe", schedule.probe_queries);
    IsarahParams params = schedule.params;
    const std::int64_t per_outer =
        isarah_query_cost(params, objective.dim(), finite_n(problem)) /
        params.outer_len;
    if (options.query_budget) {
      const std::int64_t room = *options.query_budget - trace.counter.total();
      const std::int64_t fit = room > 0 ? room / per_outer : 0;
      if (fit < params.outer_len) {
        trace.budget_exhausted = true;
        params.outer_len = static_cast<int>(fit);
      }
    }
    emit(0, trace.counter.total(), y0);
    if (params.outer_len > 0) {
      QueryCounter counter;
      const std::int64_t base = trace.counter.total();
      const IsarahResult result =
          isarah_run(objective, y0, params, init_rng, counter, projection);
      for (const auto& [phase, q] : counter.breakdown()) trace.counter.add(phase, q);
      for (const IsarahTraceEntry& e : result.trace) emit(e.outer, base + e.queries, e.w);
      trace.y_last = result.w_out;
    }
  } catch (const OracleFailure& e) {
    trace.failure = e.what();
  }
  trace.x_hat = trace.y_last;
  trace.output_index = trace.records.empty() ? 0 : trace.records.size() - 1;
  return trace;
}

}  // namespace

RunTrace run_algorithm(const ExperimentConfig& cfg, const ExperimentProblem& ep,
                       const RunOptions& options) {
  const RandomStream rng(cfg.seed);
  switch (cfg.algorithm) {
    case Algorithm::Vrgda: {
      const VrgdaParams p = make_vrgda_params(cfg, *ep.problem);
      return vrgda_run(*ep.problem, ep.x0, p, rng, options);
    }
    case Algorithm::Sgda:
      return zo_sgda_run(*ep.problem, ep.x0, make_baseline_params(cfg, *ep.problem), rng, options);
    case Algorithm::Sgdmsa:
      return zo_sgdmsa_run(*ep.problem, ep.x0, make_baseline_params(cfg, *ep.problem), rng,
                           options);
    case Algorithm::Isarah:
      return run_isarah(cfg, ep, options);
  }
  throw ConfigError("unknown algorithm");
}

std::string format_trace_row(const IterationRecord& r) {
  std::string row = std::to_string(r.iter) + ',' + std::to_string(r.queries);
  for (const auto& field : {r.phi, r.grad_phi_norm, r.delta_t, r.Delta_t}) {
    row += ',';
    if (field) row += shortest(*field);
  }
  return row;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  ExperimentOutcome outcome;
  ExperimentProblem ep;
  try {
    ep = make_problem(cfg);
    // Builds (and so validates) the schedule before any output is written.
    if (cfg.algorithm == Algorithm::Vrgda) (void)make_vrgda_params(cfg, *ep.problem);
    if (cfg.algorithm == Algorithm::Sgda || cfg.algorithm == Algorithm::Sgdmsa)
      (void)make_baseline_params(cfg, *ep.problem);
  } catch (const ParseError& e) {
    log << "error: data file " << e.what() << '\n';
    outcome.exit_code = 2;
    return outcome;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 2;
    return outcome;
  } catch (const PreconditionViolation& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 2;
    return outcome;
  }

  std::ofstream csv(cfg.output, std::ios::binary | std::ios::trunc);
  if (!csv) {
    log << "error: cannot write '" << cfg.output << "'\n";
    outcome.exit_code = 2;
    return outcome;
  }
  csv << kTraceHeader << '\n' << std::flush;

  RunOptions options;
  options.query_budget = cfg.query_budget;
  options.evaluator = ep.evaluator;
  options.eval_every = cfg.eval_every;
  options.on_record = [&](const IterationRecord& r) {
    if (!is_eval_iteration(r.iter, options)) return;
    csv << format_trace_row(r) << '\n' << std::flush;
    ++outcome.rows;
  };

  RunTrace trace;
  try {
    trace = run_algorithm(cfg, ep, options);
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 2;
    return outcome;
  }
  outcome.queries = trace.counter.total();
  outcome.eval_queries = trace.eval_queries;
  outcome.failure = trace.failure;

  std::ofstream side(cfg.output + ".eval_queries", std::ios::binary | std::ios::trunc);
  side << "algorithm=" << algorithm_name(cfg.algorithm) << '\n'
       << "eval_queries=" << trace.eval_queries << '\n'
       << "algorithm_queries=" << trace.counter.total() << '\n'
       << "init_queries=" << trace.init_queries << '\n'
       << "records=" << trace.records.size() << '\n'
       << "output_index=" << trace.output_index << '\n'
       << "budget_exhausted=" << (trace.budget_exhausted ? 1 : 0) << '\n';

  if (trace.failure) {
    log << "error: oracle failure: " << *trace.failure << '\n';
    outcome.exit_code = 3;
    return outcome;
  }
  log << algorithm_name(cfg.algorithm) << ": " << trace.records.size() << " iterations, "
      << trace.counter.total() << " queries, " << outcome.rows << " rows -> " << cfg.output
      << '\n';
  return outcome;
}

std::optional<std::int64_t> queries_to_target(std::istream& csv, double target,
                                              const std::string& name) {
  std::string line;
  if (!std::getline(csv, line)) throw SchemaMismatch(name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw SchemaMismatch(name + ": unexpected header '" + line + "'");
  std::size_t line_no = 1;
  std::optional<std::int64_t> hit;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    const std::string where = name + " line " + std::to_string(line_no);
    if (fields.size() != 6) throw SchemaMismatch(where + ": expected 6 fields");
    std::int64_t queries = 0;
    try {
      queries = parse_int("queries", fields[1]);
      for (std::size_t i = 2; i < 6; ++i)
        if (!fields[i].empty()) (void)parse_real("field", fields[i]);
    } catch (const ConfigError&) {
      throw SchemaMismatch(where + ": malformed number");
    }
    if (!hit && !fields[2].empty() && parse_real("phi", fields[2]) <= target) hit = queries;
  }
  return hit;
}

std::vector<CompareRow> compare_traces(const std::vector<std::string>& paths, double target) {
  std::vector<CompareRow> out;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw SchemaMismatch("cannot open '" + path + "'");
    out.push_back(CompareRow{path, queries_to_target(in, target, path)});
  }
  return out;
}

}  // namespace zovr
