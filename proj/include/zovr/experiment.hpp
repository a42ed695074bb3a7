#ifndef ZOVR_EXPERIMENT_HPP
#define ZOVR_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zovr/baselines.hpp"
#include "zovr/dro.hpp"
#include "zovr/vrgda.hpp"

namespace zovr {

/// Bad configuration (unknown key, malformed value, out-of-range setting).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// CSV that does not carry the trace header.
class SchemaMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { Vrgda, Isarah, Sgda, Sgdmsa };

/// `default` uses the profile schedules; `benchmark` uses the fixed
/// stepsize / batch-constant settings of the DRO comparison.
enum class Schedule { Default, Benchmark };

struct ExperimentConfig {
  std::string problem = "quadratic";  // quadratic | dro

  // quadratic
  Index d1 = 10;
  Index d2 = 10;
  double kappa = 5.0;
  double sigma = 0.1;
  double c_spread = 1.5;
  bool finite_sum = false;
  std::size_t n = 100;
  std::uint64_t problem_seed = 1;

  // dro
  std::string data;
  std::optional<Index> num_features;
  std::size_t minority_count = 0;  // 0 keeps every row
  std::size_t ratio = 4;
  MinorityClass minority = MinorityClass::Positive;
  double reg_weight = 10.0;
  std::uint64_t subsample_seed = 0;

  Algorithm algorithm = Algorithm::Vrgda;
  Profile profile = Profile::Practical;
  Schedule schedule = Schedule::Default;
  double eps = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> query_budget;
  int eval_every = 1;
  std::string output = "trace.csv";
  double phi_gap = 1.0;
  double x0_scale = 1.0;

  // benchmark knobs and baseline settings
  double batch_c = 0.1;
  double eta = 0.01;
  double timescale_ratio = 10.0;
  int msa_inner_len = 5;
  int bench_inner_len = 5;
  double bench_smoothing = 1e-4;

  /// Per-parameter overrides applied after the schedule is built
  /// (alpha, beta, epoch_len, inner_len, batch_x, batch_y, snapshot_batch,
  /// snapshot_mode, outer_len, zeta, mu1, mu2, tau, delta, init).
  std::map<std::string, std::string> overrides;
};

/// Flat `key = value` text; `#` starts a comment. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Sets one key as if it appeared in the config file.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate(const ExperimentConfig& cfg);

std::string algorithm_name(Algorithm a);

/// A built problem together with its Phi evaluator and starting point.
struct ExperimentProblem {
  std::unique_ptr<MinimaxProblem> problem;
  PhiEvaluator evaluator;
  Vector x0;
};

ExperimentProblem make_problem(const ExperimentConfig& cfg);
/// Wraps an existing DRO instance.
ExperimentProblem make_problem(const DroInstance& instance, const Vector& x0);

VrgdaParams make_vrgda_params(const ExperimentConfig& cfg, const MinimaxProblem& problem);
BaselineParams make_baseline_params(const ExperimentConfig& cfg, const MinimaxProblem& problem);

/// Runs the configured algorithm. For zo-isarah the records describe the
/// outer iterates of the initialization subproblem min_y -f(x0, y): `phi` is
/// -f(x0, y), `grad_phi_norm` its gradient norm.
RunTrace run_algorithm(const ExperimentConfig& cfg, const ExperimentProblem& ep,
                       const RunOptions& options);

inline constexpr const char* kTraceHeader = "iter,queries,phi,grad_phi_norm,delta_t,Delta_t";

/// Writes one CSV row (no trailing newline).
std::string format_trace_row(const IterationRecord& r);

struct ExperimentOutcome {
  int exit_code = 0;
  std::size_t rows = 0;
  std::int64_t queries = 0;
  std::int64_t eval_queries = 0;
  std::optional<std::string> failure;
};

/// Builds, runs and writes `cfg.output` plus `cfg.output + ".eval_queries"`.
/// Exit codes: 0 ok, 2 bad config, 3 oracle failure (partial CSV kept).
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream& log);

struct CompareRow {
  std::string path;
  std::optional<std::int64_t> queries;  // empty: not reached
};

/// First `queries` value at which phi <= target, per file. Throws
/// SchemaMismatch on a bad header or row.
std::vector<CompareRow> compare_traces(const std::vector<std::string>& paths, double target);
std::optional<std::int64_t> queries_to_target(std::istream& csv, double target,
                                              const std::string& name = "csv");

}  // namespace zovr

#endif  // ZOVR_EXPERIMENT_HPP
