#ifndef ZOVR_TRACE_HPP
#define ZOVR_TRACE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zovr/estimators.hpp"

namespace zovr {

/// Phi(x) and, when available, ||grad Phi(x)||, with the number of oracle
/// evaluations the report cost (kept out of the algorithm's counter).
struct PhiReport {
  double phi = 0.0;
  std::optional<double> grad_norm;
  std::int64_t eval_queries = 0;
};

using PhiEvaluator = std::function<PhiReport(const Vector& x)>;

/// State at the start of outer iteration `iter`: `queries` is what the
/// algorithm had spent to reach x_t.
struct IterationRecord {
  std::int64_t iter = 0;
  std::int64_t queries = 0;
  Vector x;
  double step_x = 0.0;
  bool snapshot = false;
  std::optional<double> phi;
  std::optional<double> grad_phi_norm;
  std::optional<double> delta_t;  // ||grad_y f(x_t, y_t)||^2
  std::optional<double> Delta_t;  // estimator error at (x_t, y_t)
};

struct RunOptions {
  /// Starting y; zero (or the simplex centroid under a simplex constraint)
  /// when empty.
  std::optional<Vector> y0;
  /// Hard cap: an iteration starts only if its full cost fits.
  std::optional<std::int64_t> query_budget;
  PhiEvaluator evaluator;
  /// Phi and diagnostics are computed when iter % eval_every == 0.
  int eval_every = 1;
  std::function<void(const IterationRecord&)> on_record;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  Vector x_hat;
  std::size_t output_index = 0;
  Vector x_last;
  Vector y_last;
  std::int64_t init_queries = 0;
  std::int64_t eval_queries = 0;
  bool budget_exhausted = false;
  /// Set when the oracle failed; the records up to the failure are kept.
  std::optional<std::string> failure;
  QueryCounter counter;

  /// Record with the smallest ||grad Phi|| (or Phi when no gradient norm was
  /// reported) among evaluated records.
  std::optional<std::size_t> best_index() const;
};

/// Default starting y for a problem.
Vector initial_y(const MinimaxProblem& problem, const RunOptions& options);

/// Fills phi / grad_phi_norm / delta_t / Delta_t on an evaluation iteration.
/// `v`, `u` may be empty when the algorithm has no estimator pair at (x, y).
void annotate_record(IterationRecord& record, const MinimaxProblem& problem, const Vector& y,
                     const Vector* v, const Vector* u, const RunOptions& options,
                     RunTrace& trace);

bool is_eval_iteration(std::int64_t iter, const RunOptions& options);

/// Picks the uniform output iterate with `rng`.
void finish_trace(RunTrace& trace, const Vector& x0, RandomStream& rng);

}  // namespace zovr

#endif  // ZOVR_TRACE_HPP
