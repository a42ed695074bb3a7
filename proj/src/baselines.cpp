#include "zovr/baselines.hpp"

#include <cmath>

#include "zovr/isarah.hpp"
#include "zovr/simplex.hpp"

namespace zovr {

void BaselineParams::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("baseline: eta must be >= 0");
  if (!(timescale_ratio > 0.0)) throw InvalidArgument("baseline: timescale ratio must be > 0");
  if (batch_x < 1 || batch_y < 1) throw InvalidArgument("baseline: batches must be >= 1");
  if (outer_len < 1) throw InvalidArgument("baseline: outer length must be >= 1");
  if (msa_inner_len < 1) throw InvalidArgument("baseline: msa inner length must be >= 1");
  smoothing.validate();
}

BaselineParams baseline_defaults(Index d1, Index d2, double eps, const SmoothingConfig& smoothing,
                                 std::int64_t outer_len, double c, double eta,
                                 double timescale_ratio, int msa_inner_len) {
  if (!(eps > 0.0) || !(c > 0.0)) throw InvalidArgument("baseline_defaults: eps, C must be > 0");
  BaselineParams p;
  p.eta = eta;
  p.timescale_ratio = timescale_ratio;
  p.batch_x = static_cast<int>(ceil_count(c * static_cast<double>(d1) / (eps * eps)));
  p.batch_y = static_cast<int>(ceil_count(c * static_cast<double>(d2) / (eps * eps)));
  p.smoothing = smoothing;
  p.outer_len = outer_len;
  p.msa_inner_len = msa_inner_len;
  return p;
}

std::int64_t zo_sgda_query_cost(const BaselineParams& params, std::int64_t iterations) {
  return iterations * 2 * static_cast<std::int64_t>(params.batch_x + params.batch_y);
}

std::int64_t zo_sgdmsa_query_cost(const BaselineParams& params, std::int64_t iterations) {
  return iterations * (2 * static_cast<std::int64_t>(params.batch_x) +
                       2 * static_cast<std::int64_t>(params.msa_inner_len) * params.batch_y);
}

namespace {

struct Setup {
  Projection projection;
  RandomStream x_rng;
  RandomStream y_rng;
  RandomStream output_rng;
};

Setup setup(const MinimaxProblem& problem, const Vector& x0, const BaselineParams& params,
            const RandomStream& rng) {
  validate(problem);
  params.validate();
  if (x0.size() != problem.dim_x()) throw InvalidArgument("baseline: x0 dimension mismatch");
  Setup s{{}, rng.substream("x"), rng.substream("y"), rng.substream("output")};
  if (problem.y_constraint() == YConstraint::Simplex) s.projection = project_simplex;
  return s;
}

BlockEstimate estimate_x(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                         const BaselineParams& params, RandomStream& rng) {
  const auto b = static_cast<std::size_t>(params.batch_x);
  const auto batch = sample_batch(problem, b, rng);
  const auto dirs = gaussian_directions(problem.dim_x(), b, rng);
  return gauss_grad_x(problem, x, y, batch, dirs, params.smoothing.mu1);
}

BlockEstimate estimate_y(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                         const BaselineParams& params, RandomStream& rng) {
  const auto b = static_cast<std::size_t>(params.batch_y);
  const auto batch = sample_batch(problem, b, rng);
  const auto dirs = gaussian_directions(problem.dim_y(), b, rng);
  return gauss_grad_y(problem, x, y, batch, dirs, params.smoothing.mu2);
}

bool over_budget(const RunOptions& options, const QueryCounter& counter, std::int64_t cost) {
  return options.query_budget && counter.total() + cost > *options.query_budget;
}

}  // namespace

RunTrace zo_sgda_run(const MinimaxProblem& problem, const Vector& x0,
                     const BaselineParams& params, const RandomStream& rng,
                     const RunOptions& options) {
  Setup s = setup(problem, x0, params, rng);
  RunTrace trace;
  Vector x = x0;
  Vector y = initial_y(problem, options);
  if (s.projection) y = s.projection(y);
  const double step_x = params.eta / params.timescale_ratio;
  const std::int64_t cost = zo_sgda_query_cost(params, 1);
  trace.x_last = x;
  trace.y_last = y;

  try {
    for (std::int64_t t = 0; t < params.outer_len; ++t) {
      if (over_budget(options, trace.counter, cost)) {
        trace.budget_exhausted = true;
        break;
      }
      IterationRecord rec;
      rec.iter = t;
      rec.queries = trace.counter.total();
      rec.x = x;
      rec.step_x = step_x;

      const BlockEstimate v = estimate_x(problem, x, y, params, s.x_rng);
      const BlockEstimate u = estimate_y(problem, x, y, params, s.y_rng);
      trace.counter.add("x", v.queries);
      trace.counter.add("y", u.queries);
      if (is_eval_iteration(t, options))
        annotate_record(rec, problem, y, &v.grad, &u.grad, options, trace);

      x -= step_x * v.grad;
      y += params.eta * u.grad;
      if (s.projection) y = s.projection(y);
      trace.x_last = x;
      trace.y_last = y;
      trace.records.push_back(std::move(rec));
      if (options.on_record) options.on_record(trace.records.back());
    }
  } catch (const OracleFailure& e) {
    trace.failure = e.what();
  }
  finish_trace(trace, x0, s.output_rng);
  return trace;
}

RunTrace zo_sgdmsa_run(const MinimaxProblem& problem, const Vector& x0,
                       const BaselineParams& params, const RandomStream& rng,
                       const RunOptions& options) {
  Setup s = setup(problem, x0, params, rng);
  RunTrace trace;
  Vector x = x0;
  Vector y = initial_y(problem, options);
  if (s.projection) y = s.projection(y);
  const std::int64_t cost = zo_sgdmsa_query_cost(params, 1);
  trace.x_last = x;
  trace.y_last = y;

  try {
    for (std::int64_t t = 0; t < params.outer_len; ++t) {
      if (over_budget(options, trace.counter, cost)) {
        trace.budget_exhausted = true;
        break;
      }
      IterationRecord rec;
      rec.iter = t;
      rec.queries = trace.counter.total();
      rec.x = x;
      rec.step_x = params.eta;
      if (is_eval_iteration(t, options))
        annotate_record(rec, problem, y, nullptr, nullptr, options, trace);

      for (int j = 0; j < params.msa_inner_len; ++j) {
        const BlockEstimate u = estimate_y(problem, x, y, params, s.y_rng);
        trace.counter.add("y", u.queries);
        y += params.eta * u.grad;
        if (s.projection) y = s.projection(y);
      }
      const BlockEstimate v = estimate_x(problem, x, y, params, s.x_rng);
      trace.counter.add("x", v.queries);
      x -= params.eta * v.grad;
      trace.x_last = x;
      trace.y_last = y;
      trace.records.push_back(std::move(rec));
      if (options.on_record) options.on_record(trace.records.back());
    }
  } catch (const OracleFailure& e) {
    trace.failure = e.what();
  }
  finish_trace(trace, x0, s.output_rng);
  return trace;
}

}  // namespace zovr
