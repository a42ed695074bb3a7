#include "zovr/vrgda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zovr/simplex.hpp"

namespace zovr {

void VrgdaParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("vrgda: alpha, beta must be > 0");
  if (!(zeta > 0.0)) throw InvalidArgument("vrgda: zeta must be > 0");
  if (epoch_len < 1) throw InvalidArgument("vrgda: epoch length must be >= 1");
  if (inner_len < 0) throw InvalidArgument("vrgda: inner length must be >= 0");
  if (outer_len < 1) throw InvalidArgument("vrgda: outer length must be >= 1");
  if (snapshot_batch < 1 || batch_x < 1 || batch_y < 1)
    throw InvalidArgument("vrgda: batches must be >= 1");
  smoothing.validate();
  if (init == Init::Fixed) init_params.validate();
}

namespace {

int to_int(std::int64_t v) {
  if (v > std::numeric_limits<int>::max()) throw InvalidArgument("schedule value overflows int");
  return static_cast<int>(v);
}

}  // namespace

VrgdaParams vrgda_defaults(const ProblemConstants& constants, Index d1, Index d2, double eps,
                           double phi_gap, Profile profile,
                           std::optional<std::size_t> finite_sum_n) {
  const double l = constants.lipschitz;
  const double sigma = constants.variance_sigma;
  if (!(l > 0.0) || !(constants.strong_concavity > 0.0) || d1 < 1 || d2 < 1 || !(phi_gap > 0.0))
    throw InvalidArgument("vrgda_defaults: constants, dimensions and gap must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("vrgda_defaults: eps must lie in (0, 1)");
  if (finite_sum_n && *finite_sum_n < 1) throw InvalidArgument("vrgda_defaults: n must be >= 1");
  const double kappa = constants.kappa();
  const double x_dim = static_cast<double>(d1), y_dim = static_cast<double>(d2);

  VrgdaParams p;
  p.zeta = 1.0 / kappa;
  if (profile == Profile::Theory) {
    p.alpha = 1.0 / (24.0 * (kappa + 1.0) * l);
    p.beta = 2.0 / (13.0 * l);
    p.inner_len = to_int(std::max<std::int64_t>(0, ceil_count(104.0 * kappa) - 1));
    p.epoch_len = to_int(std::max<std::int64_t>(1, ceil_count(2800.0 * kappa / (13.0 * eps * (kappa + 1.0)))));
    p.batch_x = to_int(ceil_count(5600.0 * (x_dim + 4.0) * kappa / eps));
    p.batch_y = to_int(ceil_count(5600.0 * (y_dim + 4.0) * kappa / eps));
    p.snapshot_batch = std::max<std::int64_t>(1, ceil_count(40320.0 * sigma * sigma * kappa * kappa / (eps * eps)));
    p.outer_len = ceil_count(std::max(1728.0 * (kappa + 1.0) * l * phi_gap / (eps * eps),
                                      810.0 * kappa / (eps * eps)));
    p.smoothing.delta = eps / (71.0 * kappa * l * std::sqrt(x_dim + y_dim));
    p.smoothing.mu1 = eps / (71.0 * std::pow(kappa, 2.5) * l * std::pow(x_dim + 6.0, 1.5));
    p.smoothing.mu2 = eps / (71.0 * std::pow(kappa, 2.5) * l * std::pow(y_dim + 6.0, 1.5));
    if (finite_sum_n) {
      const double n = static_cast<double>(*finite_sum_n);
      p.snapshot_mode = SnapshotMode::FullSum;
      if (n >= kappa * kappa) {
        p.batch_x = to_int(ceil_count(5600.0 * (x_dim + 4.0) * kappa * std::sqrt(n)));
        p.batch_y = to_int(ceil_count(5600.0 * (y_dim + 4.0) * kappa * std::sqrt(n)));
        p.epoch_len = to_int(std::max<std::int64_t>(
            1, ceil_count(2800.0 * kappa * std::sqrt(n) / (13.0 * (kappa + 1.0)))));
      } else {
        p.batch_x = to_int(56 * (d1 + 4) + 420);
        p.batch_y = to_int(56 * (d2 + 4) + 420);
        p.epoch_len = 1;
      }
    }
  } else {
    p.alpha = 1.0 / (2.0 * (kappa + 1.0) * l);
    p.beta = 1.0 / (3.0 * l);
    p.inner_len = to_int(ceil_count(2.0 * kappa));
    p.epoch_len = to_int(std::max<std::int64_t>(1, ceil_count(1.0 / eps)));
    p.batch_x = to_int(ceil_count((x_dim + 4.0) * kappa / eps));
    p.batch_y = to_int(ceil_count((y_dim + 4.0) * kappa / eps));
    p.snapshot_batch = std::max<std::int64_t>(1, ceil_count(sigma * sigma * kappa * kappa / (eps * eps)));
    p.outer_len = ceil_count(std::max((kappa + 1.0) * l * phi_gap / (eps * eps), kappa / (eps * eps)));
    p.smoothing.delta = eps / (kappa * l * std::sqrt(x_dim + y_dim));
    p.smoothing.mu1 = eps / (std::pow(kappa, 2.5) * l * std::pow(x_dim + 6.0, 1.5));
    p.smoothing.mu2 = eps / (std::pow(kappa, 2.5) * l * std::pow(y_dim + 6.0, 1.5));
    if (finite_sum_n) {
      const auto n = static_cast<std::int64_t>(*finite_sum_n);
      if (p.snapshot_batch >= n) p.snapshot_mode = SnapshotMode::FullSum;
      p.batch_x = to_int(std::min<std::int64_t>(p.batch_x, n));
      p.batch_y = to_int(std::min<std::int64_t>(p.batch_y, n));
    }
  }
  p.smoothing.tau = std::min(p.smoothing.mu1, p.smoothing.mu2);
  return p;
}

namespace {

std::int64_t snapshot_samples(const VrgdaParams& params, std::optional<std::size_t> n) {
  if (params.snapshot_mode == SnapshotMode::LargeBatch) return params.snapshot_batch;
  if (!n) throw PreconditionViolation("full-sum snapshot needs a finite-sum problem");
  return static_cast<std::int64_t>(*n);
}

std::optional<std::size_t> finite_n(const MinimaxProblem& problem) {
  const Regime r = problem.regime();
  if (is_finite_sum(r)) return finite_sum_size(r);
  return std::nullopt;
}

}  // namespace

std::int64_t vrgda_loop_query_cost(const VrgdaParams& params, Index d1, Index d2,
                                   std::int64_t iterations, std::optional<std::size_t> finite_sum_n) {
  if (iterations <= 0) return 0;
  const std::int64_t snapshots = (iterations + params.epoch_len - 1) / params.epoch_len;
  return snapshots * 2 * snapshot_samples(params, finite_sum_n) * (d1 + d2) +
         iterations * inner_query_cost(params.inner_len, params.batch_x, params.batch_y);
}

VrgdaTrace vrgda_run(const MinimaxProblem& problem, const Vector& x0, const VrgdaParams& params,
                     const RandomStream& rng, const RunOptions& options) {
  validate(problem);
  params.validate();
  if (x0.size() != problem.dim_x()) throw InvalidArgument("vrgda_run: x0 dimension mismatch");
  const std::optional<std::size_t> n = finite_n(problem);
  if (params.snapshot_mode == SnapshotMode::FullSum && !n)
    throw PreconditionViolation("vrgda_run: full-sum snapshot requires a finite-sum problem");

  RandomStream init_rng = rng.substream("init");
  RandomStream snapshot_rng = rng.substream("snapshot");
  RandomStream inner_rng = rng.substream("inner");
  RandomStream output_rng = rng.substream("output");
  const ProblemConstants c = problem.constants();
  Projection projection;
  if (problem.y_constraint() == YConstraint::Simplex) projection = project_simplex;

  VrgdaTrace trace;
  QueryCounter& counter = trace.counter;
  Vector x = x0;
  Vector y = initial_y(problem, options);
  if (projection) y = projection(y);
  trace.x_last = x;
  trace.y_last = y;

  try {
    // Initialization: approximately maximize f(x0, .) to accuracy zeta.
    // Every piece must fit the remaining budget before it starts.
    const NegatedInnerObjective inner_objective(problem, x0);
    const Index d2 = problem.dim_y();
    auto room = [&] {
      return options.query_budget ? *options.query_budget - counter.total()
                                  : std::numeric_limits<std::int64_t>::max();
    };
    const bool full_sum = params.snapshot_mode == SnapshotMode::FullSum;
    bool run_init = params.init != VrgdaParams::Init::Skip;
    if (params.init == VrgdaParams::Init::Auto) {
      if (isarah_probe_cost(d2, c, params.zeta, full_sum ? n : std::nullopt) > room()) {
        trace.budget_exhausted = true;
        run_init = false;
      } else {
        const IsarahSchedule schedule =
            isarah_probe_schedule(inner_objective, y, c, params.zeta, full_sum, init_rng);
        counter.add("init", schedule.probe_queries);
        trace.init_probe_queries = schedule.probe_queries;
        trace.init_params = schedule.params;
      }
    } else {
      trace.init_params = params.init_params;
    }
    if (run_init) {
      const std::int64_t per_outer =
          isarah_query_cost(trace.init_params, d2, n) / trace.init_params.outer_len;
      const std::int64_t fit = room() / per_outer;
      if (fit < trace.init_params.outer_len) {
        trace.budget_exhausted = true;
        trace.init_params.outer_len = static_cast<int>(fit);
      }
    }
    if (run_init && trace.init_params.outer_len > 0) {
      QueryCounter init_counter;
      y = isarah_run(inner_objective, y, trace.init_params, init_rng, init_counter, projection)
              .w_out;
      counter.add("init", init_counter.total());
    }
    trace.init_queries = counter.total();
    trace.y_last = y;

    const Index d1 = problem.dim_x();
    const std::int64_t snapshot_cost = 2 * snapshot_samples(params, n) * (d1 + d2);
    const std::int64_t inner_cost =
        inner_query_cost(params.inner_len, params.batch_x, params.batch_y);
    GradEstimate est;
    for (std::int64_t t = 0; t < params.outer_len && !trace.budget_exhausted; ++t) {
      const bool snapshot = t % params.epoch_len == 0;
      const std::int64_t cost = (snapshot ? snapshot_cost : 0) + inner_cost;
      if (options.query_budget && counter.total() + cost > *options.query_budget) {
        trace.budget_exhausted = true;
        break;
      }
      IterationRecord rec;
      rec.iter = t;
      rec.queries = counter.total();
      rec.x = x;
      rec.step_x = params.alpha;
      rec.snapshot = snapshot;

      if (snapshot) {
        const std::vector<Sample> batch =
            params.snapshot_mode == SnapshotMode::FullSum
                ? full_batch(problem.regime())
                : sample_batch(problem, static_cast<std::size_t>(params.snapshot_batch),
                               snapshot_rng);
        est = coord_grad(problem, x, y, batch, params.smoothing.delta, Block::Both);
        counter.add("snapshot", est.queries);
      }
      if (is_eval_iteration(t, options)) annotate_record(rec, problem, y, &est.v, &est.u, options, trace);

      Vector x_next = x - params.alpha * est.v;
      InnerState state{x, x_next, y, est, params.beta, params.inner_len, params.batch_x,
                       params.batch_y};
      InnerResult inner = maximize_step(state, problem, params.smoothing, projection, inner_rng,
                                        counter);
      est.v = std::move(inner.v_carry);
      est.u = std::move(inner.u_carry);
      est.queries = inner.queries;
      x = std::move(x_next);
      y = std::move(inner.y_next);
      trace.x_last = x;
      trace.y_last = y;

      trace.records.push_back(std::move(rec));
      if (options.on_record) options.on_record(trace.records.back());
    }
  } catch (const OracleFailure& e) {
    trace.failure = e.what();
  }
  finish_trace(trace, x0, output_rng);
  return trace;
}

}  // namespace zovr
