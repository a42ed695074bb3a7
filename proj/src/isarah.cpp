#include "zovr/isarah.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace zovr {

void IsarahParams::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("isarah: gamma must be > 0");
  if (inner_len < 1 || outer_len < 1) throw InvalidArgument("isarah: loop lengths must be >= 1");
  if (snapshot_batch < 1 || inner_batch < 1) throw InvalidArgument("isarah: batches must be >= 1");
  if (!(tau > 0.0) || !(delta > 0.0)) throw InvalidArgument("isarah: tau, delta must be > 0");
}

namespace {

void check_positive(double l, double mu, Index d, double eps) {
  if (!(l > 0.0) || !(mu > 0.0) || d < 1 || !(eps > 0.0))
    throw InvalidArgument("isarah_defaults: l, mu, d, eps must be positive");
}

int outer_length(double factor, double grad0_norm_sq, double eps) {
  if (!(eps < grad0_norm_sq)) {
    std::clog << "zovr: isarah target accuracy " << eps << " >= initial gradient norm^2 "
              << grad0_norm_sq << "; using a single outer iteration\n";
    return 1;
  }
  return static_cast<int>(std::max<std::int64_t>(1, ceil_count(std::log2(factor * grad0_norm_sq / eps))));
}

int inner_length(double l, double mu) {
  return static_cast<int>(std::max<std::int64_t>(1, ceil_count(36.0 * l / mu) - 1));
}

}  // namespace

IsarahParams isarah_defaults(double l, double mu, double sigma, Index d, double eps,
                             double grad0_norm_sq) {
  check_positive(l, mu, d, eps);
  if (sigma < 0.0) throw InvalidArgument("isarah_defaults: sigma must be >= 0");
  const double dd = static_cast<double>(d);
  IsarahParams p;
  p.gamma = 2.0 / (9.0 * l);
  p.inner_len = inner_length(l, mu);
  p.snapshot_batch = static_cast<int>(std::max<std::int64_t>(1, ceil_count(25.0 * sigma * sigma / eps)));
  p.inner_batch = static_cast<int>(d);
  p.outer_len = outer_length(5.0, grad0_norm_sq, eps);
  p.delta = 2.0 * std::sqrt(eps) / (5.0 * l * std::sqrt(dd));
  p.tau = std::min(std::sqrt(eps) / (3.0 * l * std::pow(dd + 3.0, 1.5)),
                   std::sqrt(2.0 * eps / (5.0 * l * mu * dd)));
  p.snapshot_mode = SnapshotMode::LargeBatch;
  return p;
}

IsarahParams isarah_defaults_full_sum(double l, double mu, Index d, double eps,
                                      double grad0_norm_sq) {
  check_positive(l, mu, d, eps);
  const double dd = static_cast<double>(d);
  IsarahParams p;
  p.gamma = 2.0 / (9.0 * l);
  p.inner_len = inner_length(l, mu);
  p.snapshot_batch = 1;
  p.inner_batch = static_cast<int>(d);
  p.outer_len = outer_length(4.0, grad0_norm_sq, eps);
  p.delta = std::sqrt(eps) / (3.0 * l * std::sqrt(dd));
  p.tau = std::min(std::sqrt(eps) / (3.0 * l * std::pow(dd + 3.0, 1.5)),
                   std::sqrt(eps / (2.0 * l * mu * dd)));
  p.snapshot_mode = SnapshotMode::FullSum;
  return p;
}

IsarahSchedule isarah_probe_schedule(const StochasticObjective& objective, const Vector& w0,
                                     const ProblemConstants& c, double eps, bool full_sum,
                                     RandomStream& rng) {
  const Index d = objective.dim();
  // delta and B1 do not depend on the initial gradient norm.
  const double any_gap = 2.0 * eps;
  const IsarahParams probe =
      full_sum ? isarah_defaults_full_sum(c.lipschitz, c.strong_concavity, d, eps, any_gap)
               : isarah_defaults(c.lipschitz, c.strong_concavity, c.variance_sigma, d, eps, any_gap);
  const std::vector<Sample> batch =
      full_sum ? full_batch(objective.regime())
               : sample_batch(objective, static_cast<std::size_t>(probe.snapshot_batch), rng);
  const BlockEstimate g0 = coord_grad(objective, w0, batch, probe.delta);
  const double g0_norm_sq = g0.grad.squaredNorm();
  IsarahSchedule s;
  s.probe_queries = g0.queries;
  s.params = full_sum ? isarah_defaults_full_sum(c.lipschitz, c.strong_concavity, d, eps, g0_norm_sq)
                      : isarah_defaults(c.lipschitz, c.strong_concavity, c.variance_sigma, d, eps,
                                        g0_norm_sq);
  return s;
}

std::int64_t isarah_probe_cost(Index d, const ProblemConstants& c, double eps,
                               std::optional<std::size_t> finite_sum_n) {
  if (finite_sum_n) return 2 * d * static_cast<std::int64_t>(*finite_sum_n);
  const IsarahParams probe =
      isarah_defaults(c.lipschitz, c.strong_concavity, c.variance_sigma, d, eps, 2.0 * eps);
  return 2 * d * static_cast<std::int64_t>(probe.snapshot_batch);
}

std::int64_t isarah_query_cost(const IsarahParams& params, Index d,
                               std::optional<std::size_t> finite_sum_n) {
  std::int64_t snapshot_samples = params.snapshot_batch;
  if (params.snapshot_mode == SnapshotMode::FullSum) {
    if (!finite_sum_n) throw PreconditionViolation("full-sum snapshot needs n");
    snapshot_samples = static_cast<std::int64_t>(*finite_sum_n);
  }
  const std::int64_t per_outer =
      2 * d * snapshot_samples + 4 * static_cast<std::int64_t>(params.inner_batch) * (params.inner_len - 1);
  return params.outer_len * per_outer;
}

IsarahResult isarah_run(const StochasticObjective& objective, const Vector& w0,
                        const IsarahParams& params, RandomStream& rng, QueryCounter& counter,
                        const Projection& projection) {
  params.validate();
  if (w0.size() != objective.dim()) throw InvalidArgument("isarah_run: w0 dimension mismatch");
  if (params.snapshot_mode == SnapshotMode::FullSum && !is_finite_sum(objective.regime()))
    throw PreconditionViolation("isarah_run: full-sum snapshot requires a finite-sum objective");
  auto project = [&](Vector w) { return projection ? projection(w) : w; };

  const auto b2 = static_cast<std::size_t>(params.inner_batch);
  IsarahResult result;
  Vector w_tilde = w0;
  std::vector<Vector> iterates;
  iterates.reserve(static_cast<std::size_t>(params.inner_len) + 1);

  for (int t = 1; t <= params.outer_len; ++t) {
    const std::vector<Sample> snapshot_batch =
        params.snapshot_mode == SnapshotMode::FullSum
            ? full_batch(objective.regime())
            : sample_batch(objective, static_cast<std::size_t>(params.snapshot_batch), rng);
    BlockEstimate snap = coord_grad(objective, w_tilde, snapshot_batch, params.delta);
    counter.add("isarah_snapshot", snap.queries);
    Vector v = std::move(snap.grad);

    iterates.clear();
    iterates.push_back(w_tilde);
    iterates.push_back(project(w_tilde - params.gamma * v));
    for (int k = 1; k < params.inner_len; ++k) {
      const std::vector<Sample> batch = sample_batch(objective, b2, rng);
      const std::vector<Vector> dirs = gaussian_directions(objective.dim(), b2, rng);
      const BlockEstimate at_new = gauss_grad_joint(objective, iterates[k], batch, dirs, params.tau);
      const BlockEstimate at_old =
          gauss_grad_joint(objective, iterates[k - 1], batch, dirs, params.tau);
      counter.add("isarah_inner", at_new.queries + at_old.queries);
      v += at_new.grad - at_old.grad;
      iterates.push_back(project(iterates[k] - params.gamma * v));
    }

    w_tilde = iterates[rng.uniform_index(iterates.size())];
    IsarahTraceEntry entry;
    entry.outer = t;
    entry.w = w_tilde;
    if (auto g = objective.true_gradient(w_tilde)) entry.grad_norm_sq = g->squaredNorm();
    entry.queries = counter.total();
    result.trace.push_back(entry);
  }
  result.w_out = std::move(w_tilde);
  return result;
}

}  // namespace zovr
