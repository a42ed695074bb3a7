#include "zovr/estimators.hpp"

#include <cmath>
#include <string>

namespace zovr {

void QueryCounter::add(std::string_view phase, std::int64_t queries) {
  if (queries < 0) throw InvalidArgument("QueryCounter: negative increment");
  total_ += queries;
  auto it = breakdown_.find(phase);
  if (it == breakdown_.end())
    breakdown_.emplace(std::string(phase), queries);
  else
    it->second += queries;
}

std::int64_t QueryCounter::phase(std::string_view name) const {
  auto it = breakdown_.find(name);
  return it == breakdown_.end() ? 0 : it->second;
}

void SmoothingConfig::validate() const {
  for (double r : {mu1, mu2, tau, delta})
    if (!(r > 0.0) || !std::isfinite(r))
      throw InvalidArgument("smoothing radii must be positive and finite");
}

namespace {

double checked(double value) {
  if (!std::isfinite(value)) throw OracleFailure("oracle returned a non-finite value");
  return value;
}

void check_batch(std::size_t batch, std::size_t dirs) {
  if (batch == 0) throw InvalidArgument("empty batch");
  if (batch != dirs) throw InvalidArgument("batch and direction counts differ");
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("radius must be positive");
}

// mean_i [g(base + r d_i; i) - g(base; i)] / r * d_i for any scalar oracle g.
template <typename Eval>
BlockEstimate forward_gaussian(const Vector& base, const std::vector<Vector>& dirs, double r,
                               Eval&& eval) {
  const std::size_t m = dirs.size();
  Vector acc = Vector::Zero(base.size());
  Vector shifted(base.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (dirs[i].size() != base.size()) throw InvalidArgument("direction dimension mismatch");
    const double f0 = checked(eval(base, i));
    shifted = base + r * dirs[i];
    const double f1 = checked(eval(shifted, i));
    acc += ((f1 - f0) / r) * dirs[i];
  }
  acc /= static_cast<double>(m);
  return {std::move(acc), static_cast<std::int64_t>(2 * m)};
}

// sum_j [g(base + delta e_j; i) - g(base - delta e_j; i)] / (2 delta) e_j,
// averaged over samples.
template <typename Eval>
Vector central_differences(const Vector& base, std::size_t samples, double delta, Eval&& eval) {
  Vector acc = Vector::Zero(base.size());
  Vector probe = base;
  for (std::size_t i = 0; i < samples; ++i) {
    for (Index j = 0; j < base.size(); ++j) {
      probe[j] = base[j] + delta;
      const double fp = checked(eval(probe, i));
      probe[j] = base[j] - delta;
      const double fm = checked(eval(probe, i));
      probe[j] = base[j];
      acc[j] += (fp - fm) / (2.0 * delta);
    }
  }
  return acc / static_cast<double>(samples);
}

}  // namespace

BlockEstimate gauss_grad_x(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                           const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                           double mu1) {
  check_batch(batch.size(), dirs.size());
  check_radius(mu1);
  return forward_gaussian(x, dirs, mu1, [&](const Vector& xs, std::size_t i) {
    return problem.eval(xs, y, batch[i]);
  });
}

BlockEstimate gauss_grad_y(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                           const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                           double mu2) {
  check_batch(batch.size(), dirs.size());
  check_radius(mu2);
  return forward_gaussian(y, dirs, mu2, [&](const Vector& ys, std::size_t i) {
    return problem.eval(x, ys, batch[i]);
  });
}

BlockEstimate gauss_grad_joint(const StochasticObjective& objective, const Vector& w,
                               const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                               double tau) {
  check_batch(batch.size(), dirs.size());
  check_radius(tau);
  return forward_gaussian(w, dirs, tau, [&](const Vector& ws, std::size_t i) {
    return objective.eval(ws, batch[i]);
  });
}

GradEstimate coord_grad(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                        const std::vector<Sample>& batch, double delta, Block block) {
  if (!(delta > 0.0)) throw InvalidArgument("coord_grad: delta must be > 0");
  if (batch.empty()) throw InvalidArgument("coord_grad: empty batch");
  const auto s = static_cast<std::int64_t>(batch.size());
  GradEstimate out;
  out.v = Vector::Zero(x.size());
  out.u = Vector::Zero(y.size());
  if (block != Block::Y) {
    out.v = central_differences(x, batch.size(), delta, [&](const Vector& xs, std::size_t i) {
      return problem.eval(xs, y, batch[i]);
    });
    out.queries += 2 * s * x.size();
  }
  if (block != Block::X) {
    out.u = central_differences(y, batch.size(), delta, [&](const Vector& ys, std::size_t i) {
      return problem.eval(x, ys, batch[i]);
    });
    out.queries += 2 * s * y.size();
  }
  return out;
}

BlockEstimate coord_grad(const StochasticObjective& objective, const Vector& w,
                         const std::vector<Sample>& batch, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("coord_grad: delta must be > 0");
  if (batch.empty()) throw InvalidArgument("coord_grad: empty batch");
  Vector g = central_differences(w, batch.size(), delta, [&](const Vector& ws, std::size_t i) {
    return objective.eval(ws, batch[i]);
  });
  return {std::move(g), static_cast<std::int64_t>(2 * batch.size()) * w.size()};
}

GradEstimate spider_update(const GradEstimate& prev, const Point& point_new,
                           const Point& point_old, const MinimaxProblem& problem,
                           const SpiderDraws& draws, const SmoothingConfig& cfg) {
  if (!prev.v.allFinite() || !prev.u.allFinite())
    throw InvalidArgument("spider_update: carried estimator is not finite");
  check_batch(draws.batch_x.size(), draws.dirs_x.size());
  check_batch(draws.batch_y.size(), draws.dirs_y.size());
  const BlockEstimate gx_new =
      gauss_grad_x(problem, point_new.x, point_new.y, draws.batch_x, draws.dirs_x, cfg.mu1);
  const BlockEstimate gx_old =
      gauss_grad_x(problem, point_old.x, point_old.y, draws.batch_x, draws.dirs_x, cfg.mu1);
  const BlockEstimate gy_new =
      gauss_grad_y(problem, point_new.x, point_new.y, draws.batch_y, draws.dirs_y, cfg.mu2);
  const BlockEstimate gy_old =
      gauss_grad_y(problem, point_old.x, point_old.y, draws.batch_y, draws.dirs_y, cfg.mu2);
  GradEstimate out;
  out.v = prev.v + gx_new.grad - gx_old.grad;
  out.u = prev.u + gy_new.grad - gy_old.grad;
  out.queries = gx_new.queries + gx_old.queries + gy_new.queries + gy_old.queries;
  return out;
}

std::vector<Vector> gaussian_directions(Index dim, std::size_t count, RandomStream& rng) {
  std::vector<Vector> dirs;
  dirs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) dirs.push_back(rng.normal_vector(dim));
  return dirs;
}

SpiderDraws draw_spider(const MinimaxProblem& problem, std::size_t batch_x, std::size_t batch_y,
                        RandomStream& rng) {
  SpiderDraws d;
  d.batch_x = sample_batch(problem, batch_x, rng);
  d.dirs_x = gaussian_directions(problem.dim_x(), batch_x, rng);
  d.batch_y = sample_batch(problem, batch_y, rng);
  d.dirs_y = gaussian_directions(problem.dim_y(), batch_y, rng);
  return d;
}

}  // namespace zovr
