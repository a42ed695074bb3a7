#include "zovr/problem.hpp"

#include <string>

namespace zovr {

Sample MinimaxProblem::draw_online(RandomStream&) const {
  throw PreconditionViolation("draw_online called on a problem without an online regime");
}

std::optional<double> MinimaxProblem::true_value(const Vector&, const Vector&) const {
  return std::nullopt;
}

std::optional<GradientPair> MinimaxProblem::true_gradient(const Vector&, const Vector&) const {
  return std::nullopt;
}

std::optional<GradientPair> MinimaxProblem::component_gradient(const Vector&, const Vector&,
                                                               const Sample&) const {
  return std::nullopt;
}

Sample StochasticObjective::draw_online(RandomStream&) const {
  throw PreconditionViolation("draw_online called on an objective without an online regime");
}

std::optional<double> StochasticObjective::true_value(const Vector&) const {
  return std::nullopt;
}

std::optional<Vector> StochasticObjective::true_gradient(const Vector&) const {
  return std::nullopt;
}

NegatedInnerObjective::NegatedInnerObjective(const MinimaxProblem& problem, Vector x0)
    : problem_(problem), x0_(std::move(x0)) {
  if (x0_.size() != problem_.dim_x()) throw InvalidArgument("x0 dimension mismatch");
}

double NegatedInnerObjective::eval(const Vector& w, const Sample& s) const {
  return -problem_.eval(x0_, w, s);
}

Sample NegatedInnerObjective::draw_online(RandomStream& rng) const {
  return problem_.draw_online(rng);
}

std::optional<double> NegatedInnerObjective::true_value(const Vector& w) const {
  auto v = problem_.true_value(x0_, w);
  if (!v) return std::nullopt;
  return -*v;
}

std::optional<Vector> NegatedInnerObjective::true_gradient(const Vector& w) const {
  auto g = problem_.true_gradient(x0_, w);
  if (!g) return std::nullopt;
  return Vector(-g->y);
}

void validate(const MinimaxProblem& problem) {
  if (problem.dim_x() < 1 || problem.dim_y() < 1)
    throw InvalidArgument("problem dimensions must be >= 1");
  const Regime r = problem.regime();
  if (is_finite_sum(r) && finite_sum_size(r) < 1)
    throw InvalidArgument("finite-sum problems need n >= 1");
  const ProblemConstants c = problem.constants();
  if (!(c.strong_concavity > 0.0)) throw InvalidArgument("strong concavity must be > 0");
  if (!(c.lipschitz >= 0.0) || !(c.variance_sigma >= 0.0))
    throw InvalidArgument("lipschitz and sigma must be >= 0");
  if (c.kappa() < 1.0) throw InvalidArgument("condition number l/mu must be >= 1");
}

namespace {

template <typename Oracle>
std::vector<Sample> draw_batch(const Oracle& oracle, std::size_t size, RandomStream& rng) {
  if (size == 0) throw InvalidArgument("sample_batch: size must be >= 1");
  std::vector<Sample> out;
  out.reserve(size);
  const Regime r = oracle.regime();
  if (is_finite_sum(r)) {
    const std::size_t n = finite_sum_size(r);
    for (std::size_t i = 0; i < size; ++i) out.push_back(Sample{rng.uniform_index(n), {}});
  } else {
    for (std::size_t i = 0; i < size; ++i) out.push_back(oracle.draw_online(rng));
  }
  return out;
}

}  // namespace

std::vector<Sample> sample_batch(const MinimaxProblem& problem, std::size_t size,
                                 RandomStream& rng) {
  return draw_batch(problem, size, rng);
}

std::vector<Sample> sample_batch(const StochasticObjective& objective, std::size_t size,
                                 RandomStream& rng) {
  return draw_batch(objective, size, rng);
}

std::vector<Sample> full_batch(const Regime& regime) {
  if (!is_finite_sum(regime)) throw PreconditionViolation("full_batch requires a finite sum");
  const std::size_t n = finite_sum_size(regime);
  std::vector<Sample> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].index = i;
  return out;
}

namespace {

GradientPair require_gradient(const MinimaxProblem& problem, const Vector& x, const Vector& y) {
  auto g = problem.true_gradient(x, y);
  if (!g) throw UnsupportedDiagnostic("problem exposes no true gradient");
  return std::move(*g);
}

}  // namespace

double tracking_error(const MinimaxProblem& problem, const Vector& x, const Vector& y) {
  return require_gradient(problem, x, y).y.squaredNorm();
}

double estimation_error(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                        const Vector& v, const Vector& u) {
  const GradientPair g = require_gradient(problem, x, y);
  return (v - g.x).squaredNorm() + (u - g.y).squaredNorm();
}

}  // namespace zovr
