// Independent oracles and small problem builders shared by the unit tests.
#ifndef ZOVR_TESTS_SUPPORT_HPP
#define ZOVR_TESTS_SUPPORT_HPP

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "zovr/problem.hpp"
#include "zovr/simplex.hpp"

namespace zovr::testing {

/// Wraps a problem and counts every call to eval.
class CountingProblem final : public MinimaxProblem {
 public:
  explicit CountingProblem(const MinimaxProblem& inner) : inner_(inner) {}

  Index dim_x() const override { return inner_.dim_x(); }
  Index dim_y() const override { return inner_.dim_y(); }
  Regime regime() const override { return inner_.regime(); }
  ProblemConstants constants() const override { return inner_.constants(); }
  YConstraint y_constraint() const override { return inner_.y_constraint(); }
  double eval(const Vector& x, const Vector& y, const Sample& s) const override {
    ++calls_;
    return inner_.eval(x, y, s);
  }
  Sample draw_online(RandomStream& rng) const override { return inner_.draw_online(rng); }
  std::optional<double> true_value(const Vector& x, const Vector& y) const override {
    return inner_.true_value(x, y);
  }
  std::optional<GradientPair> true_gradient(const Vector& x, const Vector& y) const override {
    return inner_.true_gradient(x, y);
  }
  std::optional<GradientPair> component_gradient(const Vector& x, const Vector& y,
                                                 const Sample& s) const override {
    return inner_.component_gradient(x, y, s);
  }

  std::int64_t calls() const { return calls_; }

 private:
  const MinimaxProblem& inner_;
  mutable std::atomic<std::int64_t> calls_{0};
};

class CountingObjective final : public StochasticObjective {
 public:
  explicit CountingObjective(const StochasticObjective& inner) : inner_(inner) {}
  Index dim() const override { return inner_.dim(); }
  Regime regime() const override { return inner_.regime(); }
  double eval(const Vector& w, const Sample& s) const override {
    ++calls_;
    return inner_.eval(w, s);
  }
  Sample draw_online(RandomStream& rng) const override { return inner_.draw_online(rng); }
  std::optional<double> true_value(const Vector& w) const override { return inner_.true_value(w); }
  std::optional<Vector> true_gradient(const Vector& w) const override {
    return inner_.true_gradient(w);
  }
  std::int64_t calls() const { return calls_; }

 private:
  const StochasticObjective& inner_;
  mutable std::atomic<std::int64_t> calls_{0};
};

/// Deterministic problem from a lambda F(x, y); finite sum with n = 1.
class LambdaProblem final : public MinimaxProblem {
 public:
  using Fn = std::function<double(const Vector&, const Vector&)>;
  LambdaProblem(Index d1, Index d2, Fn f, ProblemConstants c = {})
      : d1_(d1), d2_(d2), f_(std::move(f)), c_(c) {}
  Index dim_x() const override { return d1_; }
  Index dim_y() const override { return d2_; }
  Regime regime() const override { return FiniteSum{1}; }
  ProblemConstants constants() const override { return c_; }
  double eval(const Vector& x, const Vector& y, const Sample&) const override { return f_(x, y); }

 private:
  Index d1_, d2_;
  Fn f_;
  ProblemConstants c_;
};

class LambdaObjective final : public StochasticObjective {
 public:
  using Fn = std::function<double(const Vector&)>;
  LambdaObjective(Index d, Fn f) : d_(d), f_(std::move(f)) {}
  Index dim() const override { return d_; }
  Regime regime() const override { return FiniteSum{1}; }
  double eval(const Vector& w, const Sample&) const override { return f_(w); }

 private:
  Index d_;
  Fn f_;
};

/// Five-point central difference of a scalar function, O(h^4) accurate.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& at,
                          double h = 1e-3) {
  Vector g(at.size());
  Vector p = at;
  for (Index j = 0; j < at.size(); ++j) {
    auto shifted = [&](double t) {
      p[j] = at[j] + t;
      const double v = f(p);
      p[j] = at[j];
      return v;
    };
    g[j] = (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h);
  }
  return g;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

/// Exact projection by enumerating supports: on a support S the minimizer is
/// v_S shifted by a constant, and it must stay nonnegative.
inline Vector project_by_enumeration(const Vector& v) {
  const auto n = static_cast<int>(v.size());
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        sum += v[i];
        ++k;
      }
    const double shift = (sum - 1.0) / k;
    Vector y = Vector::Zero(n);
    bool feasible = true;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        y[i] = v[i] - shift;
        if (y[i] < 0.0) feasible = false;
      }
    if (!feasible) continue;
    const double dist = (y - v).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

/// Projected gradient ascent on <y, f> - reg ||y - 1/n||^2.
inline Vector ascend_inner(const Vector& f, double reg, int iters = 400) {
  const auto n = static_cast<double>(f.size());
  Vector y = Vector::Constant(f.size(), 1.0 / n);
  const double step = 0.25 / reg;
  for (int it = 0; it < iters; ++it) {
    const Vector grad = f - 2.0 * reg * (y.array() - 1.0 / n).matrix();
    y = project_simplex(y + step * grad);
  }
  return y;
}

inline double inner_value(const Vector& f, double reg, const Vector& y) {
  const double n = static_cast<double>(f.size());
  return y.dot(f) - reg * (y.array() - 1.0 / n).square().sum();
}

}  // namespace zovr::testing

#endif  // ZOVR_TESTS_SUPPORT_HPP
