#ifndef ZOVR_PROBLEM_HPP
#define ZOVR_PROBLEM_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "zovr/core.hpp"

namespace zovr {

/// One draw of the randomness xi. In the finite-sum regime only `index` is
/// meaningful; online problems carry their draw in `noise`.
struct Sample {
  std::size_t index = 0;
  Vector noise;
};

struct Online {};
struct FiniteSum {
  std::size_t n = 1;
};
using Regime = std::variant<Online, FiniteSum>;

inline bool is_finite_sum(const Regime& r) { return std::holds_alternative<FiniteSum>(r); }
inline std::size_t finite_sum_size(const Regime& r) { return std::get<FiniteSum>(r).n; }

/// Declared problem constants: gradient Lipschitz constant l, strong
/// concavity mu in y and gradient variance bound sigma.
struct ProblemConstants {
  double lipschitz = 1.0;
  double strong_concavity = 1.0;
  double variance_sigma = 0.0;

  double kappa() const { return lipschitz / strong_concavity; }
  /// Lipschitz constant of grad Phi, (1 + kappa) * l.
  double phi_smoothness() const { return (1.0 + kappa()) * lipschitz; }
};

enum class YConstraint { None, Simplex };

struct GradientPair {
  Vector x;
  Vector y;
};

/// Black-box component oracle F(x, y; xi) for min_x max_y E[F].
/// Implementations must be pure given (x, y, sample).
class MinimaxProblem {
 public:
  virtual ~MinimaxProblem() = default;

  virtual Index dim_x() const = 0;
  virtual Index dim_y() const = 0;
  virtual Regime regime() const = 0;
  virtual ProblemConstants constants() const = 0;
  virtual YConstraint y_constraint() const { return YConstraint::None; }

  virtual double eval(const Vector& x, const Vector& y, const Sample& s) const = 0;

  /// Fresh online draw. Finite-sum problems never need this.
  virtual Sample draw_online(RandomStream& rng) const;

  /// Exact f(x, y) when known.
  virtual std::optional<double> true_value(const Vector& x, const Vector& y) const;
  /// Exact (grad_x f, grad_y f); only test problems provide it.
  virtual std::optional<GradientPair> true_gradient(const Vector& x, const Vector& y) const;
  virtual std::optional<GradientPair> component_gradient(const Vector& x, const Vector& y,
                                                         const Sample& s) const;
};

/// Stochastic minimization oracle P(w; xi), the input of ZO-iSARAH.
class StochasticObjective {
 public:
  virtual ~StochasticObjective() = default;
  virtual Index dim() const = 0;
  virtual Regime regime() const = 0;
  virtual double eval(const Vector& w, const Sample& s) const = 0;
  virtual Sample draw_online(RandomStream& rng) const;
  virtual std::optional<double> true_value(const Vector& w) const;
  virtual std::optional<Vector> true_gradient(const Vector& w) const;
};

/// p(w) = -f(x0, w): the initialization subproblem as a minimization.
class NegatedInnerObjective final : public StochasticObjective {
 public:
  NegatedInnerObjective(const MinimaxProblem& problem, Vector x0);

  Index dim() const override { return problem_.dim_y(); }
  Regime regime() const override { return problem_.regime(); }
  double eval(const Vector& w, const Sample& s) const override;
  Sample draw_online(RandomStream& rng) const override;
  std::optional<double> true_value(const Vector& w) const override;
  std::optional<Vector> true_gradient(const Vector& w) const override;

 private:
  const MinimaxProblem& problem_;
  Vector x0_;
};

/// Checks the structural invariants of a problem (dimensions, n, kappa >= 1).
void validate(const MinimaxProblem& problem);

/// Draws `size` samples with replacement: i.i.d. online draws, or uniform
/// indices in [0, n) for finite sums.
std::vector<Sample> sample_batch(const MinimaxProblem& problem, std::size_t size,
                                 RandomStream& rng);
std::vector<Sample> sample_batch(const StochasticObjective& objective, std::size_t size,
                                 RandomStream& rng);

/// All n components, in index order.
std::vector<Sample> full_batch(const Regime& regime);

/// ||grad_y f(x, y)||^2.
double tracking_error(const MinimaxProblem& problem, const Vector& x, const Vector& y);

/// ||v - grad_x f||^2 + ||u - grad_y f||^2.
double estimation_error(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                        const Vector& v, const Vector& u);

}  // namespace zovr

#endif  // ZOVR_PROBLEM_HPP
