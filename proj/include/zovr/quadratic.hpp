#ifndef ZOVR_QUADRATIC_HPP
#define ZOVR_QUADRATIC_HPP

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>

#include "zovr/problem.hpp"

namespace zovr {

/// Additive linear noise attached to a quadratic test problem. Component xi
/// perturbs the linear coefficients by a zero-mean Gaussian vector whose
/// expected squared norm is sigma^2, so the component gradients share one
/// Lipschitz constant and their variance is exactly sigma^2 (online) or the
/// empirical value sigma^2 (finite sum, after centering).
struct LinearNoise {
  double sigma = 0.0;
  Regime regime = Online{};
  std::uint64_t seed = 0;
};

struct PhiValue {
  double phi = 0.0;
  Vector grad;
};

/// f(x, y) = 1/2 x'Px + a'x + x'By - 1/2 y'Cy + b'y with closed-form
/// y*(x) = C^{-1}(B'x + b) and Phi(x) = f(x, y*(x)).
class QuadraticSaddle final : public MinimaxProblem {
 public:
  /// Constants default to l = ||Hessian||_2, mu = lambda_min(C) and the
  /// noise sigma.
  QuadraticSaddle(Matrix P, Matrix B, Matrix C, Vector a, Vector b, LinearNoise noise = {},
                  std::optional<ProblemConstants> constants = std::nullopt);

  /// Dense random instance (P symmetric indefinite, C positive definite).
  static QuadraticSaddle random(Index d1, Index d2, std::uint64_t seed, LinearNoise noise = {});

  struct ConditionedSpec {
    Index d1 = 2;
    Index d2 = 2;
    double kappa = 5.0;
    /// Eigenvalues of C lie in [1/kappa, min(spread/kappa, 0.9)].
    double c_spread = 1.5;
    LinearNoise noise;
    std::uint64_t seed = 0;
  };
  /// Instance with declared l = 1 and mu = 1/kappa. Half of the x-y pairs
  /// have negative curvature in x (nonconvex in x) while Phi stays strongly
  /// convex, so Phi is bounded below.
  static QuadraticSaddle conditioned(const ConditionedSpec& spec);

  Index dim_x() const override { return P_.rows(); }
  Index dim_y() const override { return C_.rows(); }
  Regime regime() const override { return noise_.regime; }
  ProblemConstants constants() const override { return constants_; }

  double eval(const Vector& x, const Vector& y, const Sample& s) const override;
  Sample draw_online(RandomStream& rng) const override;
  std::optional<double> true_value(const Vector& x, const Vector& y) const override {
    return value(x, y);
  }
  std::optional<GradientPair> true_gradient(const Vector& x, const Vector& y) const override;
  std::optional<GradientPair> component_gradient(const Vector& x, const Vector& y,
                                                 const Sample& s) const override;

  /// Noiseless f(x, y).
  double value(const Vector& x, const Vector& y) const;
  Vector inner_argmax(const Vector& x) const;
  PhiValue phi_and_grad(const Vector& x) const;

  const Matrix& P() const { return P_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Vector& a() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  void require_positive_definite() const;
  Eigen::Ref<const Vector> perturbation(const Sample& s) const;

  Matrix P_, B_, C_;
  Vector a_, b_;
  LinearNoise noise_;
  ProblemConstants constants_;
  Eigen::LLT<Matrix> c_llt_;
  bool c_positive_definite_ = false;
  // (d1 + d2) x n, columns centered; only populated for finite sums.
  Matrix perturbations_;
};

/// Strongly convex quadratic p(w) = 1/2 w'Aw - c'w with linear noise;
/// eigenvalues of A are log-spaced on [mu, l].
class QuadraticObjective final : public StochasticObjective {
 public:
  QuadraticObjective(Index d, double lipschitz, double mu, std::uint64_t seed,
                     LinearNoise noise = {});

  Index dim() const override { return A_.rows(); }
  Regime regime() const override { return noise_.regime; }
  double eval(const Vector& w, const Sample& s) const override;
  Sample draw_online(RandomStream& rng) const override;
  std::optional<double> true_value(const Vector& w) const override;
  std::optional<Vector> true_gradient(const Vector& w) const override;

  Vector minimizer() const;
  double lipschitz() const { return lipschitz_; }
  double mu() const { return mu_; }
  const Matrix& A() const { return A_; }

 private:
  Matrix A_;
  Vector c_;
  double lipschitz_, mu_;
  LinearNoise noise_;
  Matrix perturbations_;
};

}  // namespace zovr

#endif  // ZOVR_QUADRATIC_HPP
