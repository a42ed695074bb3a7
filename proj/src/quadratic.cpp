#include "zovr/quadratic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace zovr {
namespace {

Matrix random_orthogonal(Index d, RandomStream& rng) {
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, d);
}

Matrix gaussian_matrix(Index rows, Index cols, RandomStream& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

// Centered columns rescaled to mean squared norm sigma^2. A single component
// carries no noise: it must equal the mean.
Matrix finite_sum_perturbations(Index dim, const LinearNoise& noise) {
  const std::size_t n = finite_sum_size(noise.regime);
  Matrix m = Matrix::Zero(dim, static_cast<Index>(n));
  if (n < 2 || noise.sigma == 0.0) return m;
  RandomStream rng(noise.seed);
  m = gaussian_matrix(dim, static_cast<Index>(n), rng);
  const Vector mean = m.rowwise().mean();
  m.colwise() -= mean;
  const double ms = m.colwise().squaredNorm().mean();
  if (ms > 0.0) m *= noise.sigma / std::sqrt(ms);
  return m;
}

double spectral_norm(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

QuadraticSaddle::QuadraticSaddle(Matrix P, Matrix B, Matrix C, Vector a, Vector b,
                                 LinearNoise noise, std::optional<ProblemConstants> constants)
    : P_(std::move(P)),
      B_(std::move(B)),
      C_(std::move(C)),
      a_(std::move(a)),
      b_(std::move(b)),
      noise_(noise) {
  const Index d1 = P_.rows(), d2 = C_.rows();
  if (d1 < 1 || d2 < 1) throw InvalidArgument("QuadraticSaddle: empty dimension");
  if (P_.cols() != d1 || C_.cols() != d2 || B_.rows() != d1 || B_.cols() != d2 ||
      a_.size() != d1 || b_.size() != d2)
    throw InvalidArgument("QuadraticSaddle: inconsistent shapes");
  if (!(noise_.sigma >= 0.0)) throw InvalidArgument("QuadraticSaddle: sigma must be >= 0");
  if (is_finite_sum(noise_.regime)) {
    if (finite_sum_size(noise_.regime) < 1) throw InvalidArgument("finite sum needs n >= 1");
    perturbations_ = finite_sum_perturbations(d1 + d2, noise_);
  }

  c_llt_.compute(C_);
  c_positive_definite_ = c_llt_.info() == Eigen::Success && min_eigenvalue(C_) > 0.0;

  if (constants) {
    constants_ = *constants;
  } else {
    Matrix h(d1 + d2, d1 + d2);
    h << P_, B_, B_.transpose(), -C_;
    constants_.lipschitz = spectral_norm(h);
    constants_.strong_concavity = min_eigenvalue(C_);
    constants_.variance_sigma = noise_.sigma;
  }
}

QuadraticSaddle QuadraticSaddle::random(Index d1, Index d2, std::uint64_t seed,
                                        LinearNoise noise) {
  RandomStream rng(seed);
  const Matrix g = gaussian_matrix(d1, d1, rng);
  Matrix P = (g + g.transpose()) / (2.0 * std::sqrt(static_cast<double>(d1)));
  Matrix B = gaussian_matrix(d1, d2, rng) / std::sqrt(static_cast<double>(d1));
  const Matrix h = gaussian_matrix(d2, d2, rng);
  Matrix C = h * h.transpose() / static_cast<double>(d2) + 0.5 * Matrix::Identity(d2, d2);
  Vector a = rng.normal_vector(d1);
  Vector b = rng.normal_vector(d2);
  return QuadraticSaddle(std::move(P), std::move(B), std::move(C), std::move(a), std::move(b),
                         noise);
}

QuadraticSaddle QuadraticSaddle::conditioned(const ConditionedSpec& spec) {
  if (spec.d1 < 1 || spec.d2 < 1) throw InvalidArgument("conditioned: empty dimension");
  if (!(spec.kappa >= 1.0)) throw InvalidArgument("conditioned: kappa must be >= 1");
  RandomStream rng(spec.seed);
  const double mu = 1.0 / spec.kappa;
  const double c_max = std::max(mu, std::min(spec.c_spread * mu, 0.9));
  const Index pairs = std::min(spec.d1, spec.d2);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector c(spec.d2), p(spec.d1);
  Matrix D = Matrix::Zero(spec.d1, spec.d2);
  for (Index k = 0; k < spec.d2; ++k)
    c[k] = k == 0 ? mu : mu + (c_max - mu) * unit(rng.engine());
  for (Index k = 0; k < spec.d1; ++k) {
    if (k >= pairs) {
      p[k] = 0.5 + 0.4 * unit(rng.engine());
      continue;
    }
    // Coupling chosen so the 2x2 block [[p, b], [b, -c]] has spectral norm
    // at most 0.95 of the unit bound.
    p[k] = k % 2 == 0 ? -0.3 : 0.5;
    auto coupling = [&] {
      const double slack = 2.0 - std::abs(p[k] - c[k]);
      return 0.95 * 0.5 * std::sqrt(std::max(0.0, slack * slack - std::pow(p[k] + c[k], 2)));
    };
    double b = coupling();
    // Phi curvature along the pair is p + b^2/c; keep it >= b^2/(2c). The
    // coupling bound grows as p rises toward 0, so this settles quickly.
    for (int it = 0; it < 100 && p[k] < 0.0 && p[k] + b * b / c[k] < 0.5 * b * b / c[k]; ++it) {
      p[k] = -0.5 * b * b / c[k];
      b = coupling();
    }
    D(k, k) = b;
  }

  const Matrix U = random_orthogonal(spec.d1, rng);
  const Matrix V = random_orthogonal(spec.d2, rng);
  Matrix P = U * p.asDiagonal() * U.transpose();
  Matrix C = V * c.asDiagonal() * V.transpose();
  Matrix B = U * D * V.transpose();
  P = 0.5 * (P + P.transpose());
  C = 0.5 * (C + C.transpose());
  Vector a = rng.normal_vector(spec.d1) / std::sqrt(static_cast<double>(spec.d1));
  Vector bvec = (V * c.asDiagonal() * rng.normal_vector(spec.d2)) /
                std::sqrt(static_cast<double>(spec.d2));

  ProblemConstants k;
  k.lipschitz = 1.0;
  k.strong_concavity = mu;
  k.variance_sigma = spec.noise.sigma;
  return QuadraticSaddle(std::move(P), std::move(B), std::move(C), std::move(a), std::move(bvec),
                         spec.noise, k);
}

Eigen::Ref<const Vector> QuadraticSaddle::perturbation(const Sample& s) const {
  if (is_finite_sum(noise_.regime)) {
    if (s.index >= finite_sum_size(noise_.regime))
      throw InvalidArgument("sample index out of range");
    return perturbations_.col(static_cast<Index>(s.index));
  }
  return s.noise;
}

double QuadraticSaddle::value(const Vector& x, const Vector& y) const {
  double f = 0.0;
  for (Index i = 0; i < P_.rows(); ++i) f += x[i] * (0.5 * P_.col(i).dot(x) + a_[i]);
  for (Index k = 0; k < C_.rows(); ++k)
    f += y[k] * (B_.col(k).dot(x) - 0.5 * C_.col(k).dot(y) + b_[k]);
  return f;
}

double QuadraticSaddle::eval(const Vector& x, const Vector& y, const Sample& s) const {
  double f = value(x, y);
  const auto noise = perturbation(s);
  if (noise.size() != 0) {
    const Index d1 = P_.rows();
    f += noise.head(d1).dot(x) + noise.tail(C_.rows()).dot(y);
  }
  return f;
}

Sample QuadraticSaddle::draw_online(RandomStream& rng) const {
  if (is_finite_sum(noise_.regime)) throw PreconditionViolation("finite-sum problem");
  const Index dim = P_.rows() + C_.rows();
  Sample s;
  if (noise_.sigma > 0.0)
    s.noise = rng.normal_vector(dim) * (noise_.sigma / std::sqrt(static_cast<double>(dim)));
  return s;
}

std::optional<GradientPair> QuadraticSaddle::true_gradient(const Vector& x,
                                                           const Vector& y) const {
  GradientPair g;
  g.x = P_ * x + a_ + B_ * y;
  g.y = B_.transpose() * x - C_ * y + b_;
  return g;
}

std::optional<GradientPair> QuadraticSaddle::component_gradient(const Vector& x, const Vector& y,
                                                                const Sample& s) const {
  GradientPair g = *true_gradient(x, y);
  const auto noise = perturbation(s);
  if (noise.size() != 0) {
    g.x += noise.head(P_.rows());
    g.y += noise.tail(C_.rows());
  }
  return g;
}

void QuadraticSaddle::require_positive_definite() const {
  if (!c_positive_definite_)
    throw PreconditionViolation("QuadraticSaddle: C is not positive definite");
}

Vector QuadraticSaddle::inner_argmax(const Vector& x) const {
  require_positive_definite();
  return c_llt_.solve(B_.transpose() * x + b_);
}

PhiValue QuadraticSaddle::phi_and_grad(const Vector& x) const {
  const Vector y = inner_argmax(x);
  PhiValue out;
  out.phi = value(x, y);
  out.grad = P_ * x + a_ + B_ * y;
  return out;
}

QuadraticObjective::QuadraticObjective(Index d, double lipschitz, double mu, std::uint64_t seed,
                                       LinearNoise noise)
    : lipschitz_(lipschitz), mu_(mu), noise_(noise) {
  if (d < 1) throw InvalidArgument("QuadraticObjective: d must be >= 1");
  if (!(mu > 0.0) || lipschitz < mu) throw InvalidArgument("QuadraticObjective: need 0 < mu <= l");
  RandomStream rng(seed);
  Vector eig(d);
  for (Index i = 0; i < d; ++i)
    eig[i] = d == 1 ? mu : mu * std::pow(lipschitz / mu, static_cast<double>(i) / (d - 1));
  const Matrix U = random_orthogonal(d, rng);
  A_ = U * eig.asDiagonal() * U.transpose();
  A_ = 0.5 * (A_ + A_.transpose());
  c_ = rng.normal_vector(d);
  if (is_finite_sum(noise_.regime)) perturbations_ = finite_sum_perturbations(d, noise_);
}

double QuadraticObjective::eval(const Vector& w, const Sample& s) const {
  double p = 0.0;
  for (Index i = 0; i < A_.rows(); ++i) p += w[i] * (0.5 * A_.col(i).dot(w) - c_[i]);
  if (is_finite_sum(noise_.regime)) {
    if (s.index >= finite_sum_size(noise_.regime))
      throw InvalidArgument("sample index out of range");
    p -= perturbations_.col(static_cast<Index>(s.index)).dot(w);
  } else if (s.noise.size() != 0) {
    p -= s.noise.dot(w);
  }
  return p;
}

Sample QuadraticObjective::draw_online(RandomStream& rng) const {
  if (is_finite_sum(noise_.regime)) throw PreconditionViolation("finite-sum objective");
  Sample s;
  if (noise_.sigma > 0.0)
    s.noise = rng.normal_vector(A_.rows()) *
              (noise_.sigma / std::sqrt(static_cast<double>(A_.rows())));
  return s;
}

std::optional<double> QuadraticObjective::true_value(const Vector& w) const {
  return 0.5 * w.dot(A_ * w) - c_.dot(w);
}

std::optional<Vector> QuadraticObjective::true_gradient(const Vector& w) const {
  return Vector(A_ * w - c_);
}

Vector QuadraticObjective::minimizer() const { return A_.llt().solve(c_); }

}  // namespace zovr
