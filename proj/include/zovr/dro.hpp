#ifndef ZOVR_DRO_HPP
#define ZOVR_DRO_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "zovr/problem.hpp"
#include "zovr/quadratic.hpp"

namespace zovr {

struct SparseRow {
  int label = 1;  // -1 or +1
  /// (1-based feature index, value), strictly increasing in index.
  std::vector<std::pair<Index, double>> features;

  bool operator==(const SparseRow&) const = default;
};

struct SparseDataset {
  std::vector<SparseRow> rows;
  Index num_features = 0;

  std::size_t size() const { return rows.size(); }
  std::size_t count_label(int label) const;
  /// Row-major dense copy, n x num_features.
  Matrix dense() const;

  bool operator==(const SparseDataset&) const = default;
};

/// Reads LIBSVM text. Labels +1/-1/1/0 are accepted, 0 maps to -1. Blank
/// lines are skipped. `num_features` overrides the max index seen, and must
/// not be smaller than it.
SparseDataset parse_libsvm(std::istream& in, std::optional<Index> num_features = std::nullopt);

/// Shortest round-trip text for every value.
void write_libsvm(std::ostream& out, const SparseDataset& ds);

enum class MinorityClass { Positive, Negative };

/// minority_count rows of the minority class plus ratio * minority_count of
/// the other, drawn without replacement and shuffled.
SparseDataset subsample_unbalanced(const SparseDataset& ds, std::size_t minority_count,
                                   std::size_t ratio, RandomStream& rng,
                                   MinorityClass minority = MinorityClass::Positive);

struct InnerMax {
  Vector y;
  double phi = 0.0;
  double kkt_residual = 0.0;
};

/// max over the simplex of <y, f> - reg * sum (y_i - 1/n)^2.
InnerMax maximize_regularized_simplex(const Vector& f, double reg_weight);

/// F(x, y; i) = n y_i f_i(x) - r(y), f_i = phi(log(1 + exp(-z_i x's_i))),
/// phi(t) = 2 log(1 + t/2), r(y) = reg * sum (y_i - 1/n)^2.
class DroInstance final : public MinimaxProblem {
 public:
  explicit DroInstance(const SparseDataset& ds, double reg_weight = 10.0,
                       std::optional<ProblemConstants> constants = std::nullopt);

  Index dim_x() const override { return features_.cols(); }
  Index dim_y() const override { return features_.rows(); }
  Regime regime() const override { return FiniteSum{static_cast<std::size_t>(features_.rows())}; }
  ProblemConstants constants() const override { return constants_; }
  YConstraint y_constraint() const override { return YConstraint::Simplex; }

  double eval(const Vector& x, const Vector& y, const Sample& s) const override;
  std::optional<double> true_value(const Vector& x, const Vector& y) const override {
    return objective(x, y);
  }
  std::optional<GradientPair> true_gradient(const Vector& x, const Vector& y) const override;
  std::optional<GradientPair> component_gradient(const Vector& x, const Vector& y,
                                                 const Sample& s) const override;

  std::size_t n() const { return static_cast<std::size_t>(features_.rows()); }
  double reg_weight() const { return reg_weight_; }
  double loss(const Vector& x, std::size_t i) const;
  Vector losses(const Vector& x) const;
  /// Row i holds grad f_i(x).
  Matrix loss_gradients(const Vector& x) const;
  double regularizer(const Vector& y) const;
  /// sum y_i f_i(x) - r(y).
  double objective(const Vector& x, const Vector& y) const;
  /// Phi(x) and grad Phi(x) = sum y*_i grad f_i(x).
  PhiValue phi_and_grad(const Vector& x) const;

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

 private:
  double margin(const Vector& x, std::size_t i) const;
  void check_y(const Vector& y) const;

  Matrix features_;
  Vector labels_;
  double reg_weight_;
  ProblemConstants constants_;
};

double dro_component(const DroInstance& inst, const Vector& x, const Vector& y, std::size_t i);

/// Exact inner maximizer of the DRO objective at x.
InnerMax solve_inner_max(const DroInstance& inst, const Vector& x);

}  // namespace zovr

#endif  // ZOVR_DRO_HPP
