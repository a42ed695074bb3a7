#include "zovr/dro.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "zovr/simplex.hpp"

namespace zovr {

std::size_t SparseDataset::count_label(int label) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const SparseRow& r) { return r.label == label; }));
}

Matrix SparseDataset::dense() const {
  Matrix m = Matrix::Zero(static_cast<Index>(rows.size()), num_features);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, v] : rows[i].features) m(static_cast<Index>(i), j - 1) = v;
  return m;
}

namespace {

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

int parse_label(std::string_view tok, std::size_t line) {
  const double v = parse_double(tok, line, "label");
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;
  throw ParseError(line, "label must be +1, -1, 1 or 0, got '" + std::string(tok) + "'");
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, std::optional<Index> num_features) {
  SparseDataset ds;
  Index max_index = 0;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    std::istringstream tokens(text);
    std::string tok;
    if (!(tokens >> tok)) continue;
    SparseRow row;
    row.label = parse_label(tok, line_no);
    Index last = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "expected idx:val, got '" + tok + "'");
      const std::string_view sv(tok);
      long long idx = 0;
      const auto idx_part = sv.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_part.data(), idx_part.data() + idx_part.size(), idx);
      if (ec != std::errc() || ptr != idx_part.data() + idx_part.size())
        throw ParseError(line_no, "bad feature index '" + std::string(idx_part) + "'");
      if (idx < 1) throw ParseError(line_no, "feature indices are 1-based");
      if (idx <= last) throw ParseError(line_no, "feature indices must be strictly increasing");
      last = static_cast<Index>(idx);
      row.features.emplace_back(last, parse_double(sv.substr(colon + 1), line_no, "value"));
    }
    max_index = std::max(max_index, last);
    ds.rows.push_back(std::move(row));
  }
  if (in.bad()) throw ParseError(line_no, "read error");
  if (num_features) {
    if (*num_features < max_index)
      throw InvalidArgument("parse_libsvm: num_features smaller than the largest index");
    ds.num_features = *num_features;
  } else {
    ds.num_features = max_index;
  }
  return ds;
}

void write_libsvm(std::ostream& out, const SparseDataset& ds) {
  for (const auto& row : ds.rows) {
    out << (row.label > 0 ? "+1" : "-1");
    for (const auto& [j, v] : row.features) out << ' ' << j << ':' << shortest(v);
    out << '\n';
  }
}

SparseDataset subsample_unbalanced(const SparseDataset& ds, std::size_t minority_count,
                                   std::size_t ratio, RandomStream& rng,
                                   MinorityClass minority) {
  if (minority_count < 1 || ratio < 1)
    throw InvalidArgument("subsample_unbalanced: counts must be >= 1");
  const int minority_label = minority == MinorityClass::Positive ? 1 : -1;
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    (ds.rows[i].label == minority_label ? small : large).push_back(i);
  const std::size_t majority_count = ratio * minority_count;
  if (small.size() < minority_count || large.size() < majority_count)
    throw InvalidArgument("subsample_unbalanced: not enough rows of one class");

  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  auto pick = [&rng](std::vector<std::size_t>& pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
    pool.resize(k);
  };
  pick(small, minority_count);
  pick(large, majority_count);
  std::vector<std::size_t> chosen(small);
  chosen.insert(chosen.end(), large.begin(), large.end());
  for (std::size_t i = chosen.size(); i > 1; --i) std::swap(chosen[i - 1], chosen[rng.uniform_index(i)]);

  SparseDataset out;
  out.num_features = ds.num_features;
  out.rows.reserve(chosen.size());
  for (std::size_t i : chosen) out.rows.push_back(ds.rows[i]);
  return out;
}

InnerMax maximize_regularized_simplex(const Vector& f, double reg_weight) {
  const Index n = f.size();
  if (n == 0) throw InvalidArgument("maximize_regularized_simplex: empty loss vector");
  if (!(reg_weight > 0.0)) throw InvalidArgument("maximize_regularized_simplex: reg must be > 0");
  if (!f.allFinite()) throw OracleFailure("maximize_regularized_simplex: non-finite losses");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double two_reg = 2.0 * reg_weight;
  // Stationarity: y_i = max(0, 1/n + (f_i - nu) / (2 reg)) with sum y = 1.
  auto y_of = [&](double nu) {
    return ((inv_n + (f.array() - nu) / two_reg).max(0.0)).matrix().eval();
  };
  double lo = f.minCoeff(), hi = f.maxCoeff();
  if (y_of(lo).sum() < 1.0 - 1e-12 || y_of(hi).sum() > 1.0 + 1e-12)
    throw std::logic_error("maximize_regularized_simplex: multiplier not bracketed");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (y_of(mid).sum() > 1.0 ? lo : hi) = mid;
  }
  double nu = 0.5 * (lo + hi);
  // Exact multiplier on the active support.
  for (int pass = 0; pass < 3; ++pass) {
    const Vector y = y_of(nu);
    double support = 0.0, acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (y(i) > 0.0) {
        support += 1.0;
        acc += inv_n + f(i) / two_reg;
      }
    }
    if (support == 0.0) break;
    nu = (acc - 1.0) * two_reg / support;
  }

  InnerMax out;
  out.y = y_of(nu);
  out.y /= out.y.sum();
  out.phi = out.y.dot(f) - reg_weight * (out.y.array() - inv_n).square().sum();
  double residual = std::abs(out.y.sum() - 1.0);
  for (Index i = 0; i < n; ++i) {
    const double g = f(i) - two_reg * (out.y(i) - inv_n) - nu;
    residual = std::max(residual, out.y(i) > 0.0 ? std::abs(g) : std::max(0.0, g));
  }
  out.kkt_residual = residual;
  return out;
}

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}
double robust_phi(double t) { return 2.0 * std::log1p(0.5 * t); }

// d f_i / d margin.
double loss_slope(double m) {
  const double l = softplus(-m);
  return -(1.0 / (1.0 + 0.5 * l)) * sigmoid(-m);
}

}  // namespace

DroInstance::DroInstance(const SparseDataset& ds, double reg_weight,
                         std::optional<ProblemConstants> constants)
    : features_(ds.dense()), labels_(static_cast<Index>(ds.size())), reg_weight_(reg_weight) {
  if (ds.size() == 0) throw InvalidArgument("DroInstance: empty dataset");
  if (ds.num_features < 1) throw InvalidArgument("DroInstance: dataset has no features");
  if (!(reg_weight > 0.0)) throw InvalidArgument("DroInstance: reg weight must be > 0");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int z = ds.rows[i].label;
    if (z != 1 && z != -1) throw InvalidArgument("DroInstance: labels must be +-1");
    labels_(static_cast<Index>(i)) = z;
  }
  if (constants) {
    constants_ = *constants;
    return;
  }
  const double n = static_cast<double>(ds.size());
  double l = 0.0;
  for (Index i = 0; i < features_.rows(); ++i) {
    const double s = features_.row(i).norm();
    l = std::max(l, n * (0.75 * s * s + s));
  }
  constants_.lipschitz = l + 2.0 * reg_weight;
  constants_.strong_concavity = 2.0 * reg_weight;
  // Gradient spread of the components at (0, centroid).
  const Vector x0 = Vector::Zero(dim_x());
  const Vector y0 = Vector::Constant(dim_y(), 1.0 / n);
  const GradientPair mean = *true_gradient(x0, y0);
  double var = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const GradientPair g = *component_gradient(x0, y0, Sample{i, {}});
    var += (g.x - mean.x).squaredNorm() + (g.y - mean.y).squaredNorm();
  }
  constants_.variance_sigma = std::sqrt(var / n);
}

double DroInstance::margin(const Vector& x, std::size_t i) const {
  const auto r = static_cast<Index>(i);
  return labels_(r) * features_.row(r).dot(x);
}

void DroInstance::check_y(const Vector& y) const {
  if (y.size() != dim_y()) throw InvalidArgument("DroInstance: y dimension mismatch");
}

double DroInstance::loss(const Vector& x, std::size_t i) const {
  if (x.size() != dim_x()) throw InvalidArgument("DroInstance: x dimension mismatch");
  if (i >= n()) throw PreconditionViolation("DroInstance: component index out of range");
  return robust_phi(softplus(-margin(x, i)));
}

Vector DroInstance::losses(const Vector& x) const {
  if (x.size() != dim_x()) throw InvalidArgument("DroInstance: x dimension mismatch");
  const Vector m = labels_.cwiseProduct(features_ * x);
  Vector f(m.size());
  for (Index i = 0; i < m.size(); ++i) f(i) = robust_phi(softplus(-m(i)));
  return f;
}

Matrix DroInstance::loss_gradients(const Vector& x) const {
  if (x.size() != dim_x()) throw InvalidArgument("DroInstance: x dimension mismatch");
  const Vector m = labels_.cwiseProduct(features_ * x);
  Matrix g(features_.rows(), features_.cols());
  for (Index i = 0; i < m.size(); ++i) g.row(i) = loss_slope(m(i)) * labels_(i) * features_.row(i);
  return g;
}

double DroInstance::regularizer(const Vector& y) const {
  check_y(y);
  return reg_weight_ * (y.array() - 1.0 / static_cast<double>(n())).square().sum();
}

double DroInstance::objective(const Vector& x, const Vector& y) const {
  check_y(y);
  return y.dot(losses(x)) - regularizer(y);
}

double DroInstance::eval(const Vector& x, const Vector& y, const Sample& s) const {
  check_y(y);
  return static_cast<double>(n()) * y(static_cast<Index>(s.index)) * loss(x, s.index) -
         regularizer(y);
}

std::optional<GradientPair> DroInstance::true_gradient(const Vector& x, const Vector& y) const {
  check_y(y);
  const double inv_n = 1.0 / static_cast<double>(n());
  GradientPair g;
  g.x = loss_gradients(x).transpose() * y;
  g.y = losses(x) - 2.0 * reg_weight_ * (y.array() - inv_n).matrix();
  return g;
}

std::optional<GradientPair> DroInstance::component_gradient(const Vector& x, const Vector& y,
                                                            const Sample& s) const {
  check_y(y);
  if (s.index >= n()) throw PreconditionViolation("DroInstance: component index out of range");
  const auto i = static_cast<Index>(s.index);
  const double nn = static_cast<double>(n());
  const double m = margin(x, s.index);
  GradientPair g;
  g.x = (nn * y(i) * loss_slope(m) * labels_(i)) * features_.row(i).transpose();
  g.y = -2.0 * reg_weight_ * (y.array() - 1.0 / nn).matrix();
  g.y(i) += nn * robust_phi(softplus(-m));
  return g;
}

PhiValue DroInstance::phi_and_grad(const Vector& x) const {
  const InnerMax inner = maximize_regularized_simplex(losses(x), reg_weight_);
  return PhiValue{inner.phi, loss_gradients(x).transpose() * inner.y};
}

double dro_component(const DroInstance& inst, const Vector& x, const Vector& y, std::size_t i) {
  if (i >= inst.n()) throw PreconditionViolation("dro_component: index out of range");
  return inst.eval(x, y, Sample{i, {}});
}

InnerMax solve_inner_max(const DroInstance& inst, const Vector& x) {
  return maximize_regularized_simplex(inst.losses(x), inst.reg_weight());
}

}  // namespace zovr
