#ifndef ZOVR_ESTIMATORS_HPP
#define ZOVR_ESTIMATORS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "zovr/problem.hpp"

namespace zovr {

/// Number of evaluations of F, with a per-phase breakdown.
class QueryCounter {
 public:
  void add(std::string_view phase, std::int64_t queries);
  std::int64_t total() const { return total_; }
  std::int64_t phase(std::string_view name) const;
  const std::map<std::string, std::int64_t, std::less<>>& breakdown() const { return breakdown_; }

 private:
  std::int64_t total_ = 0;
  std::map<std::string, std::int64_t, std::less<>> breakdown_;
};

/// Smoothing radii: mu1 (x block), mu2 (y block), tau (joint) and the
/// coordinate step delta.
struct SmoothingConfig {
  double mu1 = 1e-4;
  double mu2 = 1e-4;
  double tau = 1e-4;
  double delta = 1e-4;

  void validate() const;
};

struct GradEstimate {
  Vector v;
  Vector u;
  std::int64_t queries = 0;
};

struct BlockEstimate {
  Vector grad;
  std::int64_t queries = 0;
};

enum class Block { X, Y, Both };

/// Gaussian-smoothing estimate of grad_x f_mu1:
/// mean_i [F(x + mu1 nu_i, y; xi_i) - F(x, y; xi_i)] / mu1 * nu_i.
BlockEstimate gauss_grad_x(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                           const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                           double mu1);

/// Same with directions perturbing y.
BlockEstimate gauss_grad_y(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                           const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                           double mu2);

/// Joint-variable estimator for a minimization oracle.
BlockEstimate gauss_grad_joint(const StochasticObjective& objective, const Vector& w,
                               const std::vector<Sample>& batch, const std::vector<Vector>& dirs,
                               double tau);

/// Central-difference estimate along every requested coordinate, averaged
/// over the batch. Blocks that are not requested come back as zero vectors.
GradEstimate coord_grad(const MinimaxProblem& problem, const Vector& x, const Vector& y,
                        const std::vector<Sample>& batch, double delta, Block block);

/// Central-difference estimate of grad p for a minimization oracle.
BlockEstimate coord_grad(const StochasticObjective& objective, const Vector& w,
                         const std::vector<Sample>& batch, double delta);

struct Point {
  Vector x;
  Vector y;
};

/// Draws shared by both evaluation points of one recursive update.
struct SpiderDraws {
  std::vector<Sample> batch_x;
  std::vector<Vector> dirs_x;  // nu, dimension d1
  std::vector<Sample> batch_y;
  std::vector<Vector> dirs_y;  // omega, dimension d2
};

/// v' = v + G(new) - G(old), u' = u + H(new) - H(old) with the same draws at
/// both points.
GradEstimate spider_update(const GradEstimate& prev, const Point& point_new,
                           const Point& point_old, const MinimaxProblem& problem,
                           const SpiderDraws& draws, const SmoothingConfig& cfg);

/// Fresh draws for one spider step: batches from `problem` and standard
/// normal directions.
SpiderDraws draw_spider(const MinimaxProblem& problem, std::size_t batch_x, std::size_t batch_y,
                        RandomStream& rng);

std::vector<Vector> gaussian_directions(Index dim, std::size_t count, RandomStream& rng);

}  // namespace zovr

#endif  // ZOVR_ESTIMATORS_HPP
