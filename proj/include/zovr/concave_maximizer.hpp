#ifndef ZOVR_CONCAVE_MAXIMIZER_HPP
#define ZOVR_CONCAVE_MAXIMIZER_HPP

#include <cstdint>
#include <vector>

#include "zovr/estimators.hpp"
#include "zovr/isarah.hpp"

namespace zovr {

/// Input of one inner loop: the x move (x_old -> x_new), the current y and
/// the estimator pair that was valid at (x_old, y).
struct InnerState {
  Vector x_old;
  Vector x_new;
  Vector y;
  GradEstimate carried;
  double step_beta = 0.1;
  int m = 0;
  int batch_x = 1;
  int batch_y = 1;
};

struct InnerResult {
  Vector y_next;
  Vector v_carry;
  Vector u_carry;
  int chosen_index = 0;
  std::int64_t queries = 0;
  // Candidates 0..m: iterates and the estimator pair recorded at each.
  std::vector<Vector> candidate_y;
  std::vector<Vector> candidate_v;
  std::vector<Vector> candidate_u;
};

/// Variance-reduced zeroth-order ascent on y: one bridge update across the
/// x move, then m + 1 recursive steps with x frozen. Returns a uniformly
/// chosen candidate among indices 0..m together with its estimator pair.
InnerResult maximize_step(const InnerState& state, const MinimaxProblem& problem,
                          const SmoothingConfig& cfg, const Projection& projection,
                          RandomStream& rng, QueryCounter& counter);

/// 4 (S2x + S2y)(m + 2).
std::int64_t inner_query_cost(int m, int batch_x, int batch_y);

}  // namespace zovr

#endif  // ZOVR_CONCAVE_MAXIMIZER_HPP
