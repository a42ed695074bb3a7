#ifndef ZOVR_BASELINES_HPP
#define ZOVR_BASELINES_HPP

#include <cstdint>

#include "zovr/trace.hpp"

namespace zovr {

/// Settings shared by the two stochastic GDA baselines.
struct BaselineParams {
  double eta = 0.01;
  /// ZO-SGDA moves x with eta / timescale_ratio. Infinity freezes x.
  double timescale_ratio = 10.0;
  int batch_x = 1;
  int batch_y = 1;
  SmoothingConfig smoothing;
  std::int64_t outer_len = 1;
  /// ZO-SGDMSA ascent steps on y per x step.
  int msa_inner_len = 5;

  void validate() const;
};

/// Mini-batch B = ceil(C d / eps^2) per block, stepsize eta.
BaselineParams baseline_defaults(Index d1, Index d2, double eps, const SmoothingConfig& smoothing,
                                 std::int64_t outer_len, double c = 0.1, double eta = 0.01,
                                 double timescale_ratio = 10.0, int msa_inner_len = 5);

/// Two-timescale simultaneous descent ascent with Gaussian estimators.
RunTrace zo_sgda_run(const MinimaxProblem& problem, const Vector& x0,
                     const BaselineParams& params, const RandomStream& rng,
                     const RunOptions& options = {});

/// Multi-step ascent on y followed by one descent step on x.
RunTrace zo_sgdmsa_run(const MinimaxProblem& problem, const Vector& x0,
                       const BaselineParams& params, const RandomStream& rng,
                       const RunOptions& options = {});

std::int64_t zo_sgda_query_cost(const BaselineParams& params, std::int64_t iterations);
std::int64_t zo_sgdmsa_query_cost(const BaselineParams& params, std::int64_t iterations);

}  // namespace zovr

#endif  // ZOVR_BASELINES_HPP
