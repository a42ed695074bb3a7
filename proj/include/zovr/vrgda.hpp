#ifndef ZOVR_VRGDA_HPP
#define ZOVR_VRGDA_HPP

#include <cstdint>
#include <optional>

#include "zovr/concave_maximizer.hpp"
#include "zovr/isarah.hpp"
#include "zovr/trace.hpp"

namespace zovr {

enum class Profile { Theory, Practical };

struct VrgdaParams {
  double zeta = 1.0;   // initialization accuracy
  double alpha = 0.1;  // x step
  double beta = 0.1;   // y step
  int epoch_len = 1;   // q
  int inner_len = 0;   // m
  std::int64_t snapshot_batch = 1;  // S1, LargeBatch only
  SnapshotMode snapshot_mode = SnapshotMode::LargeBatch;
  int batch_x = 1;  // S2,x
  int batch_y = 1;  // S2,y
  std::int64_t outer_len = 1;  // T
  SmoothingConfig smoothing;
  enum class Init { Auto, Fixed, Skip };
  /// Auto: probe ||grad_y f(x0, y0)||^2 and run the default iSARAH schedule at
  /// accuracy zeta. Fixed: run `init_params` as given. Skip: keep y0.
  Init init = Init::Auto;
  IsarahParams init_params;

  void validate() const;
};

/// Parameter schedule. `Theory` is the exact worst-case schedule
/// (alpha = 1/(24(kappa+1)l), beta = 2/(13l), m = 104 kappa - 1, ...);
/// `Practical` keeps the scalings with small constants: alpha = 1/(2(kappa+1)l),
/// beta = 1/(3l), m = ceil(2 kappa), q = ceil(1/eps), S2 = ceil((d+4) kappa/eps).
/// With `finite_sum_n` the snapshot uses the full sum.
VrgdaParams vrgda_defaults(const ProblemConstants& constants, Index d1, Index d2, double eps,
                           double phi_gap, Profile profile = Profile::Theory,
                           std::optional<std::size_t> finite_sum_n = std::nullopt);

/// Queries spent by the outer loop (snapshots plus inner loops) over
/// `iterations` iterations; initialization excluded.
std::int64_t vrgda_loop_query_cost(const VrgdaParams& params, Index d1, Index d2,
                                   std::int64_t iterations,
                                   std::optional<std::size_t> finite_sum_n = std::nullopt);

struct VrgdaTrace : RunTrace {
  IsarahParams init_params;
  /// Queries spent estimating ||grad p(y_start)||^2 before the initializer ran.
  std::int64_t init_probe_queries = 0;
};

/// Zeroth-order variance-reduced gradient descent ascent. Randomness is
/// split into the named substreams "init", "snapshot", "inner" and "output"
/// of `rng`.
VrgdaTrace vrgda_run(const MinimaxProblem& problem, const Vector& x0, const VrgdaParams& params,
                     const RandomStream& rng, const RunOptions& options = {});

}  // namespace zovr

#endif  // ZOVR_VRGDA_HPP
