#ifndef ZOVR_ISARAH_HPP
#define ZOVR_ISARAH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zovr/estimators.hpp"

namespace zovr {

enum class SnapshotMode { LargeBatch, FullSum };

struct IsarahParams {
  double gamma = 0.1;
  int inner_len = 1;     // I
  int outer_len = 1;     // T
  int snapshot_batch = 1;  // B1, LargeBatch only
  int inner_batch = 1;   // B2
  double tau = 1e-4;
  double delta = 1e-4;
  SnapshotMode snapshot_mode = SnapshotMode::LargeBatch;

  void validate() const;
};

/// Online schedule: gamma = 2/(9l), I = ceil(36 kappa) - 1, B1 = ceil(25 sigma^2/eps),
/// B2 = d, T = ceil(log2(5 g0/eps)), delta = 2 sqrt(eps)/(5 l sqrt(d)),
/// tau = min{sqrt(eps)/(3 l (d+3)^1.5), sqrt(2 eps/(5 l mu d))}.
/// When eps >= g0 the outer length is clamped to 1.
IsarahParams isarah_defaults(double l, double mu, double sigma, Index d, double eps,
                             double grad0_norm_sq);

/// Finite-sum schedule (full-gradient snapshot): T = ceil(log2(4 g0/eps)),
/// delta = sqrt(eps)/(3 l sqrt(d)), tau = min{sqrt(eps)/(3 l (d+3)^1.5), sqrt(eps/(2 l mu d))}.
IsarahParams isarah_defaults_full_sum(double l, double mu, Index d, double eps,
                                      double grad0_norm_sq);

struct IsarahSchedule {
  IsarahParams params;
  std::int64_t probe_queries = 0;
};

/// Default schedule at accuracy eps with T set from a coordinate estimate of
/// ||grad p(w0)||^2 (full sum when `full_sum`, otherwise B1 samples). The
/// probe's queries are returned, not charged to any counter.
IsarahSchedule isarah_probe_schedule(const StochasticObjective& objective, const Vector& w0,
                                     const ProblemConstants& constants, double eps,
                                     bool full_sum, RandomStream& rng);

/// Queries spent by isarah_probe_schedule: one coordinate pass over B1
/// samples, or over all n components when `finite_sum_n` is given.
std::int64_t isarah_probe_cost(Index d, const ProblemConstants& constants, double eps,
                               std::optional<std::size_t> finite_sum_n);

/// Closed-form query cost of one run: T (2 d B + 4 B2 (I - 1)) with B = B1
/// or n.
std::int64_t isarah_query_cost(const IsarahParams& params, Index d,
                               std::optional<std::size_t> finite_sum_n);

struct IsarahTraceEntry {
  int outer = 0;
  Vector w;  // w~_t
  std::optional<double> grad_norm_sq;  // ||grad p(w~_t)||^2 when exact gradients exist
  std::int64_t queries = 0;
};

struct IsarahResult {
  Vector w_out;
  std::vector<IsarahTraceEntry> trace;
};

/// Optional feasibility map applied after every step (identity when empty).
using Projection = std::function<Vector(const Vector&)>;

/// Zeroth-order inexact SARAH for min_w E[P(w; xi)].
IsarahResult isarah_run(const StochasticObjective& objective, const Vector& w0,
                        const IsarahParams& params, RandomStream& rng, QueryCounter& counter,
                        const Projection& projection = {});

}  // namespace zovr

#endif  // ZOVR_ISARAH_HPP
