#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "zovr/quadratic.hpp"
#include "zovr/vrgda.hpp"

using namespace zovr;
using zovr::testing::CountingProblem;

namespace {

QuadraticSaddle small_saddle(double sigma, Regime regime = Online{}, double kappa = 2.0) {
  QuadraticSaddle::ConditionedSpec spec;
  spec.d1 = 3;
  spec.d2 = 3;
  spec.kappa = kappa;
  spec.noise = LinearNoise{sigma, regime, 11};
  spec.seed = 6;
  return QuadraticSaddle::conditioned(spec);
}

VrgdaParams tiny_params() {
  VrgdaParams p;
  p.alpha = 0.1;
  p.beta = 0.3;
  p.epoch_len = 3;
  p.inner_len = 2;
  p.snapshot_batch = 4;
  p.batch_x = 2;
  p.batch_y = 3;
  p.outer_len = 7;
  p.smoothing = SmoothingConfig{1e-3, 1e-3, 1e-3, 1e-3};
  p.init = VrgdaParams::Init::Skip;
  return p;
}

PhiEvaluator exact_phi(const QuadraticSaddle& q) {
  return [&q](const Vector& x) {
    const PhiValue v = q.phi_and_grad(x);
    return PhiReport{v.phi, v.grad.norm(), 0};
  };
}

}  // namespace

TEST(VrgdaDefaults, TheoryWorkedInstantiation) {
  const VrgdaParams p = vrgda_defaults(ProblemConstants{1.0, 0.1, 1.0}, 2, 2, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(p.zeta, 0.1);
  EXPECT_DOUBLE_EQ(p.alpha, 1.0 / 264.0);
  EXPECT_DOUBLE_EQ(p.beta, 2.0 / 13.0);
  EXPECT_EQ(p.inner_len, 1039);
  EXPECT_EQ(p.epoch_len, 1959);
  EXPECT_EQ(p.snapshot_batch, 403200000);
  EXPECT_EQ(p.batch_x, 3360000);
  EXPECT_EQ(p.batch_y, 3360000);
  EXPECT_EQ(p.outer_len, 1900800);
  EXPECT_EQ(p.snapshot_mode, SnapshotMode::LargeBatch);
  EXPECT_NEAR(p.smoothing.delta, 0.1 / (71.0 * 10.0 * 2.0), 1e-18);
  EXPECT_NEAR(p.smoothing.mu1, 0.1 / (71.0 * std::pow(10.0, 2.5) * std::pow(8.0, 1.5)), 1e-18);
  EXPECT_DOUBLE_EQ(p.smoothing.mu1, p.smoothing.mu2);
}

TEST(VrgdaDefaults, UnitConditionNumber) {
  EXPECT_EQ(vrgda_defaults(ProblemConstants{2.0, 2.0, 1.0}, 2, 2, 0.1, 1.0).inner_len, 103);
}

TEST(VrgdaDefaults, FiniteSumWithManyComponents) {
  const std::size_t n = 400;  // >= kappa^2 = 100
  const VrgdaParams p =
      vrgda_defaults(ProblemConstants{1.0, 0.1, 1.0}, 2, 3, 0.1, 1.0, Profile::Theory, n);
  EXPECT_EQ(p.snapshot_mode, SnapshotMode::FullSum);
  EXPECT_EQ(p.batch_x, 5600 * 6 * 10 * 20);
  EXPECT_EQ(p.batch_y, 5600 * 7 * 10 * 20);
  EXPECT_EQ(p.epoch_len, static_cast<int>(std::ceil(2800.0 * 10 * 20 / (13.0 * 11))));
}

TEST(VrgdaDefaults, FiniteSumWithFewComponents) {
  const VrgdaParams p =
      vrgda_defaults(ProblemConstants{1.0, 0.1, 1.0}, 2, 3, 0.1, 1.0, Profile::Theory, 50);
  EXPECT_EQ(p.snapshot_mode, SnapshotMode::FullSum);
  EXPECT_EQ(p.epoch_len, 1);
  EXPECT_EQ(p.batch_x, 56 * 6 + 420);
}

TEST(VrgdaDefaults, PracticalProfile) {
  const VrgdaParams p = vrgda_defaults(ProblemConstants{1.0, 0.2, 0.1}, 10, 10, 0.1, 1.0,
                                       Profile::Practical);
  EXPECT_DOUBLE_EQ(p.alpha, 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(p.beta, 1.0 / 3.0);
  EXPECT_EQ(p.inner_len, 10);
  EXPECT_EQ(p.epoch_len, 10);
  EXPECT_EQ(p.snapshot_batch, 25);
  EXPECT_EQ(p.batch_x, 700);
  EXPECT_EQ(p.outer_len, 600);
  const VrgdaParams f = vrgda_defaults(ProblemConstants{1.0, 0.2, 0.1}, 10, 10, 0.1, 1.0,
                                       Profile::Practical, 20);
  EXPECT_EQ(f.snapshot_mode, SnapshotMode::FullSum);
  EXPECT_EQ(f.batch_x, 20);
}

TEST(VrgdaDefaults, RejectsOutOfRangeAccuracy) {
  EXPECT_THROW(vrgda_defaults(ProblemConstants{}, 2, 2, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(vrgda_defaults(ProblemConstants{}, 2, 2, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(vrgda_defaults(ProblemConstants{}, 0, 2, 0.1, 1.0), InvalidArgument);
}

TEST(VrgdaRun, SmallestRun) {
  const QuadraticSaddle q = small_saddle(0.1);
  VrgdaParams p = tiny_params();
  p.outer_len = 1;
  p.epoch_len = 1;
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), p, RandomStream(1));
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_TRUE(t.records[0].snapshot);
  EXPECT_EQ(t.output_index, 0u);
  EXPECT_EQ(t.x_hat, Vector::Ones(3));
  EXPECT_EQ(t.counter.phase("snapshot"), 2 * 4 * 6);
  EXPECT_EQ(t.counter.phase("inner"), inner_query_cost(2, 2, 3));
  EXPECT_NE(t.x_last, Vector::Ones(3));
}

TEST(VrgdaRun, QueryCountMatchesClosedForm) {
  const QuadraticSaddle q = small_saddle(0.1);
  const CountingProblem p(q);
  const VrgdaParams params = tiny_params();
  const VrgdaTrace t = vrgda_run(p, Vector::Ones(3), params, RandomStream(2));
  const std::int64_t loop = vrgda_loop_query_cost(params, 3, 3, 7);
  EXPECT_EQ(loop, 3 * 2 * 4 * 6 + 7 * inner_query_cost(2, 2, 3));
  EXPECT_EQ(t.counter.total(), loop);
  EXPECT_EQ(p.calls(), loop);
}

TEST(VrgdaRun, QueryCountIncludesInitialization) {
  const QuadraticSaddle q = small_saddle(0.1);
  const CountingProblem p(q);
  VrgdaParams params = tiny_params();
  params.init = VrgdaParams::Init::Fixed;
  params.init_params.inner_len = 4;
  params.init_params.outer_len = 2;
  params.init_params.snapshot_batch = 5;
  params.init_params.inner_batch = 3;
  const VrgdaTrace t = vrgda_run(p, Vector::Ones(3), params, RandomStream(2));
  const std::int64_t init = isarah_query_cost(params.init_params, 3, std::nullopt);
  EXPECT_EQ(t.init_queries, init);
  EXPECT_EQ(t.counter.total(), init + vrgda_loop_query_cost(params, 3, 3, 7));
  EXPECT_EQ(p.calls(), t.counter.total());
}

TEST(VrgdaRun, AutoInitializationChargesProbe) {
  const QuadraticSaddle q = small_saddle(0.1);
  const CountingProblem p(q);
  VrgdaParams params = tiny_params();
  params.init = VrgdaParams::Init::Auto;
  params.zeta = 0.5;
  const VrgdaTrace t = vrgda_run(p, Vector::Ones(3), params, RandomStream(3));
  EXPECT_GT(t.init_probe_queries, 0);
  EXPECT_EQ(t.init_queries,
            t.init_probe_queries + isarah_query_cost(t.init_params, 3, std::nullopt));
  EXPECT_EQ(p.calls(), t.counter.total());
}

TEST(VrgdaRun, FullSumSnapshotUsesEveryComponent) {
  const QuadraticSaddle q = small_saddle(0.1, FiniteSum{5});
  const CountingProblem p(q);
  VrgdaParams params = tiny_params();
  params.snapshot_mode = SnapshotMode::FullSum;
  const VrgdaTrace t = vrgda_run(p, Vector::Ones(3), params, RandomStream(4));
  EXPECT_EQ(t.counter.phase("snapshot"), 3 * 2 * 5 * 6);
  EXPECT_EQ(p.calls(), vrgda_loop_query_cost(params, 3, 3, 7, 5));
}

TEST(VrgdaRun, FullSumRequiresFiniteSum) {
  const QuadraticSaddle q = small_saddle(0.1);
  VrgdaParams params = tiny_params();
  params.snapshot_mode = SnapshotMode::FullSum;
  EXPECT_THROW(vrgda_run(q, Vector::Ones(3), params, RandomStream(1)), PreconditionViolation);
}

TEST(VrgdaRun, SnapshotsExactlyAtEpochStarts) {
  const QuadraticSaddle q = small_saddle(0.1);
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(5));
  ASSERT_EQ(t.records.size(), 7u);
  for (const auto& r : t.records) EXPECT_EQ(r.snapshot, r.iter % 3 == 0) << r.iter;
}

TEST(VrgdaRun, TraceInvariants) {
  const QuadraticSaddle q = small_saddle(0.1);
  RunOptions opts;
  opts.evaluator = exact_phi(q);
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(6), opts);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    EXPECT_EQ(t.records[i].iter, static_cast<std::int64_t>(i));
    EXPECT_DOUBLE_EQ(t.records[i].step_x, 0.1);
    EXPECT_TRUE(t.records[i].phi && t.records[i].grad_phi_norm && t.records[i].delta_t &&
                t.records[i].Delta_t);
    if (i > 0) EXPECT_GT(t.records[i].queries, t.records[i - 1].queries);
  }
  ASSERT_LT(t.output_index, t.records.size());
  EXPECT_EQ(t.x_hat, t.records[t.output_index].x);
}

TEST(VrgdaRun, EvalEverySkipsDiagnostics) {
  const QuadraticSaddle q = small_saddle(0.1);
  RunOptions opts;
  opts.evaluator = exact_phi(q);
  opts.eval_every = 3;
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(6), opts);
  for (const auto& r : t.records) EXPECT_EQ(r.phi.has_value(), r.iter % 3 == 0);
}

TEST(VrgdaRun, OutputIndexIsUniform) {
  const QuadraticSaddle q = small_saddle(0.0);
  VrgdaParams p = tiny_params();
  p.outer_len = 4;
  std::array<int, 4> counts{};
  for (std::uint64_t seed = 0; seed < 400; ++seed)
    ++counts.at(vrgda_run(q, Vector::Ones(3), p, RandomStream(seed)).output_index);
  for (int c : counts) EXPECT_NEAR(c, 100, 35);
}

TEST(VrgdaRun, DeterministicForSeed) {
  const QuadraticSaddle q = small_saddle(0.1);
  const VrgdaTrace a = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(9));
  const VrgdaTrace b = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(9));
  const VrgdaTrace c = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(10));
  EXPECT_EQ(a.x_last, b.x_last);
  EXPECT_EQ(a.output_index, b.output_index);
  EXPECT_NE(a.x_last, c.x_last);
}

TEST(VrgdaRun, BudgetIsAHardCap) {
  const QuadraticSaddle q = small_saddle(0.1);
  RunOptions opts;
  opts.query_budget = 500;
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), tiny_params(), RandomStream(1), opts);
  EXPECT_TRUE(t.budget_exhausted);
  EXPECT_LE(t.counter.total(), 500);
  EXPECT_LT(t.records.size(), 7u);
}

TEST(VrgdaRun, BudgetCapsInitialization) {
  const QuadraticSaddle q = small_saddle(0.1);
  VrgdaParams p = tiny_params();
  p.init = VrgdaParams::Init::Fixed;
  p.init_params.inner_len = 4;
  p.init_params.outer_len = 5;
  p.init_params.snapshot_batch = 5;
  p.init_params.inner_batch = 3;
  const std::int64_t per_outer = isarah_query_cost(p.init_params, 3, std::nullopt) / 5;
  RunOptions opts;
  opts.query_budget = 2 * per_outer + 1;
  const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), p, RandomStream(1), opts);
  EXPECT_TRUE(t.budget_exhausted);
  EXPECT_EQ(t.init_params.outer_len, 2);
  EXPECT_EQ(t.counter.total(), 2 * per_outer);
  EXPECT_TRUE(t.records.empty());

  // Auto: the probe alone does not fit.
  p.init = VrgdaParams::Init::Auto;
  p.zeta = 0.01;
  opts.query_budget = isarah_probe_cost(3, q.constants(), p.zeta, std::nullopt) - 1;
  const VrgdaTrace a = vrgda_run(q, Vector::Ones(3), p, RandomStream(1), opts);
  EXPECT_TRUE(a.budget_exhausted);
  EXPECT_EQ(a.counter.total(), 0);
}

TEST(VrgdaRun, ParameterValidation) {
  const QuadraticSaddle q = small_saddle(0.1);
  VrgdaParams p = tiny_params();
  p.alpha = 0.0;
  EXPECT_THROW(vrgda_run(q, Vector::Ones(3), p, RandomStream(1)), InvalidArgument);
  p = tiny_params();
  p.epoch_len = 0;
  EXPECT_THROW(vrgda_run(q, Vector::Ones(3), p, RandomStream(1)), InvalidArgument);
  EXPECT_THROW(vrgda_run(q, Vector::Ones(2), tiny_params(), RandomStream(1)), InvalidArgument);
}

TEST(VrgdaRun, PracticalScheduleFindsStationaryPoint) {
  const QuadraticSaddle q = small_saddle(0.01);
  const double eps = 0.1;
  VrgdaParams p = vrgda_defaults(q.constants(), 3, 3, eps, 1.0, Profile::Practical);
  p.outer_len = 300;
  RunOptions opts;
  opts.evaluator = exact_phi(q);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const VrgdaTrace t = vrgda_run(q, Vector::Ones(3), p, RandomStream(seed), opts);
    const auto best = t.best_index();
    ASSERT_TRUE(best.has_value());
    EXPECT_LE(*t.records[*best].grad_phi_norm, eps) << "seed " << seed;

    // Estimator error scales with ||grad f||^2, so the bounded-error check
    // runs from the converged point where the trajectory is stationary.
    const VrgdaTrace s = vrgda_run(q, t.x_last, p, RandomStream(100 + seed), opts);
    std::vector<double> deltas;
    for (const auto& r : s.records) deltas.push_back(*r.Delta_t);
    const double max_delta = *std::max_element(deltas.begin(), deltas.end());
    std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2, deltas.end());
    EXPECT_LE(max_delta, 100.0 * deltas[deltas.size() / 2]) << "seed " << seed;
  }
}
