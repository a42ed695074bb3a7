#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "support.hpp"
#include "zovr/concave_maximizer.hpp"
#include "zovr/quadratic.hpp"
#include "zovr/simplex.hpp"

using namespace zovr;
using zovr::testing::CountingProblem;
using zovr::testing::LambdaProblem;

namespace {

LambdaProblem neg_half_norm_y(Index d1, Index d2) {
  return LambdaProblem(d1, d2, [](const Vector&, const Vector& y) { return -0.5 * y.squaredNorm(); });
}

InnerState state_at(const MinimaxProblem& p, const Vector& x, const Vector& y, int m, int bx,
                    int by, double beta) {
  const GradientPair g = *p.true_gradient(x, y);
  InnerState s;
  s.x_old = x;
  s.x_new = x;
  s.y = y;
  s.carried = GradEstimate{g.x, g.y, 0};
  s.step_beta = beta;
  s.m = m;
  s.batch_x = bx;
  s.batch_y = by;
  return s;
}

}  // namespace

TEST(InnerQueryCost, ClosedForm) {
  EXPECT_EQ(inner_query_cost(0, 1, 1), 16);
  EXPECT_EQ(inner_query_cost(3, 2, 5), 4 * 7 * 5);
}

TEST(MaximizeStep, ZeroInnerLengthKeepsOnlyTheInput) {
  const LambdaProblem p = neg_half_norm_y(1, 2);
  InnerState s;
  s.x_old = Vector::Zero(1);
  s.x_new = Vector::Zero(1);
  s.y = Vector{{1.0, -2.0}};
  s.carried = GradEstimate{Vector::Zero(1), Vector{{-1.0, 2.0}}, 0};
  s.m = 0;
  s.step_beta = 0.3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomStream rng(seed);
    QueryCounter counter;
    const InnerResult r = maximize_step(s, p, SmoothingConfig{}, {}, rng, counter);
    EXPECT_EQ(r.chosen_index, 0);
    ASSERT_EQ(r.candidate_y.size(), 1u);
    EXPECT_EQ(r.y_next, s.y);
    // Same x on both sides of the bridge: the carried pair passes through unchanged.
    EXPECT_LT((r.u_carry - s.carried.u).norm(), 1e-12);
    EXPECT_EQ(r.queries, inner_query_cost(0, 1, 1));
  }
}

TEST(MaximizeStep, ConcaveQuadraticContractsGeometrically) {
  // f = -1/2 ||y||^2: exact ascent gives y_k = (1 - beta)^k y_0. The first
  // step uses the exact carried u; later steps use Gaussian differences,
  // so a large y batch keeps them close.
  const LambdaProblem p = neg_half_norm_y(1, 2);
  const double beta = 0.3;
  const Vector y0{{1.0, -2.0}};
  const int m = 5;
  InnerState s;
  s.x_old = Vector::Zero(1);
  s.x_new = Vector::Zero(1);
  s.y = y0;
  s.carried = GradEstimate{Vector::Zero(1), -y0, 0};
  s.m = m;
  s.batch_y = 20000;
  s.step_beta = beta;
  SmoothingConfig cfg;
  cfg.mu2 = 1e-6;
  RandomStream rng(4);
  QueryCounter counter;
  const InnerResult r = maximize_step(s, p, cfg, {}, rng, counter);
  ASSERT_EQ(r.candidate_y.size(), static_cast<std::size_t>(m + 1));
  EXPECT_EQ(r.candidate_y[0], y0);
  EXPECT_NEAR((r.candidate_y[1] - (1 - beta) * y0).norm(), 0.0, 1e-15);
  for (int k = 2; k <= m; ++k) {
    const Vector expect = std::pow(1 - beta, k) * y0;
    EXPECT_LT((r.candidate_y[k] - expect).norm(), 0.05 * y0.norm()) << "k = " << k;
  }
}

TEST(MaximizeStep, QueryCountMatchesClosedForm) {
  const QuadraticSaddle q = QuadraticSaddle::random(3, 4, 2, LinearNoise{0.1, Online{}, 1});
  const CountingProblem p(q);
  InnerState s = state_at(q, Vector::Ones(3), Vector::Zero(4), 4, 3, 5, 0.2);
  s.x_new = s.x_old * 0.9;
  RandomStream rng(1);
  QueryCounter counter;
  const InnerResult r = maximize_step(s, p, SmoothingConfig{}, {}, rng, counter);
  EXPECT_EQ(p.calls(), inner_query_cost(4, 3, 5));
  EXPECT_EQ(r.queries, p.calls());
  EXPECT_EQ(counter.total(), p.calls());
  EXPECT_EQ(counter.phase("inner"), p.calls());
}

TEST(MaximizeStep, ReturnedPairMatchesChosenCandidate) {
  const QuadraticSaddle q = QuadraticSaddle::random(2, 3, 5);
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    InnerState s = state_at(q, Vector::Ones(2), Vector::Zero(3), 3, 2, 2, 0.2);
    s.x_new = Vector{{0.5, 1.5}};
    RandomStream rng(seed);
    QueryCounter counter;
    const InnerResult r = maximize_step(s, q, SmoothingConfig{}, {}, rng, counter);
    ASSERT_GE(r.chosen_index, 0);
    ASSERT_LE(r.chosen_index, 3);
    const auto i = static_cast<std::size_t>(r.chosen_index);
    EXPECT_EQ(r.y_next, r.candidate_y[i]);
    EXPECT_EQ(r.v_carry, r.candidate_v[i]);
    EXPECT_EQ(r.u_carry, r.candidate_u[i]);
    seen.insert(r.chosen_index);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(MaximizeStep, ProjectionKeepsCandidatesOnSimplex) {
  const QuadraticSaddle q = QuadraticSaddle::random(2, 4, 8, LinearNoise{0.3, Online{}, 2});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InnerState s = state_at(q, Vector::Ones(2), Vector::Constant(4, 0.25), 6, 2, 2, 0.5);
    RandomStream rng(seed);
    QueryCounter counter;
    const InnerResult r = maximize_step(s, q, SmoothingConfig{}, project_simplex, rng, counter);
    for (const Vector& y : r.candidate_y) {
      EXPECT_NEAR(y.sum(), 1.0, 1e-12);
      EXPECT_GE(y.minCoeff(), 0.0);
    }
  }
}

TEST(MaximizeStep, RejectsBadInputs) {
  const LambdaProblem p = neg_half_norm_y(1, 2);
  InnerState s;
  s.x_old = Vector::Zero(1);
  s.x_new = Vector::Zero(1);
  s.y = Vector::Zero(2);
  s.carried = GradEstimate{Vector::Zero(1), Vector::Zero(2), 0};
  RandomStream rng(1);
  QueryCounter counter;
  InnerState bad = s;
  bad.step_beta = 0.0;
  EXPECT_THROW(maximize_step(bad, p, SmoothingConfig{}, {}, rng, counter), InvalidArgument);
  bad = s;
  bad.m = -1;
  EXPECT_THROW(maximize_step(bad, p, SmoothingConfig{}, {}, rng, counter), InvalidArgument);
  bad = s;
  bad.batch_y = 0;
  EXPECT_THROW(maximize_step(bad, p, SmoothingConfig{}, {}, rng, counter), InvalidArgument);
  bad = s;
  bad.carried.u[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(maximize_step(bad, p, SmoothingConfig{}, {}, rng, counter), OracleFailure);
}

TEST(MaximizeStep, TrackingErrorShrinksAcrossMostCalls) {
  // Worst-case schedule: beta = 2/(13 l), m = 104 kappa - 1, small x move.
  QuadraticSaddle::ConditionedSpec spec;
  spec.d1 = 4;
  spec.d2 = 4;
  spec.kappa = 2.0;
  spec.seed = 3;
  const QuadraticSaddle q = QuadraticSaddle::conditioned(spec);
  const int m = 104 * 2 - 1;
  const double alpha = 1.0 / (24.0 * 3.0);
  int improved = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    RandomStream draw(1000 + seed);
    const Vector x = draw.normal_vector(4);
    const Vector y = draw.normal_vector(4);
    InnerState s = state_at(q, x, y, m, 8, 8, 2.0 / 13.0);
    s.x_new = x - alpha * s.carried.v;
    RandomStream rng(seed);
    QueryCounter counter;
    const InnerResult r = maximize_step(s, q, SmoothingConfig{}, {}, rng, counter);
    if (tracking_error(q, s.x_new, r.y_next) < tracking_error(q, x, y)) ++improved;
  }
  EXPECT_GE(improved, 18);
}
