#include "zovr/concave_maximizer.hpp"

namespace zovr {

std::int64_t inner_query_cost(int m, int batch_x, int batch_y) {
  return 4 * static_cast<std::int64_t>(batch_x + batch_y) * (m + 2);
}

InnerResult maximize_step(const InnerState& state, const MinimaxProblem& problem,
                          const SmoothingConfig& cfg, const Projection& projection,
                          RandomStream& rng, QueryCounter& counter) {
  if (!(state.step_beta > 0.0)) throw InvalidArgument("maximize_step: beta must be > 0");
  if (state.m < 0) throw InvalidArgument("maximize_step: m must be >= 0");
  if (state.batch_x < 1 || state.batch_y < 1)
    throw InvalidArgument("maximize_step: batches must be >= 1");
  if (!state.carried.v.allFinite() || !state.carried.u.allFinite())
    throw OracleFailure("maximize_step: carried estimators are not finite");
  cfg.validate();
  auto project = [&](Vector y) { return projection ? projection(y) : y; };
  const auto bx = static_cast<std::size_t>(state.batch_x);
  const auto by = static_cast<std::size_t>(state.batch_y);

  InnerResult out;
  out.candidate_y.reserve(static_cast<std::size_t>(state.m) + 1);

  // Bridge: carry the estimators across the x move with y frozen.
  SpiderDraws draws = draw_spider(problem, bx, by, rng);
  GradEstimate est = spider_update(state.carried, Point{state.x_new, state.y},
                                   Point{state.x_old, state.y}, problem, draws, cfg);
  out.queries += est.queries;
  out.candidate_y.push_back(state.y);
  out.candidate_v.push_back(est.v);
  out.candidate_u.push_back(est.u);

  Vector prev_y = state.y;
  Vector cur_y = project(state.y + state.step_beta * est.u);
  for (int k = 1; k <= state.m + 1; ++k) {
    draws = draw_spider(problem, bx, by, rng);
    est = spider_update(est, Point{state.x_new, cur_y}, Point{state.x_new, prev_y}, problem,
                        draws, cfg);
    out.queries += est.queries;
    if (k <= state.m) {
      out.candidate_y.push_back(cur_y);
      out.candidate_v.push_back(est.v);
      out.candidate_u.push_back(est.u);
    }
    Vector next_y = project(cur_y + state.step_beta * est.u);
    prev_y = std::move(cur_y);
    cur_y = std::move(next_y);
  }
  counter.add("inner", out.queries);

  out.chosen_index = static_cast<int>(rng.uniform_index(out.candidate_y.size()));
  const auto idx = static_cast<std::size_t>(out.chosen_index);
  out.y_next = out.candidate_y[idx];
  out.v_carry = out.candidate_v[idx];
  out.u_carry = out.candidate_u[idx];
  return out;
}

}  // namespace zovr
