#include "zovr/trace.hpp"

namespace zovr {

std::optional<std::size_t> RunTrace::best_index() const {
  std::optional<std::size_t> best;
  auto key = [](const IterationRecord& r) { return r.grad_phi_norm ? *r.grad_phi_norm : *r.phi; };
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].phi && !records[i].grad_phi_norm) continue;
    if (!best || key(records[i]) < key(records[*best])) best = i;
  }
  return best;
}

Vector initial_y(const MinimaxProblem& problem, const RunOptions& options) {
  if (options.y0) {
    if (options.y0->size() != problem.dim_y()) throw InvalidArgument("y0 dimension mismatch");
    return *options.y0;
  }
  if (problem.y_constraint() == YConstraint::Simplex)
    return Vector::Constant(problem.dim_y(), 1.0 / static_cast<double>(problem.dim_y()));
  return Vector::Zero(problem.dim_y());
}

bool is_eval_iteration(std::int64_t iter, const RunOptions& options) {
  return options.eval_every > 0 && iter % options.eval_every == 0;
}

void annotate_record(IterationRecord& record, const MinimaxProblem& problem, const Vector& y,
                     const Vector* v, const Vector* u, const RunOptions& options,
                     RunTrace& trace) {
  if (options.evaluator) {
    const PhiReport report = options.evaluator(record.x);
    record.phi = report.phi;
    record.grad_phi_norm = report.grad_norm;
    trace.eval_queries += report.eval_queries;
  }
  if (auto g = problem.true_gradient(record.x, y)) {
    record.delta_t = g->y.squaredNorm();
    if (v && u) record.Delta_t = (*v - g->x).squaredNorm() + (*u - g->y).squaredNorm();
  }
}

void finish_trace(RunTrace& trace, const Vector& x0, RandomStream& rng) {
  if (trace.records.empty()) {
    trace.x_hat = x0;
    trace.output_index = 0;
    return;
  }
  trace.output_index = rng.uniform_index(trace.records.size());
  trace.x_hat = trace.records[trace.output_index].x;
}

}  // namespace zovr
