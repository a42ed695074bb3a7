#include <fstream>
#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zovr/dro.hpp"
#include "zovr/experiment.hpp"
#include "zovr/isarah.hpp"
#include "zovr/quadratic.hpp"
#include "zovr/simplex.hpp"
#include "zovr/vrgda.hpp"

namespace py = pybind11;
using namespace zovr;

namespace {

ExperimentConfig config_from(const py::dict& settings) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : settings) {
    std::string text;
    if (py::isinstance<py::bool_>(value)) text = value.cast<bool>() ? "true" : "false";
    else text = py::str(value).cast<std::string>();
    set_config_value(cfg, key.cast<std::string>(), text);
  }
  validate(cfg);
  return cfg;
}

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["iter"] = r.iter;
  d["queries"] = r.queries;
  d["snapshot"] = r.snapshot;
  d["phi"] = optional_float(r.phi);
  d["grad_phi_norm"] = optional_float(r.grad_phi_norm);
  d["delta_t"] = optional_float(r.delta_t);
  d["Delta_t"] = optional_float(r.Delta_t);
  return d;
}

py::dict isarah_dict(const IsarahParams& p) {
  py::dict d;
  d["gamma"] = p.gamma;
  d["inner_len"] = p.inner_len;
  d["outer_len"] = p.outer_len;
  d["snapshot_batch"] = p.snapshot_batch;
  d["inner_batch"] = p.inner_batch;
  d["tau"] = p.tau;
  d["delta"] = p.delta;
  d["snapshot_mode"] = p.snapshot_mode == SnapshotMode::FullSum ? "full_sum" : "large_batch";
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zeroth-order variance-reduced descent ascent";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SchemaMismatch>(m, "SchemaMismatch", PyExc_ValueError);
  py::register_exception<OracleFailure>(m, "OracleFailure", PyExc_RuntimeError);

  m.def("project_simplex", &project_simplex, py::arg("v"));

  m.def(
      "maximize_regularized_simplex",
      [](const Vector& f, double reg_weight) {
        const InnerMax r = maximize_regularized_simplex(f, reg_weight);
        return py::make_tuple(r.y, r.phi, r.kkt_residual);
      },
      py::arg("f"), py::arg("reg_weight"),
      "Returns (y, value, kkt_residual) for max over the simplex of <y, f> - reg ||y - 1/n||^2.");

  m.def(
      "vrgda_defaults",
      [](double lipschitz, double strong_concavity, double sigma, Index d1, Index d2, double eps,
         double phi_gap, const std::string& profile, std::optional<std::size_t> n) {
        if (profile != "theory" && profile != "practical")
          throw InvalidArgument("profile must be theory or practical");
        const VrgdaParams p =
            vrgda_defaults(ProblemConstants{lipschitz, strong_concavity, sigma}, d1, d2, eps, phi_gap,
                           profile == "theory" ? Profile::Theory : Profile::Practical, n);
        py::dict d;
        d["zeta"] = p.zeta;
        d["alpha"] = p.alpha;
        d["beta"] = p.beta;
        d["epoch_len"] = p.epoch_len;
        d["inner_len"] = p.inner_len;
        d["snapshot_batch"] = p.snapshot_batch;
        d["snapshot_mode"] = p.snapshot_mode == SnapshotMode::FullSum ? "full_sum" : "large_batch";
        d["batch_x"] = p.batch_x;
        d["batch_y"] = p.batch_y;
        d["outer_len"] = p.outer_len;
        d["mu1"] = p.smoothing.mu1;
        d["mu2"] = p.smoothing.mu2;
        d["delta"] = p.smoothing.delta;
        return d;
      },
      py::arg("lipschitz"), py::arg("strong_concavity"), py::arg("sigma"), py::arg("d1"),
      py::arg("d2"), py::arg("eps"), py::arg("phi_gap") = 1.0, py::arg("profile") = "theory",
      py::arg("n") = py::none());

  m.def(
      "isarah_defaults",
      [](double l, double mu, double sigma, Index d, double eps, double grad0_norm_sq) {
        return isarah_dict(isarah_defaults(l, mu, sigma, d, eps, grad0_norm_sq));
      },
      py::arg("lipschitz"), py::arg("mu"), py::arg("sigma"), py::arg("d"), py::arg("eps"),
      py::arg("grad0_norm_sq"));

  py::class_<QuadraticSaddle>(m, "QuadraticSaddle")
      .def_static(
          "conditioned",
          [](Index d1, Index d2, double kappa, double sigma, std::uint64_t seed,
             std::optional<std::size_t> n) {
            QuadraticSaddle::ConditionedSpec spec;
            spec.d1 = d1;
            spec.d2 = d2;
            spec.kappa = kappa;
            spec.seed = seed;
            spec.noise = LinearNoise{sigma, n ? Regime{FiniteSum{*n}} : Regime{Online{}}, seed};
            return QuadraticSaddle::conditioned(spec);
          },
          py::arg("d1"), py::arg("d2"), py::arg("kappa") = 5.0, py::arg("sigma") = 0.0,
          py::arg("seed") = 0, py::arg("n") = py::none())
      .def_property_readonly("d1", &QuadraticSaddle::dim_x)
      .def_property_readonly("d2", &QuadraticSaddle::dim_y)
      .def_property_readonly("kappa", [](const QuadraticSaddle& q) { return q.constants().kappa(); })
      .def("value", &QuadraticSaddle::value, py::arg("x"), py::arg("y"))
      .def("gradient",
           [](const QuadraticSaddle& q, const Vector& x, const Vector& y) {
             const GradientPair g = *q.true_gradient(x, y);
             return py::make_tuple(g.x, g.y);
           },
           py::arg("x"), py::arg("y"))
      .def("inner_argmax", &QuadraticSaddle::inner_argmax, py::arg("x"))
      .def("phi_and_grad",
           [](const QuadraticSaddle& q, const Vector& x) {
             const PhiValue v = q.phi_and_grad(x);
             return py::make_tuple(v.phi, v.grad);
           },
           py::arg("x"));

  py::class_<DroInstance>(m, "DroInstance")
      .def(py::init([](const std::string& path, std::size_t minority_count, std::size_t ratio,
                       std::uint64_t subsample_seed, double reg_weight) {
             std::ifstream in(path);
             if (!in) throw InvalidArgument("cannot open " + path);
             SparseDataset ds = parse_libsvm(in);
             if (minority_count > 0) {
               RandomStream rng(subsample_seed);
               ds = subsample_unbalanced(ds, minority_count, ratio, rng);
             }
             return DroInstance(ds, reg_weight);
           }),
           py::arg("path"), py::arg("minority_count") = 0, py::arg("ratio") = 4,
           py::arg("subsample_seed") = 0, py::arg("reg_weight") = 10.0)
      .def_property_readonly("n", &DroInstance::n)
      .def_property_readonly("dim", &DroInstance::dim_x)
      .def("losses", &DroInstance::losses, py::arg("x"))
      .def("objective", &DroInstance::objective, py::arg("x"), py::arg("y"))
      .def("phi_and_grad",
           [](const DroInstance& inst, const Vector& x) {
             const PhiValue v = inst.phi_and_grad(x);
             return py::make_tuple(v.phi, v.grad);
           },
           py::arg("x"))
      .def("inner_max",
           [](const DroInstance& inst, const Vector& x) {
             const InnerMax r = solve_inner_max(inst, x);
             return py::make_tuple(r.y, r.phi);
           },
           py::arg("x"));

  m.def(
      "run",
      [](const py::dict& settings) {
        const ExperimentConfig cfg = config_from(settings);
        RunTrace t;
        {
          py::gil_scoped_release release;
          const ExperimentProblem ep = make_problem(cfg);
          RunOptions opts;
          opts.query_budget = cfg.query_budget;
          opts.evaluator = ep.evaluator;
          opts.eval_every = cfg.eval_every;
          t = run_algorithm(cfg, ep, opts);
        }
        py::list records;
        for (const IterationRecord& r : t.records) records.append(record_dict(r));
        py::dict out;
        out["records"] = records;
        out["x_hat"] = t.x_hat;
        out["output_index"] = t.output_index;
        out["x_last"] = t.x_last;
        out["y_last"] = t.y_last;
        out["queries"] = t.counter.total();
        out["init_queries"] = t.init_queries;
        out["eval_queries"] = t.eval_queries;
        out["budget_exhausted"] = t.budget_exhausted;
        out["failure"] = t.failure ? py::object(py::str(*t.failure)) : py::object(py::none());
        return out;
      },
      py::arg("settings"),
      "Runs one configured algorithm in memory. Keys are the config-file keys.");

  m.def(
      "run_experiment",
      [](const py::dict& settings) {
        const ExperimentConfig cfg = config_from(settings);
        std::ostringstream log;
        const ExperimentOutcome o = run_experiment(cfg, log);
        py::dict out;
        out["exit_code"] = o.exit_code;
        out["rows"] = o.rows;
        out["queries"] = o.queries;
        out["eval_queries"] = o.eval_queries;
        out["log"] = log.str();
        return out;
      },
      py::arg("settings"), "Runs a config and writes the trace CSV named by `output`.");

  m.def(
      "compare_traces",
      [](const std::vector<std::string>& paths, double target) {
        py::list rows;
        for (const CompareRow& r : compare_traces(paths, target)) {
          rows.append(py::make_tuple(r.path, r.queries ? py::object(py::int_(*r.queries))
                                                       : py::object(py::none())));
        }
        return rows;
      },
      py::arg("paths"), py::arg("target"));
}
