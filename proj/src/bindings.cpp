#include "cann/bench.hpp"
#include "cann/checkpoint.hpp"
#include "cann/errors.hpp"
#include "cann/evolve.hpp"
#include "cann/gradcheck.hpp"
#include "cann/grid.hpp"
#include "cann/network.hpp"
#include "cann/problems.hpp"
#include "cann/quadrature.hpp"
#include "cann/stencil.hpp"
#include "cann/training.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

namespace py = pybind11;
using namespace cann;

namespace {

SpaceFn wrap_space(const py::function& f) {
    return [f](std::span<const double> x) {
        py::gil_scoped_acquire gil;
        return f(std::vector<double>(x.begin(), x.end())).cast<double>();
    };
}

SpaceTimeFn wrap_spacetime(const py::function& f) {
    return [f](std::span<const double> x, double t) {
        py::gil_scoped_acquire gil;
        return f(std::vector<double>(x.begin(), x.end()), t).cast<double>();
    };
}

StencilSpec make_stencil(const std::string& kind, int dim) {
    StencilSpec spec;
    spec.dim = dim;
    if (kind == "edge") spec.kind = StencilSpec::Kind::EdgeNeighbors;
    else if (kind == "vertex") spec.kind = StencilSpec::Kind::VertexNeighbors;
    else throw ConfigError("stencil kind must be 'edge' or 'vertex'");
    return spec;
}

TargetMode mode_from(const std::string& mode) {
    if (mode == "fd") return TargetMode::FDReference;
    if (mode == "exact") return TargetMode::ExactAverages;
    throw ConfigError("target mode must be 'fd' or 'exact'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cell-average network PDE solver (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_RuntimeError);

    py::class_<GridSpec>(m, "GridSpec")
        .def_readonly("dim", &GridSpec::dim)
        .def_readonly("lo", &GridSpec::lo)
        .def_readonly("hi", &GridSpec::hi)
        .def_readonly("counts", &GridSpec::counts)
        .def_readonly("dx", &GridSpec::dx)
        .def_readonly("cell_measure", &GridSpec::cell_measure)
        .def("total_cells", &GridSpec::total_cells)
        .def("flat_index",
             [](const GridSpec& g, const std::vector<int>& multi) {
                 return g.flat_index(multi);
             })
        .def("multi_index",
             [](const GridSpec& g, std::size_t flat) { return g.multi_index(flat); })
        .def("cell_center", &GridSpec::cell_center);

    m.def("build_grid",
          [](const std::vector<double>& lo, const std::vector<double>& hi,
             const std::vector<int>& counts) { return build_grid(lo, hi, counts); });

    py::class_<Field>(m, "Field")
        .def_readonly("grid", &Field::grid)
        .def_readonly("time", &Field::time)
        .def_property_readonly("values",
                               [](const Field& f) {
                                   return Eigen::Map<const Eigen::VectorXd>(
                                       f.values.data(),
                                       static_cast<Eigen::Index>(f.values.size()))
                                       .eval();
                               })
        .def("with_values", [](const Field& f, const Eigen::VectorXd& v) {
            if (static_cast<std::size_t>(v.size()) != f.values.size())
                throw ConfigError("with_values: length mismatch");
            Field out = f;
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] = v[static_cast<Eigen::Index>(i)];
            return out;
        });

    py::class_<BoundaryCondition>(m, "BoundaryCondition");
    m.def("periodic_bc", [] { return BoundaryCondition::periodic(); });
    m.def("dirichlet_bc",
          [](const py::function& f) { return BoundaryCondition::dirichlet(wrap_spacetime(f)); });

    py::class_<PaddedField>(m, "PaddedField")
        .def_readonly("time", &PaddedField::time)
        .def("at", [](const PaddedField& p, const std::vector<int>& multi) {
            return p.at(multi);
        });

    m.def("cell_average",
          [](const GridSpec& grid, const py::function& f, int q) {
              return cell_average(grid, wrap_space(f), q);
          },
          py::arg("grid"), py::arg("f"), py::arg("q") = 4);
    m.def("apply_ghost", &apply_ghost);

    py::class_<StencilSpec>(m, "StencilSpec")
        .def(py::init(&make_stencil), py::arg("kind"), py::arg("dim"))
        .def_property_readonly("kind",
                               [](const StencilSpec& s) {
                                   return s.kind == StencilSpec::Kind::EdgeNeighbors
                                              ? "edge"
                                              : "vertex";
                               })
        .def_readonly("dim", &StencilSpec::dim)
        .def("input_width", &StencilSpec::input_width)
        .def("center_position", &StencilSpec::center_position)
        .def("offsets", &StencilSpec::offsets);

    py::class_<LearningSet>(m, "LearningSet")
        .def_readonly("inputs", &LearningSet::inputs)
        .def_readonly("targets", &LearningSet::targets)
        .def_readonly("center_inputs", &LearningSet::center_inputs)
        .def_readonly("cell_ids", &LearningSet::cell_ids)
        .def_readonly("pair_count", &LearningSet::pair_count)
        .def_readonly("cell_measure", &LearningSet::cell_measure)
        .def("__len__", [](const LearningSet& s) { return s.size(); });

    m.def("build_input_vector",
          [](const PaddedField& padded, const std::vector<int>& cell, const StencilSpec& spec) {
              return build_input_vector(padded, cell, spec);
          });
    m.def("build_input_matrix", &build_input_matrix);
    m.def("assemble_pairs", &assemble_pairs);

    py::class_<MlpParams>(m, "MlpParams")
        .def_readonly("sizes", &MlpParams::sizes)
        .def_readonly("weights", &MlpParams::weights)
        .def_readonly("biases", &MlpParams::biases)
        .def("parameter_count", &MlpParams::parameter_count);

    py::class_<Gradients>(m, "Gradients")
        .def_readonly("weights", &Gradients::weights)
        .def_readonly("biases", &Gradients::biases);

    m.def("init_params", &init_params);
    m.def("zero_params", &zero_params);
    m.def("forward", &forward);
    m.def("predict_cell", &predict_cell);
    m.def("backward", &backward);
    m.def("forward_batch", &forward_batch);
    m.def("predict_batch", &predict_batch);
    m.def("flatten_params", &flatten_params);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_iters", &TrainConfig::max_iters)
        .def_readwrite("tolerance", &TrainConfig::tolerance)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("beta1", &TrainConfig::beta1)
        .def_readwrite("beta2", &TrainConfig::beta2)
        .def_readwrite("epsilon_guard", &TrainConfig::epsilon_guard)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("split_fraction", &TrainConfig::split_fraction)
        .def_readwrite("log_every", &TrainConfig::log_every)
        .def_readwrite("freeze_hidden", &TrainConfig::freeze_hidden)
        .def_readwrite("train_biases", &TrainConfig::train_biases)
        .def_property(
            "optimizer",
            [](const TrainConfig& c) {
                return c.optimizer == TrainConfig::Optimizer::Adam ? "adam" : "sgd";
            },
            [](TrainConfig& c, const std::string& opt) {
                if (opt == "adam") c.optimizer = TrainConfig::Optimizer::Adam;
                else if (opt == "sgd") c.optimizer = TrainConfig::Optimizer::Sgd;
                else throw ConfigError("optimizer must be 'adam' or 'sgd'");
            });

    py::class_<LossHistory>(m, "LossHistory")
        .def_readonly("iterations", &LossHistory::iterations)
        .def_readonly("losses", &LossHistory::losses);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("history", &TrainResult::history)
        .def_readonly("best_loss", &TrainResult::best_loss)
        .def_readonly("iterations", &TrainResult::iterations)
        .def_readonly("restarts", &TrainResult::restarts);

    m.def("loss", &loss);
    m.def("loss_gradient", &loss_gradient);
    m.def("train", &train, py::call_guard<py::gil_scoped_release>());
    m.def("split_set", &split_set);

    m.def("gradcheck", [](const std::vector<int>& sizes, std::uint64_t seed) {
        const GradCheckResult r = gradcheck(sizes, seed);
        return py::make_tuple(r.max_rel_backward, r.max_rel_loss);
    });

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_property_readonly("id", [](const ProblemSpec& s) { return to_string(s.id); })
        .def_readonly("variant", &ProblemSpec::variant)
        .def_readonly("dim", &ProblemSpec::dim)
        .def_readonly("lo", &ProblemSpec::lo)
        .def_readonly("hi", &ProblemSpec::hi)
        .def_property_readonly("bc", [](const ProblemSpec& s) { return s.bc; })
        .def("has_exact", &ProblemSpec::has_exact)
        .def("initial_at",
             [](const ProblemSpec& s, const std::vector<double>& x) { return s.initial(x); })
        .def("exact_at", [](const ProblemSpec& s, const std::vector<double>& x, double t) {
            if (!s.has_exact()) throw ConfigError("problem has no exact solution");
            return s.exact(x, t);
        });

    m.def("problem_variants",
          [](const std::string& id) { return variants_of(problem_id_from_string(id)); });
    m.def("catalog", [](const std::string& id, const std::string& variant) {
        return catalog(problem_id_from_string(id), variant);
    });
    m.def("grid_for", &grid_for);
    m.def("initial_averages", &initial_averages, py::arg("spec"), py::arg("grid"),
          py::arg("q") = 4);
    m.def("exact_averages", &exact_averages, py::arg("spec"), py::arg("grid"), py::arg("t"),
          py::arg("q") = 4);
    m.def("fd_reference", &fd_reference, py::call_guard<py::gil_scoped_release>());
    m.def("generate_target",
          [](const ProblemSpec& spec, const GridSpec& grid, double dt, const std::string& mode) {
              return generate_target(spec, grid, dt, mode_from(mode));
          },
          py::call_guard<py::gil_scoped_release>());
    m.def("flux_divergence",
          [](const ProblemSpec& spec, const PaddedField& padded, const std::vector<int>& cell) {
              return flux_divergence(spec, padded, cell);
          });

    py::class_<MarchPlan>(m, "MarchPlan")
        .def_readonly("dt", &MarchPlan::dt)
        .def_readonly("n_steps", &MarchPlan::n_steps);
    m.def("make_plan", &make_plan);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("l2", &ErrorReport::l2)
        .def_readonly("linf", &ErrorReport::linf)
        .def_readonly("T", &ErrorReport::T)
        .def_readonly("mesh_dx", &ErrorReport::mesh_dx)
        .def_readonly("dt", &ErrorReport::dt);

    m.def("step", &step);
    m.def("march",
          [](const MlpParams& params, const Field& start, const MarchPlan& plan) {
              MarchResult r = march(params, start, plan);
              return py::make_tuple(r.field, r.max_norms);
          });
    m.def("error_norms", &error_norms);
    m.def("convergence_order",
          [](const std::vector<double>& errors, const std::vector<double>& meshes) {
              return convergence_order(errors, meshes);
          });

    m.def("save_checkpoint", &save_checkpoint);
    m.def("load_checkpoint", [](const std::string& path) {
        auto [params, meta] = load_checkpoint(path);
        py::dict d;
        d["problem"] = meta.problem;
        d["variant"] = meta.variant;
        d["stencil"] = meta.stencil;
        d["seed"] = meta.seed;
        d["dt"] = meta.dt;
        d["final_loss"] = meta.final_loss;
        d["iterations"] = meta.iterations;
        return py::make_tuple(params, d);
    });

    m.def("parse_value", &parse_value);
    m.def("run_experiment_file",
          [](const std::string& config_path, const std::string& out_override) {
              ExperimentConfig cfg = load_config(config_path);
              RunRecord rec = run_and_write(cfg, out_override);
              return results_csv(rec);
          },
          py::arg("config_path"), py::arg("out_override") = "",
          py::call_guard<py::gil_scoped_release>());
}
