#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "liegeo/error.hpp"
#include "liegeo/io.hpp"
#include "liegeo/models.hpp"
#include "liegeo/reachability.hpp"

namespace py = pybind11;
using namespace liegeo;

namespace {

py::array_t<double> stack_g(const Trajectory& traj) {
  const auto m = static_cast<py::ssize_t>(traj.samples.size());
  const auto d = traj.samples.empty() ? 0 : static_cast<py::ssize_t>(traj.samples.front().g.rows());
  py::array_t<double> out({m, d, d});
  auto v = out.mutable_unchecked<3>();
  for (py::ssize_t k = 0; k < m; ++k) {
    const auto& g = traj.samples[static_cast<std::size_t>(k)].g;
    for (py::ssize_t i = 0; i < d; ++i) {
      for (py::ssize_t j = 0; j < d; ++j) v(k, i, j) = g(i, j);
    }
  }
  return out;
}

template <class Get>
py::array_t<double> stack_vectors(const Trajectory& traj, Get get) {
  const auto m = static_cast<py::ssize_t>(traj.samples.size());
  const auto n = traj.samples.empty() ? 0 : static_cast<py::ssize_t>(get(traj.samples.front()).size());
  py::array_t<double> out({m, n});
  auto v = out.mutable_unchecked<2>();
  for (py::ssize_t k = 0; k < m; ++k) {
    const auto& x = get(traj.samples[static_cast<std::size_t>(k)]);
    for (py::ssize_t i = 0; i < n; ++i) v(k, i) = x(i);
  }
  return out;
}

LieModel make_model(const std::string& name, int n, double a, double b, int rank) {
  ModelParams p;
  p.kind = model_kind_from_string(name);
  p.n = n;
  p.a = a;
  p.b = b;
  p.rank = rank;
  return build_model(p);
}

IntegratorConfig config(double horizon, double step, bool allow_speed) {
  IntegratorConfig cfg;
  cfg.horizon = horizon;
  cfg.step = step;
  cfg.allow_unnormalized = allow_speed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Normal geodesics and bang-bang steering on matrix Lie groups";

  static py::exception<Error> error(m, "LiegeoError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::ostringstream os;
      os << to_string(e.code()) << ": " << e.what();
      py::set_error(error, os.str().c_str());
    }
  });

  py::class_<LieModel>(m, "LieModel")
      .def_property_readonly("name", &LieModel::name)
      .def_property_readonly("dim", &LieModel::dim)
      .def_property_readonly("rank", &LieModel::rank)
      .def_property_readonly("rep_dim", &LieModel::rep_dim)
      .def_property_readonly("riemannian", &LieModel::riemannian)
      .def_property_readonly("params", &LieModel::params)
      .def_property_readonly("basis", [](const LieModel& mdl) { return mdl.rep().basis(); })
      .def_property_readonly("filtration",
                             [](const LieModel& mdl) { return mdl.filtration().ranks; })
      .def("embed", [](const LieModel& mdl, const AlgebraVector& v) { return mdl.rep().embed(v); })
      .def("decompose",
           [](const LieModel& mdl, const Eigen::MatrixXd& x) { return mdl.rep().decompose(x); })
      .def("bracket", [](const LieModel& mdl, const AlgebraVector& x, const AlgebraVector& y) {
        return bracket(x, y, mdl.structure());
      })
      .def("__repr__", [](const LieModel& mdl) {
        std::ostringstream os;
        os << "<LieModel " << mdl.name() << " n=" << mdl.dim() << " r=" << mdl.rank() << ">";
        return os.str();
      });

  m.def("builtin_models", &builtin_model_names);
  m.def("build_model", &make_model, py::arg("name"), py::arg("n") = 3, py::arg("a") = 1.0,
        py::arg("b") = 1.0, py::arg("rank") = 0);
  m.def("load_model", [](const std::string& path) { return to_model(read_model_description(path)); },
        py::arg("path"));
  m.def("validate_model_file", [](const std::string& path) {
    std::vector<std::string> out;
    for (const auto& v : validate(read_model_description(path).structure).violations) {
      out.push_back(v.describe());
    }
    return out;
  });
  m.def("angle_costate", &angle_costate, py::arg("angle"), py::arg("beta"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("model", &Trajectory::model)
      .def_property_readonly("method", [](const Trajectory& t) { return to_string(t.method); })
      .def_readonly("psi0", &Trajectory::psi0)
      .def_readonly("step", &Trajectory::step)
      .def_readonly("horizon", &Trajectory::horizon)
      .def_readonly("speed", &Trajectory::speed)
      .def_property_readonly("t", [](const Trajectory& tr) {
        std::vector<double> t;
        for (const auto& s : tr.samples) t.push_back(s.t);
        return py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
      })
      .def_property_readonly("g", &stack_g)
      .def_property_readonly(
          "psi", [](const Trajectory& tr) { return stack_vectors(tr, [](const auto& s) -> const auto& { return s.psi; }); })
      .def_property_readonly(
          "u", [](const Trajectory& tr) { return stack_vectors(tr, [](const auto& s) -> const auto& { return s.u; }); })
      .def_property_readonly("max_speed_deviation",
                             [](const Trajectory& tr) { return tr.diagnostics.max_speed_deviation; })
      .def_property_readonly("max_hamiltonian_deviation", [](const Trajectory& tr) {
        return tr.diagnostics.max_hamiltonian_deviation;
      })
      .def("__len__", [](const Trajectory& tr) { return tr.samples.size(); });

  m.def(
      "integrate_costate",
      [](const LieModel& mdl, const AlgebraVector& psi0, double horizon, double step, bool allow) {
        return integrate_costate(mdl, psi0, config(horizon, step, allow));
      },
      py::arg("model"), py::arg("psi0"), py::arg("T") = 10.0, py::arg("step") = 1e-3,
      py::arg("allow_speed") = false);
  m.def(
      "integrate_field",
      [](const LieModel& mdl, const AlgebraVector& psi0, std::optional<Eigen::MatrixXd> g0,
         double horizon, double step, bool allow) {
        const Eigen::MatrixXd start =
            g0 ? *g0 : Eigen::MatrixXd::Identity(mdl.rep_dim(), mdl.rep_dim());
        return integrate_field(mdl, psi0, start, config(horizon, step, allow));
      },
      py::arg("model"), py::arg("psi0"), py::arg("g0") = py::none(), py::arg("T") = 10.0,
      py::arg("step") = 1e-3, py::arg("allow_speed") = false);
  m.def("compare_methods", &compare_methods);

  m.def("exp_matrix", &exp_matrix);
  m.def("log_matrix", &log_matrix);
  m.def("coadjoint_pullback", [](const LieModel& mdl, const Eigen::MatrixXd& g,
                                 const AlgebraVector& psi) {
    return coadjoint_pullback(g, psi, mdl.rep());
  });

  m.def("heisenberg_closed_form", [](double xi, double beta, double t) {
    const auto c = heisenberg_closed_form(xi, beta, t);
    return std::vector<double>{c.x, c.y, c.z};
  });
  m.def("heisenberg_tilde", [](const Eigen::MatrixXd& g) {
    const auto c = heisenberg_tilde(g);
    return std::vector<double>{c.x, c.y, c.z};
  });
  m.def(
      "hyperbolic_distance",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        if (p.size() < 2 || q.size() < 2) throw Error(Errc::invalid_argument, "points need (y.., x)");
        return hyperbolic_distance({{p.begin(), p.end() - 1}, p.back()},
                                   {{q.begin(), q.end() - 1}, q.back()});
      },
      py::arg("p"), py::arg("q"), "Points are given as (y_1, ..., y_{n-1}, x).");

  m.def(
      "pendulum",
      [](const Trajectory& tr, double alpha, double beta, double a, double b) {
        PendulumReduction red;
        if (tr.model == "so3") {
          red = so3_pendulum_residual(tr, a, b);
        } else if (tr.model == "sh2") {
          red = sh2_reduction(tr, alpha, beta);
        } else if (tr.model == "se2") {
          red = se2_reduction(tr, alpha, beta);
        } else {
          throw Error(Errc::invalid_argument, "no pendulum reduction for " + tr.model);
        }
        py::dict out;
        std::vector<double> t, angle, rate;
        for (const auto& s : red.samples) {
          t.push_back(s.t);
          angle.push_back(s.angle);
          rate.push_back(s.rate);
        }
        out["t"] = t;
        out["angle"] = angle;
        out["rate"] = rate;
        out["max_residual"] = red.max_residual;
        out["initial_angle_error"] = red.initial_angle_error;
        out["initial_rate_error"] = red.initial_rate_error;
        out["energy_drift"] = red.energy_drift;
        out["max_consistency"] = red.max_consistency;
        return out;
      },
      py::arg("trajectory"), py::arg("alpha") = 0.0, py::arg("beta") = 0.0, py::arg("a") = 1.0,
      py::arg("b") = 1.0);

  m.def("phi", [](const LieModel& mdl, const AlgebraVector& s) { return phi(s, mdl); });
  m.def("phi_inverse_local",
        [](const LieModel& mdl, const Eigen::MatrixXd& g) { return phi_inverse_local(g, mdl); });
  m.def(
      "steer",
      [](const LieModel& mdl, const Eigen::MatrixXd& target, double tol) {
        SteerOptions opts;
        opts.tol = tol;
        const auto res = steer(target, mdl, opts);
        py::list segs;
        for (const auto& s : res.schedule.segments) {
          segs.append(py::make_tuple(s.duration, s.index, s.sign));
        }
        py::dict out;
        out["schedule"] = segs;
        out["error"] = res.error;
        out["converged"] = res.converged;
        out["total_duration"] = res.schedule.total_duration();
        out["message"] = res.message;
        return out;
      },
      py::arg("model"), py::arg("target"), py::arg("tol") = 1e-6);
  m.def(
      "simulate_schedule",
      [](const LieModel& mdl, const std::vector<std::tuple<double, int, int>>& segments,
         std::optional<Eigen::MatrixXd> g0) {
        ControlSchedule sched;
        for (const auto& [d, i, s] : segments) sched.segments.push_back({d, i, s});
        const Eigen::MatrixXd start =
            g0 ? *g0 : Eigen::MatrixXd::Identity(mdl.rep_dim(), mdl.rep_dim());
        return simulate_schedule(start, sched, mdl);
      },
      py::arg("model"), py::arg("schedule"), py::arg("g0") = py::none());
}
