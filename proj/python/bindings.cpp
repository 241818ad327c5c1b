// JSON documents cross the boundary as strings; the Python package wraps
// them with json.loads / json.dumps.

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lipselect/bartle_graves.hpp"
#include "lipselect/cli.hpp"
#include "lipselect/errors.hpp"
#include "lipselect/io.hpp"

namespace py = pybind11;
using namespace lipselect;
using io::json;

namespace {

json parse(const std::string& text) { return json::parse(text); }

std::string hierarchy(const std::string& space, int rounds) {
  return io::dump(io::to_json(build_separation_hierarchy(io::space_from_json(parse(space)), rounds)));
}

PointSet separation(const std::string& space, double r) {
  return greedy_maximal_separation(io::space_from_json(parse(space)), r, {});
}

Eigen::VectorXd project_onto(const std::string& body, const Eigen::VectorXd& y) {
  return project(io::body_from_json(parse(body)), y);
}

std::string run_select(const std::string& correspondence, const Eigen::MatrixXd& f0, double alpha,
                   double beta, int rounds, std::optional<double> epsilon) {
  const auto phi = io::correspondence_from_json(parse(correspondence));
  IterationConfig config;
  config.alpha = alpha;
  config.beta = beta;
  config.rounds = rounds;
  config.epsilon = epsilon;
  const auto seq = run_iteration(phi, Selection{f0, 0}, config);
  json out = io::to_json(seq);
  json rounds_json = json::array();
  bool ok = true;
  for (int n = 1; n <= seq.round_count(); ++n) {
    const auto r = verify_round_properties(seq, phi, n);
    ok = ok && r.all_ok();
    rounds_json.push_back({{"n", n}, {"membership", r.membership_ok}, {"sup", r.sup_ok},
                           {"strong", r.strong_ok}, {"coincidence", r.coincidence_ok}});
  }
  const auto audit = audit_limit_selection(seq, phi.space());
  out["verification"] = {{"rounds", rounds_json},
                         {"unresolved", audit.unresolved()},
                         {"audit_ok", audit.all_ok()},
                         {"ok", ok && audit.all_ok()}};
  return io::dump(out);
}

py::dict plip(const std::string& space, const Eigen::MatrixXd& values, PointId b,
              std::vector<double> radii, int k) {
  const auto s = io::space_from_json(parse(space));
  if (radii.empty()) radii = default_radii(s);
  PlipOptions options;
  options.k = k;
  const auto profile = plip_profile(values, s, b, radii, options);
  py::list rows;
  for (const auto& r : profile.rows) {
    rows.append(py::dict(py::arg("r") = r.r, py::arg("ratio") = r.ratio,
                         py::arg("informative") = r.informative));
  }
  return py::dict(py::arg("point") = profile.point, py::arg("estimate") = profile.estimate,
                  py::arg("rows") = rows);
}

py::tuple run_cli(const std::string& command, const py::dict& options) {
  cli::RunConfig rc;
  rc.command = command;
  auto path = [&](const char* key, std::optional<std::filesystem::path>& field) {
    if (options.contains(key)) field = options[key].cast<std::string>();
  };
  auto number = [&](const char* key, std::optional<double>& field) {
    if (options.contains(key)) field = options[key].cast<double>();
  };
  auto integer = [&](const char* key, std::optional<int>& field) {
    if (options.contains(key)) field = options[key].cast<int>();
  };
  path("config", rc.config);
  path("space", rc.space);
  path("correspondence", rc.correspondence);
  path("matrix", rc.matrix);
  path("sequence", rc.sequence);
  path("values", rc.values);
  path("f0", rc.f0);
  path("out", rc.out);
  number("alpha", rc.alpha);
  number("beta", rc.beta);
  number("epsilon", rc.epsilon);
  number("r", rc.r);
  number("tol", rc.tol);
  number("delta_min", rc.delta_min);
  integer("rounds", rc.rounds);
  integer("sphere_count", rc.sphere_count);
  integer("k", rc.k);
  if (options.contains("seed")) rc.seed = options["seed"].cast<std::uint64_t>();
  if (options.contains("radii")) rc.radii = options["radii"].cast<std::vector<double>>();
  if (options.contains("points")) rc.points = options["points"].cast<std::vector<PointId>>();

  std::ostringstream report, log;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(rc, report, log);
  }
  return py::make_tuple(code, report.str(), log.str());
}

}  // namespace

PYBIND11_MODULE(_lipselect, m) {
  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParameterError& e) {
      py::set_error(error, ("[parameter " + e.parameter() + "] " + e.what()).c_str());
    } catch (const Error& e) {
      py::set_error(error, (std::string("[") + to_string(e.kind()) + "] " + e.what()).c_str());
    }
  });

  m.def("separation_hierarchy", &hierarchy, py::arg("space"), py::arg("rounds"));
  m.def("greedy_separation", &separation, py::arg("space"), py::arg("r"));
  m.def("project", &project_onto, py::arg("body"), py::arg("y"));
  m.def("select", &run_select, py::arg("correspondence"), py::arg("f0"), py::arg("alpha"),
        py::arg("beta"), py::arg("rounds") = 4, py::arg("epsilon") = py::none());
  m.def("plip", &plip, py::arg("space"), py::arg("values"), py::arg("point"),
        py::arg("radii") = std::vector<double>{}, py::arg("k") = 3);
  m.def("cantor_function", &cantor_function, py::arg("x"), py::arg("depth"));
  m.def("openness_constant", [](const Eigen::MatrixXd& t) { return openness_constant(LinearSurjection(t)); },
        py::arg("matrix"));
  m.def("run_cli", &run_cli, py::arg("command"), py::arg("options"));

  py::class_<RightInverse>(m, "RightInverse")
      .def(py::init([](const Eigen::MatrixXd& t, double beta, int sphere_count, std::uint64_t seed,
                       int rounds) {
             IterationConfig iteration;
             iteration.rounds = rounds;
             return build_right_inverse(LinearSurjection(t), beta, {sphere_count, seed}, iteration);
           }),
           py::arg("matrix"), py::arg("beta"), py::arg("sphere_count") = 64, py::arg("seed") = 0,
           py::arg("rounds") = 4)
      .def("__call__", [](const RightInverse& ri, const Eigen::VectorXd& y) {
        return evaluate_right_inverse(ri, y);
      })
      .def_readonly("gamma", &RightInverse::gamma)
      .def_readonly("alpha", &RightInverse::alpha)
      .def_readonly("beta", &RightInverse::beta)
      .def_readonly("eta", &RightInverse::eta)
      .def_readonly("tail_bound", &RightInverse::tail_bound)
      .def_readonly("dense_set", &RightInverse::dense_set)
      .def_property_readonly("directions",
                             [](const RightInverse& ri) { return ri.sphere.directions().coords(); })
      .def_property_readonly("values", [](const RightInverse& ri) { return ri.sphere.values(); })
      .def("verify", [](const RightInverse& ri) {
        const auto rep = verify_right_inverse(ri);
        return py::dict(py::arg("ok") = rep.all_ok(), py::arg("identity") = rep.identity_ok,
                        py::arg("identity_residual") = rep.identity_residual,
                        py::arg("off_sample") = rep.off_sample_ok,
                        py::arg("homogeneity") = rep.homogeneity_ok,
                        py::arg("plip") = rep.plip_ok,
                        py::arg("unresolved") = rep.sphere_audit.unresolved(),
                        py::arg("covering") = rep.covering_ok,
                        py::arg("covering_radius") = rep.covering_radius);
      });
}
