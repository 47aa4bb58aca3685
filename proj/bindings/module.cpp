#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scherk/cli.hpp"
#include "scherk/domain_io.hpp"
#include "scherk/flux.hpp"

namespace py = pybind11;
using namespace scherk;

namespace {

BPoint point_from_obj(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) {
    if (obj.cast<std::string>() == "inf") return IdealPoint::infinity();
    throw std::invalid_argument("point string must be 'inf'");
  }
  const auto t = obj.cast<std::pair<double, double>>();
  if (t.second == 0.0) return IdealPoint::at(t.first);
  return HPoint{t.first, t.second};
}

}  // namespace

PYBIND11_MODULE(pyscherk, m) {
  m.doc() = "Hyperbolic-plane minimal graph toolkit: geometry, cmc profiles, "
            "Jenkins-Serrin checks, Dirichlet solves and flux experiments";

  m.def("hyperbolic_distance",
        [](std::pair<double, double> p, std::pair<double, double> q) {
          return hyperbolic_distance({p.first, p.second},
                                     {q.first, q.second});
        },
        py::arg("p"), py::arg("q"));

  m.def("equidistant_distance", &equidistant_distance, py::arg("theta0"));

  m.def("geodesic_between",
        [](const py::object& p, const py::object& q) {
          const Geodesic g = geodesic_between(point_from_obj(p),
                                              point_from_obj(q));
          py::dict out;
          out["vertical"] = g.vertical;
          out["c"] = g.c;
          out["r"] = g.r;
          return out;
        },
        py::arg("p"), py::arg("q"));

  m.def("barrier_value",
        [](double theta0, std::pair<double, double> p, double offset) {
          BarrierParams b;
          b.theta0 = theta0;
          b.offset = offset;
          return barrier_value(b, {p.first, p.second});
        },
        py::arg("theta0"), py::arg("p"), py::arg("offset") = 0.0);

  m.def("cmc_classify", [](double H, double param) {
    const auto c = cmc_classify(H, param);
    py::dict out;
    out["case"] = cmc_case_name(c.tag);
    out["lo"] = c.endpoints.lo;
    out["hi"] = c.endpoints.hi;
    out["theta0"] = c.theta0;
    out["theta1"] = c.theta1;
    out["theta2"] = c.theta2;
    return out;
  });

  py::class_<CmcProfile, std::shared_ptr<CmcProfile>>(m, "CmcProfile")
      .def(py::init<double, double>(), py::arg("H"), py::arg("param"))
      .def(py::init<double, double, double, double>(), py::arg("H"),
           py::arg("param"), py::arg("anchor_theta"), py::arg("anchor_value"))
      .def("value", &CmcProfile::value)
      .def("derivative", &CmcProfile::derivative)
      .def("flux_quantity", &CmcProfile::flux_quantity)
      .def_property_readonly("case_name", [](const CmcProfile& p) {
        return cmc_case_name(p.classification().tag);
      })
      .def_property_readonly("domain", [](const CmcProfile& p) {
        const auto& e = p.classification().endpoints;
        return std::make_pair(e.lo, e.hi);
      });

  m.def("parse_domain", [](const std::string& path) {
    return parse_domain_file(path).domain;
  });
  m.def("parse_domain_text", [](const std::string& text) {
    return parse_domain_json(json::parse(text)).domain;
  });

  py::class_<ScherkDomain>(m, "ScherkDomain")
      .def_property_readonly("vertex_count",
                             [](const ScherkDomain& d) {
                               return d.vertices.size();
                             })
      .def_property_readonly("edge_count", [](const ScherkDomain& d) {
        return d.edges.size();
      })
      .def("contains", [](const ScherkDomain& d, double x, double y) {
        return d.contains({x, y});
      });

  m.def("validate", [](const ScherkDomain& d) {
    std::vector<std::string> out;
    for (const auto& g : validate_domain(d))
      out.push_back((g.violation ? "[violation] " : "[info] ") + g.code +
                    ": " + g.message);
    return out;
  });

  m.def("check", [](const ScherkDomain& d) {
    const Verdict v = check_domain(d);
    py::dict out;
    out["status"] = verdict_status_name(v.status);
    out["theorem"] = v.theorem;
    out["min_margin"] = v.min_margin;
    out["equality_defect"] = v.equality_defect;
    if (v.witness.has_value())
      out["witness"] = v.polygons[*v.witness].verts;
    out["polygon_count"] = v.polygons.size();
    return out;
  });

  m.def("enumerate_polygons", [](const ScherkDomain& d) {
    std::vector<std::vector<int>> out;
    for (const auto& p : enumerate_inscribed_polygons(d))
      out.push_back(p.verts);
    return out;
  });

  m.def(
      "solve_rectangle",
      [](double x0, double x1, double y0, double y1, double h,
         const std::function<double(double, double)>& f) {
        const ConformalGrid g =
            build_rect_grid(ChartKind::HalfPlane, x0, x1, y0, y1, h, f);
        const DiscreteSolution sol = solve_dirichlet(g);
        py::dict out;
        out["converged"] = sol.converged;
        out["iterations"] = sol.iterations;
        out["residual_max"] = sol.residual_max;
        out["nx"] = sol.grid.nx;
        out["ny"] = sol.grid.ny;
        out["u"] = sol.u;
        return out;
      },
      py::arg("x0"), py::arg("x1"), py::arg("y0"), py::arg("y1"),
      py::arg("h"), py::arg("boundary"),
      "Dirichlet solve of the minimal surface equation on a half-plane "
      "chart rectangle");

  m.def("run_cli", &run_cli, py::arg("args"),
        "Run the command-line driver in-process; returns the exit status");
}
