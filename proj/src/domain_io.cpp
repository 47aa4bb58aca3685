#include "scherk/domain_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scherk {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("domain file: " + where + ": " + what);
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

}  // namespace

DomainFile parse_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("domain file: " + std::string(e.what()));
  }
  return parse_domain_json(j);
}

DomainFile parse_domain_json(const json& j) {
  DomainFile out;
  out.raw = j;
  if (!j.contains("schema") || j["schema"].get<int>() != 1)
    fail("schema", "missing or unsupported schema (expected 1)");
  const std::string model = j.value("model", "half-plane");
  const bool disk = model == "disk";
  if (!disk && model != "half-plane") fail("model", "unknown model " + model);

  if (!j.contains("vertices") || !j["vertices"].is_array())
    fail("vertices", "missing array");
  for (const auto& vj : j["vertices"]) {
    const std::string id = vj.value("id", "");
    if (id.empty()) fail("vertices", "vertex without id");
    if (out.vertex_ids.count(id)) fail("vertices", "duplicate id " + id);
    BPoint p;
    if (vj.contains("ideal")) {
      if (disk) fail(id, "use \"angle\" for ideal vertices in the disk model");
      if (vj["ideal"].is_string()) {
        if (vj["ideal"].get<std::string>() != "inf")
          fail(id, "ideal must be a number or \"inf\"");
        p = IdealPoint::infinity();
      } else {
        p = IdealPoint::at(num(vj["ideal"], id));
      }
    } else if (vj.contains("angle")) {
      if (!disk) fail(id, "\"angle\" is only valid in the disk model");
      p = disk_boundary_to_halfplane(num(vj["angle"], id));
    } else if (vj.contains("x") && vj.contains("y")) {
      const double x = num(vj["x"], id), y = num(vj["y"], id);
      if (disk) {
        if (x * x + y * y >= 1.0) fail(id, "disk point outside the unit disk");
        p = BPoint(disk_to_halfplane(x, y));
      } else {
        if (!(y > 0.0)) fail(id, "half-plane point needs y > 0");
        p = BPoint(HPoint{x, y});
      }
    } else {
      fail(id, "vertex needs x/y, ideal, or angle");
    }
    out.vertex_ids[id] = static_cast<int>(out.domain.vertices.size());
    out.domain.vertices.push_back(p);
  }

  auto vertex_ref = [&](const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "vertex reference must be a string");
    const auto it = out.vertex_ids.find(v.get<std::string>());
    if (it == out.vertex_ids.end())
      fail(where, "dangling vertex reference " + v.get<std::string>());
    return it->second;
  };

  std::map<std::string, int> edge_ids;
  if (!j.contains("edges") || !j["edges"].is_array())
    fail("edges", "missing array");
  for (const auto& ej : j["edges"]) {
    Edge e;
    e.name = ej.value("id", "e" + std::to_string(out.domain.edges.size()));
    const std::string kind = ej.value("kind", "");
    if (kind == "A")
      e.kind = EdgeKind::A;
    else if (kind == "B")
      e.kind = EdgeKind::B;
    else if (kind == "C")
      e.kind = EdgeKind::C;
    else if (kind == "D")
      e.kind = EdgeKind::D;
    else
      fail(e.name, "kind must be A, B, C or D");
    e.v_from = vertex_ref(ej.at("from"), e.name);
    e.v_to = vertex_ref(ej.at("to"), e.name);

    if (ej.contains("data")) {
      for (const auto& s : ej["data"]) {
        if (!s.is_array() || s.size() != 2) fail(e.name, "data rows are [t,v]");
        e.data.samples.push_back({num(s[0], e.name), num(s[1], e.name)});
      }
      for (size_t i = 0; i + 1 < e.data.samples.size(); ++i)
        if (!(e.data.samples[i].first < e.data.samples[i + 1].first))
          fail(e.name, "data parameters must be strictly increasing");
    }
    if (e.kind == EdgeKind::C) {
      if (ej.contains("arc")) {
        for (const auto& s : ej["arc"]) {
          const double x = num(s[0], e.name), y = num(s[1], e.name);
          e.arc.push_back(disk ? disk_to_halfplane(x, y) : HPoint{x, y});
        }
        if (ej.contains("arc_params"))
          for (const auto& t : ej["arc_params"])
            e.arc_params.push_back(num(t, e.name));
      } else {
        // Default geometry: the geodesic chord between the endpoints.
        const auto pts = disk_arc_polyline(out.domain.vertices[e.v_from],
                                           out.domain.vertices[e.v_to], 64);
        for (const auto& w : pts)
          e.arc.push_back(disk_to_halfplane(w[0], w[1]));
      }
      if (e.arc_params.empty())
        for (size_t i = 0; i < e.arc.size(); ++i)
          e.arc_params.push_back(static_cast<double>(i));
      if (e.arc_params.size() != e.arc.size())
        fail(e.name, "arc_params length mismatch");
    }
    if (e.kind == EdgeKind::D && !disk) {
      // Canonical D parameters are disk angles.
      for (auto& s : e.data.samples)
        s.first = halfplane_abscissa_to_disk_angle(IdealPoint::at(s.first));
      std::sort(e.data.samples.begin(), e.data.samples.end());
    }
    edge_ids[e.name] = static_cast<int>(out.domain.edges.size());
    out.domain.edges.push_back(std::move(e));
  }

  if (j.contains("components")) {
    for (const auto& cj : j["components"]) {
      std::vector<int> comp;
      for (const auto& id : cj) {
        const auto it = edge_ids.find(id.get<std::string>());
        if (it == edge_ids.end())
          fail("components", "dangling edge reference " + id.get<std::string>());
        comp.push_back(it->second);
      }
      out.domain.components.push_back(comp);
    }
  } else {
    std::vector<int> comp(out.domain.edges.size());
    for (size_t i = 0; i < comp.size(); ++i) comp[i] = static_cast<int>(i);
    out.domain.components.push_back(comp);
  }

  if (j.contains("horocycles")) {
    for (const auto& [key, val] : j["horocycles"].items()) {
      const auto it = out.vertex_ids.find(key);
      if (it == out.vertex_ids.end())
        fail("horocycles", "dangling vertex reference " + key);
      double size = num(val, "horocycles." + key);
      if (disk) {
        // Disk diameter -> half-plane size via the horocycle's deepest point.
        const auto& vp = out.domain.vertices[it->second];
        const double angle =
            halfplane_abscissa_to_disk_angle(std::get<IdealPoint>(vp));
        const double rr = 1.0 - size;
        const HPoint deep =
            disk_to_halfplane(rr * std::cos(angle), rr * std::sin(angle));
        const auto& ip = std::get<IdealPoint>(vp);
        if (ip.infinite) {
          size = deep.y;
        } else {
          const double dx = deep.x - ip.x;
          size = (dx * dx + deep.y * deep.y) / deep.y;
        }
      }
      out.domain.horocycle_sizes[it->second] = size;
    }
  }

  try {
    out.domain.finalize();
  } catch (const std::invalid_argument& e) {
    fail("structure", e.what());
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    out.solver.h = s.value("h", out.solver.h);
    if (s.contains("levels"))
      out.solver.levels = s["levels"].get<std::vector<double>>();
    if (s.contains("generations"))
      out.solver.generations = s["generations"].get<std::vector<int>>();
    const std::string chart = s.value("chart", "half-plane");
    out.solver.chart =
        chart == "polar" ? ChartKind::Polar : ChartKind::HalfPlane;
    if (s.contains("box")) {
      const auto& b = s["box"];
      if (!b.is_array() || b.size() != 4) fail("solver.box", "expected 4 numbers");
      for (int i = 0; i < 4; ++i) out.solver.box[i] = num(b[i], "solver.box");
      out.solver.has_box = true;
    }
    out.solver.truncation = s.value("truncation", out.solver.truncation);
    out.solver.max_iterations =
        s.value("max_iterations", out.solver.max_iterations);
    out.solver.cap_r0 = s.value("cap_r0", out.solver.cap_r0);
    out.solver.cap_step = s.value("cap_step", out.solver.cap_step);
    if (s.contains("probes")) {
      for (const auto& p : s["probes"]) {
        const double x = num(p[0], "solver.probes");
        const double y = num(p[1], "solver.probes");
        out.solver.probes.push_back(disk ? disk_to_halfplane(x, y)
                                         : HPoint{x, y});
      }
    }
  }
  return out;
}

void write_report(const Report& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ordered_json root;
  root["tool"] = "scherk";
  root["version"] = "0.1.0";
  root["subcommand"] = r.subcommand;
  root["input_hash"] = r.input_hash;
  root["payload"] = r.payload;
  std::ofstream out(std::filesystem::path(out_dir) / "report.json",
                    std::ios::binary);
  out << root.dump(2) << "\n";
}

void write_timings(const std::vector<std::pair<std::string, double>>& timings,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "timings.json",
                    std::ios::binary);
  ordered_json root;
  for (const auto& [k, v] : timings) root[k] = v;
  out << root.dump(2) << "\n";
}

void write_grid_csv(const DiscreteSolution& sol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  const auto& g = sol.grid;
  out << (g.chart == ChartKind::HalfPlane ? "x,y,u,w\n" : "phi,theta,u,w\n");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int id = g.idx(i, j);
      if (g.kind[id] == NodeKind::Exterior) continue;
      out << fmt_g17(g.cx(i)) << ',' << fmt_g17(g.cy(j)) << ','
          << fmt_g17(sol.u[id]) << ',' << fmt_g17(sol.w[id]) << '\n';
    }
}

void write_profile_csv(const CmcProfile& prof, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  const auto& c = prof.classification();
  out << "# case=" << cmc_case_name(c.tag) << '\n';
  out << "# H=" << fmt_g17(prof.H()) << " param=" << fmt_g17(prof.param())
      << '\n';
  out << "# domain=[" << fmt_g17(c.endpoints.lo) << ','
      << fmt_g17(c.endpoints.hi) << "]\n";
  if (c.theta1 != 0.0) out << "# theta1=" << fmt_g17(c.theta1) << '\n';
  if (c.theta2 != 0.0) out << "# theta2=" << fmt_g17(c.theta2) << '\n';
  out << "theta,f,fprime\n";
  for (const auto& row : prof.table())
    out << fmt_g17(row.theta) << ',' << fmt_g17(row.f) << ','
        << fmt_g17(row.fprime) << '\n';
}

void write_flux_csv(const std::vector<FluxCsvRow>& rows,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << "arc,value,arc_length,error\n";
  for (const auto& r : rows)
    out << r.arc << ',' << fmt_g17(r.value) << ',' << fmt_g17(r.arc_length)
        << ',' << fmt_g17(r.error) << '\n';
}

ordered_json verdict_to_json(const Verdict& v) {
  ordered_json out;
  out["status"] = verdict_status_name(v.status);
  out["theorem"] = v.theorem;
  out["min_margin"] = std::isfinite(v.min_margin) ? v.min_margin : 1e308;
  out["equality_defect"] = v.equality_defect;
  out["detail"] = v.detail;
  if (v.witness.has_value()) {
    out["witness"] = ordered_json::array();
    for (int vi : v.polygons[*v.witness].verts) out["witness"].push_back(vi);
  }
  out["polygons"] = ordered_json::array();
  for (const auto& p : v.polygons) {
    ordered_json pj;
    pj["verts"] = p.verts;
    pj["is_domain"] = p.is_domain;
    out["polygons"].push_back(pj);
  }
  out["rows"] = ordered_json::array();
  for (const auto& r : v.rows) {
    ordered_json rj;
    rj["polygon"] = r.polygon;
    rj["generation"] = r.generation;
    rj["alpha"] = r.alpha;
    rj["beta"] = r.beta;
    rj["gamma"] = r.gamma;
    rj["eps"] = r.eps;
    rj["degenerate"] = r.degenerate;
    out["rows"].push_back(rj);
  }
  return out;
}

}  // namespace scherk
