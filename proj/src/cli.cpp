#include "scherk/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scherk/domain_io.hpp"
#include "scherk/flux.hpp"

namespace scherk {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

ordered_json experiment_to_json(const ExperimentReport& rep) {
  ordered_json out;
  out["id"] = rep.id;
  out["config"] = rep.config_echo;
  out["pass"] = rep.pass;
  out["rows"] = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json rj;
    rj["label"] = r.label;
    rj["value"] = r.value;
    rj["target"] = r.target;
    rj["bound"] = r.bound;
    rj["pass"] = r.pass;
    out["rows"].push_back(rj);
  }
  return out;
}

std::vector<HPoint> default_probes(const ScherkDomain& d) {
  // Median of the boundary polyline, pulled to the inside via containment
  // probing along a vertical sweep.
  std::vector<double> xs, ys;
  for (size_t ci = 0; ci < d.components.size(); ++ci)
    for (const auto& w : d.component_polyline(ci)) {
      if (std::hypot(w[0] - 1.0, w[1]) < 1e-6) continue;
      const HPoint p = disk_to_halfplane(w[0], w[1]);
      if (p.y <= 0) continue;
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double cx = xs[xs.size() / 2];
  std::vector<HPoint> probes;
  for (double f : {0.35, 0.5, 0.65}) {
    const double cy = ys[static_cast<size_t>(f * (ys.size() - 1))];
    HPoint p{cx, std::max(cy, 1e-6)};
    for (int k = 0; k < 64 && !d.contains(p); ++k)
      p.y *= 1.05;
    if (d.contains(p)) probes.push_back(p);
  }
  if (probes.empty()) probes.push_back({cx, ys[ys.size() / 2]});
  return probes;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Jenkins-Serrin solvability checks, minimal-graph solves and "
               "flux experiments on the hyperbolic plane"};
  app.require_subcommand(1);

  std::string input, out_dir = ".";
  uint64_t seed = 0;
  int threads = 1;
  app.add_option("--input", input, "domain file (JSON, schema 1)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for sampled verification suites");
  app.add_option("--threads", threads, "parallelism cap")
      ->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "structural diagnostics");
  auto* check_cmd = app.add_subcommand("check", "Jenkins-Serrin verdict");
  auto* solve_cmd = app.add_subcommand("solve", "one Dirichlet solve");
  auto* seq_cmd = app.add_subcommand("sequence",
                                     "truncation ladder and divergence lines");
  auto* flux_cmd = app.add_subcommand("flux", "flux table for configured arcs");
  auto* cmc_cmd = app.add_subcommand("cmc-profile",
                                     "translation-invariant cmc profile");
  double cmc_H = 0.0, cmc_param = 1.0;
  cmc_cmd->add_option("--H", cmc_H, "mean curvature (>= 0)")->required();
  cmc_cmd->add_option("--param", cmc_param, "A (H=0) or k (H>0)")->required();
  auto* exp_cmd = app.add_subcommand("experiment", "paper experiments");
  std::string exp_name;
  double exp_alpha = 3.0 * kPi / 8.0;
  std::vector<int> exp_depths;
  double exp_h = 0.0;
  exp_cmd->add_option("name", exp_name, "nonzero-flux | nonuniqueness")
      ->required();
  exp_cmd->add_option("--alpha", exp_alpha, "rectangle angle (nonuniqueness)");
  exp_cmd->add_option("--depth", exp_depths, "strip depths (nonuniqueness)");
  exp_cmd->add_option("--h", exp_h, "grid spacing override");

  std::vector<const char*> argv;
  argv.push_back("scherk");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Timer timer;
  std::vector<std::pair<std::string, double>> timings;
  Report report;
  report.input_hash = input.empty() ? fnv1a_hex("") : fnv1a_hex(slurp(input));

  try {
    if (cmc_cmd->parsed()) {
      report.subcommand = "cmc-profile";
      const CmcProfile prof(cmc_H, cmc_param);
      const auto& c = prof.classification();
      std::filesystem::create_directories(out_dir);
      write_profile_csv(prof,
                        (std::filesystem::path(out_dir) / "profile.csv")
                            .string());
      report.payload["case"] = cmc_case_name(c.tag);
      report.payload["domain"] = {c.endpoints.lo, c.endpoints.hi};
      if (c.theta1 != 0.0) report.payload["theta1"] = c.theta1;
      if (c.theta2 != 0.0) report.payload["theta2"] = c.theta2;
      std::cout << "case=" << cmc_case_name(c.tag);
      if (c.theta1 != 0.0)
        std::cout << " theta1=" << fmt_g17(c.theta1);
      std::cout << "\n";
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return 0;
    }

    if (exp_cmd->parsed()) {
      report.subcommand = "experiment";
      ExperimentReport rep;
      json cfg = json::object();
      if (!input.empty()) {
        const DomainFile f = parse_domain_file(input);
        if (f.raw.contains("experiments")) cfg = f.raw["experiments"];
      }
      if (exp_name == "nonzero-flux") {
        NonzeroFluxConfig c;
        if (cfg.contains("nonzero-flux")) {
          const auto& e = cfg["nonzero-flux"];
          c.k = e.value("k", c.k);
          c.deform = e.value("deform", c.deform);
          c.inner_radius = e.value("inner_radius", c.inner_radius);
          c.horocycle_size = e.value("horocycle_size", c.horocycle_size);
          c.loop_radius = e.value("loop_radius", c.loop_radius);
          c.h = e.value("h", c.h);
          if (e.contains("levels"))
            c.levels = e["levels"].get<std::vector<double>>();
        }
        if (exp_h > 0) c.h = exp_h;
        rep = experiment_nonzero_flux(c);
      } else if (exp_name == "nonuniqueness") {
        NonuniquenessConfig c;
        if (cfg.contains("nonuniqueness")) {
          const auto& e = cfg["nonuniqueness"];
          c.alpha = e.value("alpha", c.alpha);
          c.m0 = e.value("m0", c.m0);
          c.h = e.value("h", c.h);
          if (e.contains("depths"))
            c.depths = e["depths"].get<std::vector<int>>();
        }
        c.alpha = exp_alpha;
        if (!exp_depths.empty()) c.depths = exp_depths;
        if (exp_h > 0) c.h = exp_h;
        rep = experiment_nonuniqueness(c);
      } else {
        std::cerr << "unknown experiment " << exp_name << "\n";
        return 1;
      }
      report.payload = experiment_to_json(rep);
      for (const auto& r : rep.rows)
        std::cout << (r.pass ? "[ ok ] " : "[fail] ") << r.label << " value="
                  << fmt_g17(r.value) << "\n";
      std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.id << "\n";
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return rep.pass ? 0 : 2;
    }

    // The remaining subcommands need an input domain.
    if (input.empty()) {
      std::cerr << "--input is required\n";
      return 1;
    }
    const DomainFile file = parse_domain_file(input);
    const ScherkDomain& d = file.domain;

    if (validate_cmd->parsed()) {
      report.subcommand = "validate";
      const auto diags = validate_domain(d);
      report.payload["diagnostics"] = ordered_json::array();
      for (const auto& g : diags) {
        ordered_json dj;
        dj["code"] = g.code;
        dj["message"] = g.message;
        dj["violation"] = g.violation;
        report.payload["diagnostics"].push_back(dj);
        std::cout << (g.violation ? "[violation] " : "[info] ") << g.code
                  << ": " << g.message << "\n";
      }
      if (diags.empty()) std::cout << "no diagnostics\n";
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return 0;
    }

    if (check_cmd->parsed()) {
      report.subcommand = "check";
      const Verdict v = check_domain(d);
      report.payload = verdict_to_json(v);
      std::cout << "theorem " << v.theorem << ": "
                << verdict_status_name(v.status) << "\n";
      if (v.witness.has_value()) {
        std::cout << "witness polygon:";
        for (int vi : v.polygons[*v.witness].verts) std::cout << " " << vi;
        std::cout << "\n";
      }
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      if (v.status == VerdictStatus::Violated) return 2;
      if (v.status == VerdictStatus::Inconclusive) return 3;
      return 0;
    }

    if (solve_cmd->parsed()) {
      report.subcommand = "solve";
      DomainGridSpec gs;
      gs.chart = file.solver.chart;
      gs.h = file.solver.h;
      gs.truncation = file.solver.truncation;
      gs.cap_r0 = file.solver.cap_r0;
      gs.cap_step = file.solver.cap_step;
      gs.generation = file.solver.generations.back();
      if (file.solver.has_box) {
        gs.auto_box = false;
        gs.x0 = file.solver.box[0];
        gs.x1 = file.solver.box[1];
        gs.y0 = file.solver.box[2];
        gs.y1 = file.solver.box[3];
      }
      const ConformalGrid grid = build_grid(d, gs);
      SolverConfig sc;
      sc.max_iterations = file.solver.max_iterations;
      const DiscreteSolution sol = solve_dirichlet(grid, sc);
      std::filesystem::create_directories(out_dir);
      write_grid_csv(sol,
                     (std::filesystem::path(out_dir) / "grid.csv").string());
      report.payload["converged"] = sol.converged;
      report.payload["iterations"] = sol.iterations;
      report.payload["residual_max"] = sol.residual_max;
      report.payload["interior_nodes"] = grid.count(NodeKind::Interior);
      report.payload["thin_features"] = grid.thin_features;
      std::cout << (sol.converged ? "converged" : "NOT converged")
                << " iters=" << sol.iterations
                << " res=" << fmt_g17(sol.residual_max) << "\n";
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return sol.converged ? 0 : 3;
    }

    if (seq_cmd->parsed()) {
      report.subcommand = "sequence";
      SequenceSpec spec;
      spec.levels = file.solver.levels;
      spec.generations = file.solver.generations;
      spec.grid.chart = file.solver.chart;
      spec.grid.h = file.solver.h;
      spec.grid.cap_r0 = file.solver.cap_r0;
      spec.grid.cap_step = file.solver.cap_step;
      if (file.solver.has_box) {
        spec.grid.auto_box = false;
        spec.grid.x0 = file.solver.box[0];
        spec.grid.x1 = file.solver.box[1];
        spec.grid.y0 = file.solver.box[2];
        spec.grid.y1 = file.solver.box[3];
      }
      spec.probes = file.solver.probes.empty() ? default_probes(d)
                                               : file.solver.probes;
      const TruncationSequence seq = run_truncation_sequence(d, spec);
      report.payload["all_converged"] = seq.all_converged;
      report.payload["levels"] = ordered_json::array();
      for (const auto& lv : seq.levels) {
        ordered_json lj;
        lj["m"] = lv.m;
        lj["generation"] = lv.generation;
        lj["converged"] = lv.sol.converged;
        lj["probes"] = lv.probe_values;
        report.payload["levels"].push_back(lj);
      }
      const auto cands = detect_divergence_lines(seq, d);
      report.payload["divergence_lines"] = ordered_json::array();
      for (const auto& c : cands) {
        ordered_json cj;
        cj["vertical"] = c.line.vertical;
        cj["c"] = c.line.c;
        cj["r"] = c.line.r;
        cj["score"] = c.score;
        cj["width"] = c.width;
        cj["nodes"] = c.node_count;
        cj["snapped"] = {c.snapped1, c.snapped2};
        report.payload["divergence_lines"].push_back(cj);
      }
      std::cout << "levels=" << seq.levels.size() << " divergence-candidates="
                << cands.size() << "\n";
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return seq.all_converged ? 0 : 3;
    }

    if (flux_cmd->parsed()) {
      report.subcommand = "flux";
      if (!file.raw.contains("flux"))
        throw std::runtime_error("domain file has no \"flux\" block");
      const auto& fb = file.raw["flux"];
      const double H = fb.value("H", 0.0);
      const double param = fb.value("param", 1.0);
      ProfileGraph u{PolarChart::centered_at(IdealPoint::at(0.0)),
                     std::make_shared<CmcProfile>(H, param), 0.0};
      std::vector<FluxCsvRow> rows;
      report.payload["arcs"] = ordered_json::array();
      for (const auto& aj : fb["arcs"]) {
        const std::string type = aj.value("type", "segment");
        ParamArc arc;
        if (type == "segment") {
          arc = ParamArc::segment(
              {aj["from"][0].get<double>(), aj["from"][1].get<double>()},
              {aj["to"][0].get<double>(), aj["to"][1].get<double>()},
              aj.value("id", "segment"));
        } else if (type == "circle") {
          arc = ParamArc::circle(
              {aj["center"][0].get<double>(), aj["center"][1].get<double>()},
              aj["radius"].get<double>(), aj.value("a0", 0.0),
              aj.value("a1", 2.0 * kPi), aj.value("id", "circle"));
        } else {
          throw std::runtime_error("unknown arc type " + type);
        }
        const auto f = flux_exact(u, arc, NormalSide::Left);
        rows.push_back({arc.desc, f.value, f.arc_length, f.error});
        ordered_json aj2;
        aj2["arc"] = arc.desc;
        aj2["value"] = f.value;
        aj2["arc_length"] = f.arc_length;
        aj2["error"] = f.error;
        aj2["truncated"] = f.truncated;
        report.payload["arcs"].push_back(aj2);
      }
      std::filesystem::create_directories(out_dir);
      write_flux_csv(rows,
                     (std::filesystem::path(out_dir) / "flux.csv").string());
      timings.push_back({"total_s", timer.seconds()});
      write_report(report, out_dir);
      write_timings(timings, out_dir);
      return 0;
    }
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace scherk
