#include "scherk/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace scherk {

namespace {

double chart_lambda(ChartKind chart, double cy) {
  if (chart == ChartKind::HalfPlane) {
    if (!(cy > 0.0)) throw std::domain_error("grid touches the ideal boundary");
    return 1.0 / cy;
  }
  const double s = std::sin(cy);
  if (!(s > 0.0)) throw std::domain_error("grid touches the ideal boundary");
  return 1.0 / s;
}

// Gradient data of one face together with its Jacobian stencil.
struct Face {
  double d = 0.0, t = 0.0, lam = 1.0, w = 1.0;
  double flux = 0.0, dflux_dd = 0.0, dflux_dt = 0.0;
  int tnode[4];
  double tweight[4];
  int tcount = 0;
};

// Face between active nodes a and b (b = a + step along one axis).
// horizontal: b east of a; vertical: b north of a.
Face eval_face(const ConformalGrid& g, const std::vector<double>& u, int ia,
               int ja, bool horizontal) {
  Face f;
  const int ib = horizontal ? ia + 1 : ia;
  const int jb = horizontal ? ja : ja + 1;
  const int a = g.idx(ia, ja), b = g.idx(ib, jb);
  f.d = (u[b] - u[a]) / g.h;
  f.lam = std::sqrt(g.lambda[a] * g.lambda[b]);

  // Transverse derivative: average of the central differences available on
  // the two node columns (rows) of the face.
  f.tcount = 0;
  double tsum = 0.0;
  int nterms = 0;
  auto add_column = [&](int ci, int cj) {
    int ip, jp, im, jm;
    if (horizontal) {
      ip = ci; jp = cj + 1; im = ci; jm = cj - 1;
    } else {
      ip = ci + 1; jp = cj; im = ci - 1; jm = cj;
    }
    if (ip < 0 || im < 0 || jp < 0 || jm < 0 || ip >= g.nx || im >= g.nx ||
        jp >= g.ny || jm >= g.ny)
      return;
    if (!g.active(ip, jp) || !g.active(im, jm)) return;
    tsum += (u[g.idx(ip, jp)] - u[g.idx(im, jm)]) / (2.0 * g.h);
    f.tnode[f.tcount] = g.idx(ip, jp);
    f.tweight[f.tcount] = 1.0;
    ++f.tcount;
    f.tnode[f.tcount] = g.idx(im, jm);
    f.tweight[f.tcount] = -1.0;
    ++f.tcount;
    ++nterms;
  };
  add_column(ia, ja);
  add_column(ib, jb);
  if (nterms > 0) {
    f.t = tsum / nterms;
    for (int k = 0; k < f.tcount; ++k)
      f.tweight[k] /= 2.0 * g.h * nterms;
  }

  const double inv2 = 1.0 / (f.lam * f.lam);
  f.w = std::sqrt(1.0 + (f.d * f.d + f.t * f.t) * inv2);
  f.flux = f.d / f.w;
  const double w3 = f.w * f.w * f.w;
  f.dflux_dd = (1.0 + f.t * f.t * inv2) / w3;
  f.dflux_dt = -(f.d * f.t * inv2) / w3;
  return f;
}

}  // namespace

int ConformalGrid::count(NodeKind k) const {
  int n = 0;
  for (auto c : kind)
    if (c == k) ++n;
  return n;
}

HPoint ConformalGrid::to_halfplane(double cx, double cy) const {
  if (chart == ChartKind::HalfPlane) return {cx, cy};
  return polar_chart.polar_to_halfplane(cx, cy);
}

double ConformalGrid::lambda_at(double cx, double cy) const {
  return chart_lambda(chart, cy);
}

ConformalGrid build_rect_grid(ChartKind chart, double x0, double x1, double y0,
                              double y1, double h,
                              const std::function<double(double, double)>& f,
                              const PolarChart& pc) {
  ConformalGrid g;
  g.chart = chart;
  g.polar_chart = pc;
  g.x0 = x0;
  g.y0 = y0;
  g.h = h;
  g.nx = static_cast<int>(std::lround((x1 - x0) / h)) + 1;
  g.ny = static_cast<int>(std::lround((y1 - y0) / h)) + 1;
  if (g.nx < 3 || g.ny < 3)
    throw std::invalid_argument("build_rect_grid: empty interior");
  const int n = g.nx * g.ny;
  g.kind.assign(n, NodeKind::Interior);
  g.boundary.assign(n, 0.0);
  g.lambda.assign(n, 1.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int id = g.idx(i, j);
      g.lambda[id] = chart_lambda(chart, g.cy(j));
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) {
        g.kind[id] = NodeKind::Dirichlet;
        g.boundary[id] = f(g.cx(i), g.cy(j));
      }
    }
  }
  return g;
}

ConformalGrid build_grid(const ScherkDomain& d, const DomainGridSpec& spec) {
  ConformalGrid g;
  g.chart = spec.chart;
  g.polar_chart = spec.polar_chart;
  g.h = spec.h;
  const double standoff = spec.standoff < 0 ? spec.h : spec.standoff;

  // Chart coordinates of a half-plane point (nan marks unmapped points).
  auto to_chart = [&](const HPoint& p) -> std::array<double, 2> {
    if (spec.chart == ChartKind::HalfPlane) return {p.x, p.y};
    const auto [phi, theta] = spec.polar_chart.polar_from_halfplane(p);
    return {phi, theta};
  };

  double bx0 = spec.x0, bx1 = spec.x1, by0 = spec.y0, by1 = spec.y1;
  if (spec.auto_box) {
    bx0 = by0 = std::numeric_limits<double>::infinity();
    bx1 = by1 = -std::numeric_limits<double>::infinity();
    for (size_t ci = 0; ci < d.components.size(); ++ci) {
      for (const auto& w : d.component_polyline(ci)) {
        if (std::hypot(w[0] - 1.0, w[1]) < 1e-6) continue;  // near infinity
        const HPoint p = disk_to_halfplane(w[0], w[1]);
        if (!(p.y >= 0.0)) continue;
        const auto c = to_chart({p.x, std::max(p.y, 1e-12)});
        bx0 = std::min(bx0, c[0]);
        bx1 = std::max(bx1, c[0]);
        by0 = std::min(by0, c[1]);
        by1 = std::max(by1, c[1]);
      }
    }
    bx0 -= 2 * spec.h;
    bx1 += 2 * spec.h;
    by1 += 2 * spec.h;
    by0 -= 2 * spec.h;
  }
  if (spec.chart == ChartKind::HalfPlane) {
    by0 = std::max(by0, standoff);
  } else {
    by0 = std::max(by0, standoff);
    by1 = std::min(by1, kPi - standoff);
  }
  g.x0 = bx0;
  g.y0 = by0;
  g.nx = static_cast<int>(std::floor((bx1 - bx0) / spec.h)) + 1;
  g.ny = static_cast<int>(std::floor((by1 - by0) / spec.h)) + 1;
  if (g.nx < 3 || g.ny < 3) throw std::domain_error("build_grid: empty box");

  // Geodesic caps at the ideal vertices (disk-model data).
  struct Cap {
    double px, py, radius;  // circle |w - (px,py)| < radius cuts the vertex
  };
  std::vector<Cap> caps;
  if (spec.generation > 0) {
    for (const auto& [v, size] : d.horocycle_sizes) {
      (void)size;
      const double psi = halfplane_abscissa_to_disk_angle(
          std::get<IdealPoint>(d.vertices[v]));
      const double r = spec.cap_r0 + spec.cap_step * spec.generation;
      const double rho = std::tanh(0.5 * r);
      const double radius = (1.0 - rho * rho) / (2.0 * rho);
      const double cd = (1.0 + rho * rho) / (2.0 * rho);
      caps.push_back({cd * std::cos(psi), cd * std::sin(psi), radius});
    }
  }

  const int n = g.nx * g.ny;
  g.kind.assign(n, NodeKind::Exterior);
  g.boundary.assign(n, 0.0);
  g.lambda.assign(n, 1.0);

  enum Reason : uint8_t { RNone, REdge, RIdeal, RCap };
  std::vector<uint8_t> candidate(n, 0);
  std::vector<uint8_t> reason(n, RNone);

  auto classify = [&](int i, int j) -> std::pair<bool, Reason> {
    const double cx = g.cx(i), cy = g.cy(j);
    if (spec.chart == ChartKind::HalfPlane) {
      if (cy < standoff - 1e-12) return {false, RIdeal};
    } else {
      if (cy < standoff - 1e-12 || cy > kPi - standoff + 1e-12)
        return {false, RIdeal};
    }
    const HPoint p = g.to_halfplane(cx, cy);
    const auto w = halfplane_to_disk(p);
    for (const auto& c : caps) {
      if (std::hypot(w[0] - c.px, w[1] - c.py) < c.radius)
        return {false, RCap};
    }
    if (!d.disk_contains(w[0], w[1])) return {false, REdge};
    return {true, RNone};
  };

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      auto [ok, why] = classify(i, j);
      candidate[g.idx(i, j)] = ok ? 1 : 0;
      reason[g.idx(i, j)] = static_cast<uint8_t>(why);
      g.lambda[g.idx(i, j)] = chart_lambda(spec.chart, g.cy(j));
    }

  // Boundary feature samples in chart coordinates, for Dirichlet values.
  struct Feature {
    double cx, cy;
    EdgeKind kind;
    double value;  // unclamped data value (C); A/B use +-m
  };
  std::vector<Feature> features;
  const double m = spec.truncation;
  auto clampm = [&](double v) {
    return m > 0.0 ? std::clamp(v, -m, m) : v;
  };
  for (size_t ei = 0; ei < d.edges.size(); ++ei) {
    const Edge& e = d.edges[ei];
    if (e.kind == EdgeKind::D) continue;
    if (e.kind == EdgeKind::C) {
      for (size_t s = 0; s < e.arc.size(); ++s) {
        try {
          const auto c = to_chart(e.arc[s]);
          features.push_back({c[0], c[1], EdgeKind::C,
                              e.data.eval(e.arc_params.empty()
                                              ? static_cast<double>(s)
                                              : e.arc_params[s])});
        } catch (const std::domain_error&) {
        }
      }
    } else {
      const auto pts = disk_arc_polyline(d.vertices[e.v_from],
                                         d.vertices[e.v_to], 256);
      for (const auto& w : pts) {
        if (std::hypot(w[0] - 1.0, w[1]) < 1e-9) continue;
        const HPoint p = disk_to_halfplane(w[0], w[1]);
        if (!(p.y > 1e-12)) continue;
        try {
          const auto c = to_chart(p);
          features.push_back({c[0], c[1], e.kind, 0.0});
        } catch (const std::domain_error&) {
        }
      }
    }
  }

  auto d_value_at = [&](int i, int j, bool low_side) -> std::pair<bool, double> {
    // Ideal-boundary data: locate the D edge covering the node's projection.
    const HPoint p = g.to_halfplane(g.cx(i), g.cy(j));
    double angle;
    if (spec.chart == ChartKind::HalfPlane) {
      angle = halfplane_abscissa_to_disk_angle(IdealPoint::at(p.x));
    } else {
      // Projection to theta = 0 or pi along the chart line.
      const double phi = g.cx(i);
      const HPoint q = g.polar_chart.polar_to_halfplane(
          phi, low_side ? 1e-9 : kPi - 1e-9);
      angle = halfplane_abscissa_to_disk_angle(IdealPoint::at(q.x));
    }
    for (const Edge& e : d.edges) {
      if (e.kind != EdgeKind::D) continue;
      const double a0 = halfplane_abscissa_to_disk_angle(
          std::get<IdealPoint>(d.vertices[e.v_from]));
      double a1 = halfplane_abscissa_to_disk_angle(
          std::get<IdealPoint>(d.vertices[e.v_to]));
      double aa = angle;
      while (a1 <= a0) a1 += 2.0 * kPi;
      while (aa < a0) aa += 2.0 * kPi;
      if (aa <= a1) return {true, clampm(e.data.eval(aa))};
    }
    return {false, 0.0};
  };

  int interior_count = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int id = g.idx(i, j);
      if (!candidate[id]) continue;
      Reason cause = RNone;
      bool low_side = j == 0;
      auto consider = [&](int ii, int jj, Reason fallback) {
        Reason why;
        if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny)
          why = fallback;
        else if (candidate[g.idx(ii, jj)])
          return;
        else
          why = static_cast<Reason>(reason[g.idx(ii, jj)]);
        // Priority: caps beat edges beat the ideal floor.
        if (why == RCap || cause == RNone ||
            (why == REdge && cause == RIdeal))
          cause = why;
        if (why == RIdeal) low_side = jj < j;
      };
      consider(i + 1, j, REdge);
      consider(i - 1, j, REdge);
      consider(i, j + 1, spec.chart == ChartKind::Polar ? RIdeal : REdge);
      consider(i, j - 1, RIdeal);
      if (cause == RNone) {
        g.kind[id] = NodeKind::Interior;
        ++interior_count;
        continue;
      }
      g.kind[id] = NodeKind::Dirichlet;
      double value = 0.0;
      if (cause == RCap) {
        value = 0.0;
      } else if (cause == RIdeal) {
        auto [found, v] = d_value_at(i, j, low_side);
        if (found) {
          value = v;
        } else {
          cause = REdge;
        }
      }
      if (cause == REdge) {
        double best = std::numeric_limits<double>::infinity();
        const Feature* hit = nullptr;
        for (const auto& f : features) {
          const double dist = std::hypot(f.cx - g.cx(i), f.cy - g.cy(j));
          if (dist < best) {
            best = dist;
            hit = &f;
          }
        }
        if (hit == nullptr)
          throw std::domain_error("build_grid: no boundary feature found");
        value = hit->kind == EdgeKind::A   ? m
                : hit->kind == EdgeKind::B ? -m
                                           : clampm(hit->value);
      }
      g.boundary[id] = value;
    }
  }
  if (interior_count == 0) throw std::domain_error("build_grid: empty interior");

  // Thin-feature report: interior runs narrower than 3 cells.
  g.thin_features = 0;
  for (int j = 0; j < g.ny; ++j) {
    int run = 0;
    for (int i = 0; i <= g.nx; ++i) {
      if (i < g.nx && g.interior(i, j)) {
        ++run;
      } else {
        if (run > 0 && run < 3) ++g.thin_features;
        run = 0;
      }
    }
  }
  return g;
}

std::vector<double> residual_field(const ConformalGrid& g,
                                   const std::vector<double>& u) {
  std::vector<double> r(u.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) continue;
      const Face fe = eval_face(g, u, i, j, true);
      const Face fw = eval_face(g, u, i - 1, j, true);
      const Face fn = eval_face(g, u, i, j, false);
      const Face fs = eval_face(g, u, i, j - 1, false);
      r[g.idx(i, j)] = (fe.flux - fw.flux + fn.flux - fs.flux) / g.h;
    }
  }
  return r;
}

double area_functional(const ConformalGrid& g, const std::vector<double>& u) {
  double area = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.active(i, j)) continue;
      if (i + 1 < g.nx && g.active(i + 1, j)) {
        const Face f = eval_face(g, u, i, j, true);
        area += 0.5 * g.h * g.h * f.lam *
                std::sqrt(f.lam * f.lam + f.d * f.d + f.t * f.t);
      }
      if (j + 1 < g.ny && g.active(i, j + 1)) {
        const Face f = eval_face(g, u, i, j, false);
        area += 0.5 * g.h * g.h * f.lam *
                std::sqrt(f.lam * f.lam + f.d * f.d + f.t * f.t);
      }
    }
  }
  return area;
}

namespace {

using Trip = Eigen::Triplet<double>;

// Jacobian triplets of the interior residual with respect to interior nodes.
void assemble(const ConformalGrid& g, const std::vector<double>& u,
              const std::vector<int>& eq, std::vector<Trip>& trips,
              Eigen::VectorXd& rhs) {
  trips.clear();
  const double h = g.h;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) continue;
      const int row = eq[g.idx(i, j)];
      double res = 0.0;
      auto face = [&](int ia, int ja, bool horizontal, double sign) {
        const Face f = eval_face(g, u, ia, ja, horizontal);
        res += sign * f.flux / h;
        const int ib = horizontal ? ia + 1 : ia;
        const int jb = horizontal ? ja : ja + 1;
        auto add = [&](int node, double coef) {
          if (eq[node] >= 0) trips.emplace_back(row, eq[node], coef);
        };
        add(g.idx(ia, ja), -sign * f.dflux_dd / (h * h));
        add(g.idx(ib, jb), sign * f.dflux_dd / (h * h));
        for (int k = 0; k < f.tcount; ++k)
          add(f.tnode[k], sign * f.dflux_dt * f.tweight[k] / h);
      };
      face(i, j, true, +1.0);
      face(i - 1, j, true, -1.0);
      face(i, j, false, +1.0);
      face(i, j - 1, false, -1.0);
      rhs[row] = -res;
    }
  }
}

}  // namespace

std::vector<double> jacobian_apply(const ConformalGrid& g,
                                   const std::vector<double>& u,
                                   const std::vector<double>& dir) {
  const int n = g.nx * g.ny;
  std::vector<int> eq(n, -1);
  int neq = 0;
  for (int id = 0; id < n; ++id)
    if (g.kind[id] == NodeKind::Interior) eq[id] = neq++;
  std::vector<Trip> trips;
  Eigen::VectorXd rhs(neq);
  assemble(g, u, eq, trips, rhs);
  Eigen::SparseMatrix<double> jac(neq, neq);
  jac.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd v(neq);
  for (int id = 0; id < n; ++id)
    if (eq[id] >= 0) v[eq[id]] = dir[id];
  Eigen::VectorXd out = jac * v;
  std::vector<double> res(n, 0.0);
  for (int id = 0; id < n; ++id)
    if (eq[id] >= 0) res[id] = out[eq[id]];
  return res;
}

DiscreteSolution solve_dirichlet(const ConformalGrid& g,
                                 const SolverConfig& cfg) {
  DiscreteSolution sol;
  sol.grid = g;
  const int n = g.nx * g.ny;
  std::vector<int> eq(n, -1);
  int neq = 0;
  for (int id = 0; id < n; ++id)
    if (g.kind[id] == NodeKind::Interior) eq[id] = neq++;
  if (neq == 0) throw std::invalid_argument("solve_dirichlet: no unknowns");

  std::vector<double> u(n, 0.0);
  for (int id = 0; id < n; ++id)
    if (g.kind[id] == NodeKind::Dirichlet) u[id] = g.boundary[id];

  if (cfg.initial != nullptr && cfg.initial->size() == u.size()) {
    for (int id = 0; id < n; ++id)
      if (g.kind[id] == NodeKind::Interior) u[id] = (*cfg.initial)[id];
  } else {
    // Harmonic interpolation of the boundary data as the initial guess.
    std::vector<Trip> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(neq);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (!g.interior(i, j)) continue;
        const int row = eq[g.idx(i, j)];
        const int nb[4] = {g.idx(i + 1, j), g.idx(i - 1, j), g.idx(i, j + 1),
                           g.idx(i, j - 1)};
        trips.emplace_back(row, row, 4.0);
        for (int k = 0; k < 4; ++k) {
          if (eq[nb[k]] >= 0)
            trips.emplace_back(row, eq[nb[k]], -1.0);
          else
            rhs[row] += u[nb[k]];
        }
      }
    }
    Eigen::SparseMatrix<double> lap(neq, neq);
    lap.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(lap);
    Eigen::VectorXd x = chol.solve(rhs);
    for (int id = 0; id < n; ++id)
      if (eq[id] >= 0) u[id] = x[eq[id]];
  }

  auto res_norms = [&](const std::vector<double>& uu, double& rmax,
                       double& rl2) {
    const auto r = residual_field(g, uu);
    rmax = 0.0;
    rl2 = 0.0;
    for (double v : r) {
      rmax = std::max(rmax, std::abs(v));
      rl2 += v * v;
    }
    rl2 = std::sqrt(rl2);
  };
  auto umax_of = [&](const std::vector<double>& uu) {
    double m = 0.0;
    for (int id = 0; id < n; ++id)
      if (g.kind[id] != NodeKind::Exterior) m = std::max(m, std::abs(uu[id]));
    return m;
  };

  std::vector<Trip> trips;
  Eigen::VectorXd rhs(neq);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;

  double rmax, rl2;
  res_norms(u, rmax, rl2);
  double area = area_functional(g, u);
  sol.area_monotone = true;

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    const double tol = cfg.tol_factor * (1.0 + umax_of(u));
    if (rmax < tol) {
      sol.converged = true;
      break;
    }
    assemble(g, u, eq, trips, rhs);
    Eigen::SparseMatrix<double> jac(neq, neq);
    jac.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd step;
    bool lu_ok = true;
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      lu_ok = false;
    } else {
      step = lu.solve(rhs);
      lu_ok = lu.info() == Eigen::Success;
    }
    if (!lu_ok) {
      // Gradient fallback on a singular Jacobian.
      step = rhs / (1.0 + rhs.norm());
    }

    const double phi0 = 0.5 * rl2 * rl2;
    double alpha = 1.0;
    bool accepted = false;
    double best_alpha = -1.0;
    std::vector<double> trial(u);
    for (int ls = 0; ls < 50; ++ls, alpha *= 0.5) {
      for (int id = 0; id < n; ++id)
        if (eq[id] >= 0) trial[id] = u[id] + alpha * step[eq[id]];
      double tmax, tl2;
      res_norms(trial, tmax, tl2);
      const double phi = 0.5 * tl2 * tl2;
      const bool armijo = phi <= (1.0 - 2.0 * cfg.armijo_slope * alpha) * phi0;
      if (!armijo) continue;
      if (best_alpha < 0.0) best_alpha = alpha;
      const double trial_area = area_functional(g, trial);
      if (trial_area <= area + 1e-9 * (1.0 + std::abs(area))) {
        u = trial;
        rmax = tmax;
        rl2 = tl2;
        area = trial_area;
        accepted = true;
        break;
      }
    }
    if (!accepted && best_alpha >= 0.0) {
      // Armijo holds but the area ratchet does not: accept and record it.
      for (int id = 0; id < n; ++id)
        if (eq[id] >= 0) u[id] += best_alpha * step[eq[id]];
      res_norms(u, rmax, rl2);
      area = area_functional(g, u);
      sol.area_monotone = false;
      accepted = true;
    }
    if (!accepted) break;  // no progress possible
  }
  sol.iterations = iter;
  sol.hit_iteration_cap = iter >= cfg.max_iterations;
  if (!sol.converged) {
    const double tol = cfg.tol_factor * (1.0 + umax_of(u));
    sol.converged = rmax < tol;
  }
  sol.residual_max = rmax;
  sol.residual_l2 = rl2;
  sol.u = u;

  // Gradient and area-element fields.
  sol.gx.assign(n, 0.0);
  sol.gy.assign(n, 0.0);
  sol.w.assign(n, 1.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int id = g.idx(i, j);
      if (g.kind[id] == NodeKind::Exterior) continue;
      auto diff = [&](int ip, int jp, int im, int jm, double& out) {
        const bool pa = ip >= 0 && jp >= 0 && ip < g.nx && jp < g.ny &&
                        g.active(ip, jp);
        const bool ma = im >= 0 && jm >= 0 && im < g.nx && jm < g.ny &&
                        g.active(im, jm);
        if (pa && ma)
          out = (u[g.idx(ip, jp)] - u[g.idx(im, jm)]) / (2.0 * g.h);
        else if (pa)
          out = (u[g.idx(ip, jp)] - u[id]) / g.h;
        else if (ma)
          out = (u[id] - u[g.idx(im, jm)]) / g.h;
        else
          out = 0.0;
      };
      diff(i + 1, j, i - 1, j, sol.gx[id]);
      diff(i, j + 1, i, j - 1, sol.gy[id]);
      const double lam = g.lambda[id];
      sol.w[id] = std::sqrt(
          1.0 + (sol.gx[id] * sol.gx[id] + sol.gy[id] * sol.gy[id]) /
                    (lam * lam));
    }
  }
  return sol;
}

std::vector<double> TruncationSequence::probe_increments(size_t probe) const {
  std::vector<double> inc;
  if (levels.empty()) return inc;
  const int top_gen = levels.back().generation;
  const SequenceLevel* prev = nullptr;
  for (const auto& lv : levels) {
    if (lv.generation != top_gen) continue;
    if (prev != nullptr && probe < lv.probe_values.size())
      inc.push_back(std::abs(lv.probe_values[probe] -
                             prev->probe_values[probe]));
    prev = &lv;
  }
  return inc;
}

TruncationSequence run_truncation_sequence(const ScherkDomain& d,
                                           const SequenceSpec& spec) {
  TruncationSequence out;
  for (int gen : spec.generations) {
    const std::vector<double>* warm = nullptr;
    for (double m : spec.levels) {
      DomainGridSpec gs = spec.grid;
      gs.generation = gen;
      gs.truncation = m;
      const ConformalGrid grid = build_grid(d, gs);
      SolverConfig cfg;
      if (warm != nullptr && warm->size() == grid.kind.size())
        cfg.initial = warm;
      SequenceLevel lv;
      lv.m = m;
      lv.generation = gen;
      lv.sol = solve_dirichlet(grid, cfg);
      out.all_converged = out.all_converged && lv.sol.converged;
      for (const auto& p : spec.probes) {
        double cxp, cyp;
        if (spec.grid.chart == ChartKind::HalfPlane) {
          cxp = p.x;
          cyp = p.y;
        } else {
          const auto [phi, theta] =
              spec.grid.polar_chart.polar_from_halfplane(p);
          cxp = phi;
          cyp = theta;
        }
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (int j = 0; j < grid.ny; ++j)
          for (int i = 0; i < grid.nx; ++i) {
            if (!grid.interior(i, j)) continue;
            const double dist = std::hypot(grid.cx(i) - cxp, grid.cy(j) - cyp);
            if (dist < best) {
              best = dist;
              value = lv.sol.u[grid.idx(i, j)];
            }
          }
        lv.probe_values.push_back(value);
      }
      out.levels.push_back(std::move(lv));
      warm = &out.levels.back().sol.u;
    }
  }
  return out;
}

std::vector<DivergenceLineCandidate> detect_divergence_lines(
    const TruncationSequence& seq, const ScherkDomain& d) {
  const int top_gen = seq.levels.empty() ? 0 : seq.levels.back().generation;
  std::vector<const SequenceLevel*> lv;
  for (const auto& l : seq.levels)
    if (l.generation == top_gen) lv.push_back(&l);
  if (lv.size() < 3)
    throw std::invalid_argument("detect_divergence_lines: needs >= 3 levels");
  const auto& g = lv.back()->sol.grid;
  const auto& w2 = lv[lv.size() - 1]->sol.w;
  const auto& w1 = lv[lv.size() - 2]->sol.w;
  const int n = g.nx * g.ny;

  std::vector<uint8_t> flag(n, 0);
  for (int id = 0; id < n; ++id)
    if (g.kind[id] == NodeKind::Interior && w1[id] > 0.0 &&
        w2[id] / w1[id] > 1.5)
      flag[id] = 1;

  std::vector<DivergenceLineCandidate> found;
  std::vector<uint8_t> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (!flag[start] || seen[start]) continue;
    std::vector<int> cluster;
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const int id = q.front();
      q.pop();
      cluster.push_back(id);
      const int i = id % g.nx, j = id / g.nx;
      const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (auto& [ii, jj] : nb) {
        if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) continue;
        const int nid = g.idx(ii, jj);
        if (flag[nid] && !seen[nid]) {
          seen[nid] = 1;
          q.push(nid);
        }
      }
    }
    if (cluster.size() < 5) continue;

    // Half-plane coordinates of the cluster nodes.
    std::vector<HPoint> pts;
    for (int id : cluster) {
      const int i = id % g.nx, j = id / g.nx;
      pts.push_back(g.to_halfplane(g.cx(i), g.cy(j)));
    }
    // Vertical-line fit.
    double mean_x = 0.0;
    for (const auto& p : pts) mean_x += p.x;
    mean_x /= pts.size();
    double dev_v = 0.0;
    for (const auto& p : pts) dev_v = std::max(dev_v, std::abs(p.x - mean_x));
    // Circle centered on the axis: x^2+y^2 = 2cx + k (linear least squares).
    double sxx = 0, sx = 0, sn = static_cast<double>(pts.size());
    double bx = 0, b1 = 0;
    for (const auto& p : pts) {
      const double rr = p.x * p.x + p.y * p.y;
      sxx += 4.0 * p.x * p.x;
      sx += 2.0 * p.x;
      bx += 2.0 * p.x * rr;
      b1 += rr;
    }
    const double det = sxx * sn - sx * sx;
    double dev_c = std::numeric_limits<double>::infinity();
    double cc = 0.0, rr2 = -1.0;
    if (std::abs(det) > 1e-12) {
      cc = (bx * sn - sx * b1) / det;
      const double kk = (sxx * b1 - sx * bx) / det;
      rr2 = cc * cc + kk;
      if (rr2 > 0.0) {
        dev_c = 0.0;
        const double r = std::sqrt(rr2);
        for (const auto& p : pts)
          dev_c = std::max(dev_c, std::abs(std::hypot(p.x - cc, p.y) - r));
      }
    }

    DivergenceLineCandidate cand;
    Geodesic fit;
    if (dev_v <= dev_c) {
      fit.vertical = true;
      fit.c = mean_x;
      fit.p = IdealPoint::at(mean_x);
      fit.q = IdealPoint::infinity();
      cand.width = dev_v;
    } else {
      fit.vertical = false;
      fit.c = cc;
      fit.r = std::sqrt(rr2);
      fit.p = IdealPoint::at(cc - fit.r);
      fit.q = IdealPoint::at(cc + fit.r);
      cand.width = dev_c;
    }
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -tmin;
    for (const auto& p : pts) {
      const double t = fit.param_of(p);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
    cand.line = fit;
    cand.end1 = fit.point_at(tmin);
    cand.end2 = fit.point_at(tmax);
    std::vector<double> ratios;
    for (int id : cluster) ratios.push_back(std::log(w2[id] / w1[id]));
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                     ratios.end());
    cand.score = ratios[ratios.size() / 2];
    cand.node_count = static_cast<int>(cluster.size());

    // Snap endpoints to domain vertices within 3h (chart distance).
    auto snap = [&](HPoint& e, int& snapped) {
      for (size_t v = 0; v < d.vertices.size(); ++v) {
        double vx, vy;
        if (is_ideal(d.vertices[v])) {
          const auto& ip = std::get<IdealPoint>(d.vertices[v]);
          if (ip.infinite) continue;
          vx = ip.x;
          vy = 0.0;
        } else {
          vx = std::get<HPoint>(d.vertices[v]).x;
          vy = std::get<HPoint>(d.vertices[v]).y;
        }
        if (g.chart == ChartKind::Polar) {
          if (vy <= 0.0) continue;  // chart distance only for finite points
          const auto [phi, theta] =
              g.polar_chart.polar_from_halfplane({vx, vy});
          vx = phi;
          vy = theta;
        }
        double ex = e.x, ey = e.y;
        if (g.chart == ChartKind::Polar) {
          const auto [phi, theta] = g.polar_chart.polar_from_halfplane(e);
          ex = phi;
          ey = theta;
        }
        if (std::hypot(ex - vx, ey - vy) <= 3.0 * g.h + 2e-2) {
          snapped = static_cast<int>(v);
          if (vy > 0.0) e = {vx, vy};
        }
      }
    };
    snap(cand.end1, cand.snapped1);
    snap(cand.end2, cand.snapped2);
    found.push_back(std::move(cand));
  }

  // Merge clusters fitted to the same geodesic.
  std::vector<DivergenceLineCandidate> merged;
  for (auto& c : found) {
    bool absorbed = false;
    for (auto& m : merged) {
      const bool same =
          c.line.vertical == m.line.vertical &&
          std::abs(c.line.c - m.line.c) < 5.0 * lv.back()->sol.grid.h &&
          (c.line.vertical ||
           std::abs(c.line.r - m.line.r) < 5.0 * lv.back()->sol.grid.h);
      if (same) {
        m.node_count += c.node_count;
        m.score = std::max(m.score, c.score);
        m.width = std::max(m.width, c.width);
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(c);
  }
  std::sort(merged.begin(), merged.end(),
            [](const DivergenceLineCandidate& a,
               const DivergenceLineCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.line.c < b.line.c;
            });
  return merged;
}

FluxEstimate discrete_flux(const DiscreteSolution& sol,
                           const std::vector<std::array<double, 2>>& polyline,
                           bool left_normal) {
  const ConformalGrid& g = sol.grid;
  auto interp = [&](double px, double py, double& gx, double& gy) {
    const double fi = (px - g.x0) / g.h, fj = (py - g.y0) / g.h;
    const int i0 = static_cast<int>(std::floor(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny)
      throw std::domain_error("discrete_flux: polyline exits the grid");
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di)
        if (!g.active(i0 + di, j0 + dj))
          throw std::domain_error("discrete_flux: polyline exits the mask");
    const double a = fi - i0, b = fj - j0;
    auto bil = [&](const std::vector<double>& f) {
      return (1 - a) * (1 - b) * f[g.idx(i0, j0)] +
             a * (1 - b) * f[g.idx(i0 + 1, j0)] +
             (1 - a) * b * f[g.idx(i0, j0 + 1)] +
             a * b * f[g.idx(i0 + 1, j0 + 1)];
    };
    gx = bil(sol.gx);
    gy = bil(sol.gy);
  };

  auto evaluate = [&](const std::vector<std::array<double, 2>>& pts)
      -> std::pair<double, double> {
    double flux = 0.0, len = 0.0;
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
      const double dx = pts[s + 1][0] - pts[s][0];
      const double dy = pts[s + 1][1] - pts[s][1];
      const double seg = std::hypot(dx, dy);
      if (seg == 0.0) continue;
      const double mx = 0.5 * (pts[s][0] + pts[s + 1][0]);
      const double my = 0.5 * (pts[s][1] + pts[s + 1][1]);
      double gx, gy;
      interp(mx, my, gx, gy);
      const double lam = g.lambda_at(mx, my);
      const double w = std::sqrt(1.0 + (gx * gx + gy * gy) / (lam * lam));
      const double nx = left_normal ? -dy / seg : dy / seg;
      const double ny = left_normal ? dx / seg : -dx / seg;
      flux += (gx * nx + gy * ny) / w * seg;
      len += lam * seg;
    }
    return {flux, len};
  };

  FluxEstimate est;
  auto [f1, l1] = evaluate(polyline);
  est.value = f1;
  est.arc_length = l1;
  if (polyline.size() >= 5) {
    std::vector<std::array<double, 2>> coarse;
    for (size_t i = 0; i < polyline.size(); i += 2) coarse.push_back(polyline[i]);
    if (coarse.back() != polyline.back()) coarse.push_back(polyline.back());
    est.error = std::abs(f1 - evaluate(coarse).first);
  }
  return est;
}

}  // namespace scherk
