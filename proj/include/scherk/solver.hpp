#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scherk/domain.hpp"
#include "scherk/geometry.hpp"

namespace scherk {

enum class ChartKind { HalfPlane, Polar };
enum class NodeKind : uint8_t { Exterior, Interior, Dirichlet };

// Uniform node grid over a chart rectangle with a node mask, Dirichlet
// values and the conformal factor (1/y in the half-plane chart, 1/sin(theta)
// in a polar chart).
struct ConformalGrid {
  ChartKind chart = ChartKind::HalfPlane;
  PolarChart polar_chart = PolarChart::centered_at(IdealPoint::at(0.0));
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  int nx = 0, ny = 0;
  std::vector<NodeKind> kind;
  std::vector<double> boundary;  // Dirichlet node values
  std::vector<double> lambda;
  int thin_features = 0;  // interior runs narrower than 3 cells

  int idx(int i, int j) const { return j * nx + i; }
  double cx(int i) const { return x0 + h * i; }
  double cy(int j) const { return y0 + h * j; }
  bool interior(int i, int j) const {
    return kind[idx(i, j)] == NodeKind::Interior;
  }
  bool active(int i, int j) const {
    return kind[idx(i, j)] != NodeKind::Exterior;
  }
  int count(NodeKind k) const;
  HPoint to_halfplane(double cx, double cy) const;
  double lambda_at(double cx, double cy) const;
};

// Rectangle grid with all rim nodes Dirichlet; `f` supplies chart-coordinate
// boundary values.
ConformalGrid build_rect_grid(ChartKind chart, double x0, double x1,
                              double y0, double y1, double h,
                              const std::function<double(double, double)>& f,
                              const PolarChart& pc = PolarChart::centered_at(
                                  IdealPoint::at(0.0)));

struct DomainGridSpec {
  ChartKind chart = ChartKind::HalfPlane;
  double h = 1.0 / 32.0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool auto_box = true;
  double truncation = 8.0;  // boundary level m: A -> +m, B -> -m, data clamped
  int generation = 0;       // > 0 adds geodesic caps at the ideal vertices
  double cap_r0 = 1.5, cap_step = 0.5;   // cap distance r0 + step*generation
  double standoff = -1.0;                // default: one cell
  PolarChart polar_chart = PolarChart::centered_at(IdealPoint::at(0.0));
};

ConformalGrid build_grid(const ScherkDomain& d, const DomainGridSpec& spec);

struct SolverConfig {
  double tol_factor = 1e-10;  // converged when max|R| < tol*(1+max|u|)
  int max_iterations = 200;
  double armijo_slope = 1e-4;
  const std::vector<double>* initial = nullptr;  // warm start (full grid)
};

struct DiscreteSolution {
  ConformalGrid grid;
  std::vector<double> u;   // full grid, Dirichlet values included
  std::vector<double> w;   // area element W_u per active node
  std::vector<double> gx, gy;  // chart gradient per active node
  double residual_max = 0.0, residual_l2 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool hit_iteration_cap = false;
  bool area_monotone = true;
};

// Flux-form residual of the conformal minimal surface operator
// div(grad u / sqrt(1 + lambda^{-2}|grad u|^2)) at interior nodes
// (zero elsewhere).
std::vector<double> residual_field(const ConformalGrid& g,
                                   const std::vector<double>& u);

// Face quadrature of the graph-area functional (line-search merit).
double area_functional(const ConformalGrid& g, const std::vector<double>& u);

// Action of the Newton Jacobian on a direction (zero outside interior
// nodes); exposed for derivative checks.
std::vector<double> jacobian_apply(const ConformalGrid& g,
                                   const std::vector<double>& u,
                                   const std::vector<double>& dir);

DiscreteSolution solve_dirichlet(const ConformalGrid& g,
                                 const SolverConfig& cfg = {});

struct SequenceSpec {
  std::vector<double> levels = {2, 4, 8, 16, 32};
  std::vector<int> generations = {0};
  DomainGridSpec grid;
  std::vector<HPoint> probes;  // half-plane points
};

struct SequenceLevel {
  double m = 0.0;
  int generation = 0;
  DiscreteSolution sol;
  std::vector<double> probe_values;
};

struct TruncationSequence {
  std::vector<SequenceLevel> levels;
  bool all_converged = true;
  // Probe increments |v_k - v_{k-1}| across the levels of the last
  // generation, for Cauchy/drift diagnostics.
  std::vector<double> probe_increments(size_t probe) const;
};

TruncationSequence run_truncation_sequence(const ScherkDomain& d,
                                           const SequenceSpec& spec);

struct DivergenceLineCandidate {
  Geodesic line;  // fitted geodesic in the half-plane
  HPoint end1, end2;
  int snapped1 = -1, snapped2 = -1;  // domain vertex indices when snapped
  double score = 0.0;   // median log growth ratio of W_u at the top level
  double width = 0.0;   // max deviation of cluster nodes from the fit
  int node_count = 0;
};

std::vector<DivergenceLineCandidate> detect_divergence_lines(
    const TruncationSequence& seq, const ScherkDomain& d);

struct FluxEstimate {
  double value = 0.0;
  double arc_length = 0.0;
  double error = 0.0;
};

// Midpoint-rule flux of the discrete solution across a chart polyline, with
// the normal obtained by rotating the travel direction to the left (pass
// left_normal=false for the opposite convention). The error estimate comes
// from a half-resolution re-evaluation.
FluxEstimate discrete_flux(const DiscreteSolution& sol,
                           const std::vector<std::array<double, 2>>& polyline,
                           bool left_normal = true);

}  // namespace scherk
