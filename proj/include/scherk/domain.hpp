#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scherk/geometry.hpp"

namespace scherk {

enum class EdgeKind { A, B, C, D };

std::string edge_kind_name(EdgeKind k);

// Piecewise-linear boundary data over a scalar parameter.
struct EdgeData {
  std::vector<std::pair<double, double>> samples;  // (parameter, value)
  double eval(double t) const;
  bool empty() const { return samples.empty(); }
};

struct Edge {
  EdgeKind kind = EdgeKind::A;
  int v_from = -1, v_to = -1;
  // C edges carry a sampled arc (half-plane points, parameters increasing);
  // A/B edges are geodesic arcs between the vertex points; D edges live on
  // the ideal boundary (canonical parameter: disk angle, counterclockwise
  // from v_from to v_to).
  std::vector<HPoint> arc;
  std::vector<double> arc_params;
  EdgeData data;
  std::string name;
};

struct Diagnostic {
  std::string code;
  std::string message;
  bool violation = false;  // structural condition violated vs informational
};

class ScherkDomain {
 public:
  std::vector<BPoint> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> components;  // cyclic edge indices
  std::map<int, double> horocycle_sizes;     // ideal vertex -> gen-1 size

  // Must be called after filling the fields; builds boundary polylines and
  // orientation flags. Throws std::invalid_argument on structural errors.
  void finalize();

  bool contains(const HPoint& p) const;            // strict interior
  bool disk_contains(double u, double v) const;    // same test, disk coords
  Horocycle horocycle_at(int vertex, int generation = 1) const;
  Geodesic edge_geodesic(int e) const;  // A/B edges only
  bool is_ideal_vertex(int v) const { return is_ideal(vertices[v]); }
  bool has_ideal_boundary() const;
  bool has_edge_kind(EdgeKind k) const;
  int component_of_edge(int e) const;
  bool component_reversed(int comp) const { return reversed_[comp]; }
  // Disk polyline of one whole component (cyclic, closed).
  const std::vector<std::array<double, 2>>& component_polyline(int comp) const {
    return loops_[comp];
  }
  ScherkDomain transformed(const Mobius& m) const;
  ScherkDomain relabeled_ab() const;  // swap A and B markings

 private:
  std::vector<std::vector<std::array<double, 2>>> loops_;  // per component
  std::vector<bool> reversed_;  // interior on the right instead of the left
};

std::vector<Diagnostic> validate_domain(const ScherkDomain& d);

// Side of an inscribed polygon: an original domain edge (edge >= 0) or an
// interior geodesic chord.
struct PolySide {
  int v0 = -1, v1 = -1;
  int edge = -1;
  EdgeKind kind = EdgeKind::C;  // meaningful when edge >= 0
};

struct InscribedPolygon {
  std::vector<int> verts;       // cyclic order
  std::vector<PolySide> sides;  // sides[i] joins verts[i] -> verts[i+1]
  bool is_domain = false;       // the polygon is the full domain boundary
};

struct EnumerationLimits {
  int max_vertices = 16;
  long max_polygons = 20000;
  long max_raw_orders = 5000000;
  int chord_samples = 64;
};

// All simple geodesic polygons inscribed in d, in a deterministic canonical
// order. Throws std::length_error when the combinatorial caps are exceeded.
std::vector<InscribedPolygon> enumerate_inscribed_polygons(
    const ScherkDomain& d, const EnumerationLimits& lim = {});

struct TruncationRow {
  int polygon = -1;
  int generation = 1;
  double alpha = 0.0, beta = 0.0, gamma = 0.0, eps = 0.0;
  bool degenerate = false;
};

TruncationRow compute_truncated_lengths(const ScherkDomain& d,
                                        const InscribedPolygon& p,
                                        int polygon_index, int generation);

enum class VerdictStatus { Satisfied, Violated, Inconclusive };

std::string verdict_status_name(VerdictStatus s);

inline constexpr double kStrictTol = 1e-7;

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  int theorem = 0;  // 1, 2, or 3
  std::optional<int> witness;  // polygon index when Violated
  double min_margin = 0.0;     // smallest strict-inequality margin
  double equality_defect = 0.0;  // |alpha-beta| for P=Omega (theorems 1/3)
  std::vector<TruncationRow> rows;
  std::vector<InscribedPolygon> polygons;
  std::string detail;
};

Verdict check_theorem1(const ScherkDomain& d, const EnumerationLimits& lim = {});
Verdict check_theorem2(const ScherkDomain& d, const EnumerationLimits& lim = {});
Verdict check_theorem3(const ScherkDomain& d, const EnumerationLimits& lim = {});

// Dispatches on the edge families present, as in the three theorems.
Verdict check_domain(const ScherkDomain& d, const EnumerationLimits& lim = {});

// Total truncated A-length minus B-length of the full boundary at a given
// horocycle generation (used by the non-zero-flux experiment).
double domain_alpha_beta_gap(const ScherkDomain& d, int generation);

}  // namespace scherk
