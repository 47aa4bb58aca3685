#pragma once

// Shared test domains: a solvable Scherk triangle, quadrilaterals violating
// the length inequalities (flat-top and bulged-top variants), the alternating
// ideal square, and a non-convex all-C hexagon.

#include <cmath>
#include <vector>

#include "scherk/domain.hpp"

namespace scherk::fixtures {

inline std::vector<HPoint> sample_geodesic(const HPoint& a, const HPoint& b,
                                           int n = 64) {
  const Geodesic g = geodesic_between(BPoint(a), BPoint(b));
  const double t0 = g.param_of(a), t1 = g.param_of(b);
  std::vector<HPoint> pts;
  for (int k = 0; k <= n; ++k)
    pts.push_back(g.point_at(t0 + (t1 - t0) * k / n));
  pts.front() = a;
  pts.back() = b;
  return pts;
}

inline Edge c_edge(int from, int to, const std::vector<HPoint>& arc,
                   double value, const std::string& name) {
  Edge e;
  e.kind = EdgeKind::C;
  e.v_from = from;
  e.v_to = to;
  e.arc = arc;
  for (size_t i = 0; i < arc.size(); ++i)
    e.arc_params.push_back(static_cast<double>(i));
  e.data.samples = {{0.0, value},
                    {static_cast<double>(arc.size() - 1), value}};
  e.name = name;
  return e;
}

inline Edge ab_edge(EdgeKind kind, int from, int to, const std::string& name) {
  Edge e;
  e.kind = kind;
  e.v_from = from;
  e.v_to = to;
  e.name = name;
  return e;
}

// Triangle with +infinity on the bottom side and 0 on the two others;
// a < b + c so the Dirichlet problem is solvable.
inline ScherkDomain make_triangle_ok() {
  ScherkDomain d;
  d.vertices = {BPoint(HPoint{0, 2}), BPoint(HPoint{-1, 1}),
                BPoint(HPoint{1, 1})};
  d.edges.push_back(c_edge(0, 1, sample_geodesic({0, 2}, {-1, 1}), 0.0, "c1"));
  d.edges.push_back(ab_edge(EdgeKind::A, 1, 2, "a"));
  d.edges.push_back(c_edge(2, 0, sample_geodesic({1, 1}, {0, 2}), 0.0, "c2"));
  d.components = {{0, 1, 2}};
  d.finalize();
  return d;
}

// Quadrilateral with two opposite +infinity sides that are long enough to
// break 2*alpha < gamma for the full domain (flat geodesic top, so the
// domain itself is a polygon). s is the Euclidean scale of the top side;
// the margin vanishes at s = 2 + sqrt(3).
inline ScherkDomain make_quad_flat(double s = 6.0) {
  ScherkDomain d;
  d.vertices = {BPoint(HPoint{-1, 1}), BPoint(HPoint{1, 1}),
                BPoint(HPoint{s, s}), BPoint(HPoint{-s, s})};
  d.edges.push_back(c_edge(0, 1, sample_geodesic({-1, 1}, {1, 1}), 0.0, "cb"));
  d.edges.push_back(ab_edge(EdgeKind::A, 1, 2, "ar"));
  d.edges.push_back(c_edge(2, 3, sample_geodesic({s, s}, {-s, s}), 0.0, "ct"));
  d.edges.push_back(ab_edge(EdgeKind::A, 3, 0, "al"));
  d.components = {{0, 1, 2, 3}};
  d.finalize();
  return d;
}

// Same quadrilateral but with the top boundary bulged upward (convex toward
// the domain), so the witness polygon closes with an interior geodesic
// chord: the divergence line of the truncation sequence.
inline ScherkDomain make_quad_divergent() {
  ScherkDomain d;
  const double s = 6.0, bulge = 9.3;
  d.vertices = {BPoint(HPoint{-1, 1}), BPoint(HPoint{1, 1}),
                BPoint(HPoint{s, s}), BPoint(HPoint{-s, s})};
  // Euclidean circle through (s,s), (0,bulge), (-s,s).
  const double yc =
      (s * s + s * s - bulge * bulge) / (2.0 * (s - bulge));
  const double radius = bulge - yc;
  const double a0 = std::atan2(s - yc, s);
  const double a1 = kPi - a0;
  std::vector<HPoint> arc;
  for (int k = 0; k <= 96; ++k) {
    const double t = a0 + (a1 - a0) * k / 96.0;
    arc.push_back({radius * std::cos(t), yc + radius * std::sin(t)});
  }
  arc.front() = {s, s};
  arc.back() = {-s, s};
  d.edges.push_back(c_edge(0, 1, sample_geodesic({-1, 1}, {1, 1}), 0.0, "cb"));
  d.edges.push_back(ab_edge(EdgeKind::A, 1, 2, "ar"));
  d.edges.push_back(c_edge(2, 3, arc, 0.0, "ct"));
  d.edges.push_back(ab_edge(EdgeKind::A, 3, 0, "al"));
  d.components = {{0, 1, 2, 3}};
  d.finalize();
  return d;
}

// Alternating ideal square with vertices at the disk angles +-pi/4, +-3pi/4
// and group-symmetric horocycles (sigma is the disk-model diameter).
inline ScherkDomain make_ideal_square(double sigma = 0.25) {
  ScherkDomain d;
  const double angles[4] = {kPi / 4.0, 3.0 * kPi / 4.0, 5.0 * kPi / 4.0,
                            7.0 * kPi / 4.0};
  for (double a : angles) d.vertices.push_back(disk_boundary_to_halfplane(a));
  d.edges.push_back(ab_edge(EdgeKind::A, 0, 1, "a1"));
  d.edges.push_back(ab_edge(EdgeKind::B, 1, 2, "b1"));
  d.edges.push_back(ab_edge(EdgeKind::A, 2, 3, "a2"));
  d.edges.push_back(ab_edge(EdgeKind::B, 3, 0, "b2"));
  d.components = {{0, 1, 2, 3}};
  for (int v = 0; v < 4; ++v) {
    const double rr = 1.0 - sigma;
    const HPoint deep = disk_to_halfplane(rr * std::cos(angles[v]),
                                          rr * std::sin(angles[v]));
    const auto& ip = std::get<IdealPoint>(d.vertices[v]);
    const double dx = deep.x - ip.x;
    d.horocycle_sizes[v] = (dx * dx + deep.y * deep.y) / deep.y;
  }
  d.finalize();
  return d;
}

// Non-convex all-C hexagon: the vertex v1 = (0, 2.4) juts into the domain,
// so the chord joining v0 and v2 leaves it.
inline ScherkDomain make_notched_hexagon() {
  ScherkDomain d;
  d.vertices = {BPoint(HPoint{-2, 1}),   BPoint(HPoint{0, 2.4}),
                BPoint(HPoint{2, 1}),    BPoint(HPoint{3, 4}),
                BPoint(HPoint{0, 5.5}),  BPoint(HPoint{-3, 4})};
  auto pt = [&](int v) { return std::get<HPoint>(d.vertices[v]); };
  for (int k = 0; k < 6; ++k) {
    const int to = (k + 1) % 6;
    d.edges.push_back(c_edge(k, to, sample_geodesic(pt(k), pt(to)), 0.0,
                             "c" + std::to_string(k)));
  }
  d.components = {{0, 1, 2, 3, 4, 5}};
  d.finalize();
  return d;
}

}  // namespace scherk::fixtures
