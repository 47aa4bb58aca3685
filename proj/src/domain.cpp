#include "scherk/domain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace scherk {

namespace {

constexpr int kLoopSamples = 96;   // per edge, containment polylines
constexpr int kSideSamples = 16;   // per side, simplicity tests

// Fixed, slightly irrational ray direction for even-odd tests.
constexpr double kRayX = 0.96352379256715633;
constexpr double kRayY = 0.26764313946044794;

double cross2(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

bool even_odd_inside(const std::vector<std::vector<std::array<double, 2>>>& loops,
                     double u, double v) {
  int hits = 0;
  for (const auto& loop : loops) {
    for (size_t i = 0; i + 1 < loop.size(); ++i) {
      const double ax = loop[i][0], ay = loop[i][1];
      const double bx = loop[i + 1][0], by = loop[i + 1][1];
      const double ex = bx - ax, ey = by - ay;
      const double den = cross2(ex, ey, kRayX, kRayY);
      if (std::abs(den) < 1e-300) continue;
      const double wx = u - ax, wy = v - ay;
      const double s = cross2(wx, wy, kRayX, kRayY) / den;
      const double t = cross2(wx, wy, ex, ey) / den;
      if (s >= 0.0 && s < 1.0 && t > 0.0) ++hits;
    }
  }
  return (hits % 2) == 1;
}

// Strict interior crossing of two segments.
bool segments_cross(const std::array<double, 2>& a, const std::array<double, 2>& b,
                    const std::array<double, 2>& c, const std::array<double, 2>& d) {
  const double d1 = cross2(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
  const double d2 = cross2(b[0] - a[0], b[1] - a[1], d[0] - a[0], d[1] - a[1]);
  const double d3 = cross2(d[0] - c[0], d[1] - c[1], a[0] - c[0], a[1] - c[1]);
  const double d4 = cross2(d[0] - c[0], d[1] - c[1], b[0] - c[0], b[1] - c[1]);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) &&
         d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

std::array<double, 2> normalize2(std::array<double, 2> v) {
  const double n = std::hypot(v[0], v[1]);
  return {v[0] / n, v[1] / n};
}

// Unit Euclidean tangent at `at` of the geodesic toward `toward`.
std::array<double, 2> geodesic_tangent(const HPoint& at, const BPoint& toward) {
  const Geodesic g = geodesic_between(BPoint(at), toward);
  const double t0 = g.param_of(at);
  const double t1 = g.param_of_end(toward);
  auto v = g.velocity_at(t0);
  if (t1 < t0) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  return normalize2(v);
}

double turn_angle(const std::array<double, 2>& din,
                  const std::array<double, 2>& dout) {
  return std::atan2(cross2(din[0], din[1], dout[0], dout[1]),
                    din[0] * dout[0] + din[1] * dout[1]);
}

double disk_angle_of_vertex(const BPoint& p) {
  return halfplane_abscissa_to_disk_angle(std::get<IdealPoint>(p));
}

}  // namespace

std::string edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::A: return "A";
    case EdgeKind::B: return "B";
    case EdgeKind::C: return "C";
    case EdgeKind::D: return "D";
  }
  return "?";
}

double EdgeData::eval(double t) const {
  if (samples.empty()) return 0.0;
  if (t <= samples.front().first) return samples.front().second;
  if (t >= samples.back().first) return samples.back().second;
  for (size_t i = 0; i + 1 < samples.size(); ++i) {
    if (t <= samples[i + 1].first) {
      const double t0 = samples[i].first, t1 = samples[i + 1].first;
      const double u = (t - t0) / (t1 - t0);
      return samples[i].second + u * (samples[i + 1].second - samples[i].second);
    }
  }
  return samples.back().second;
}

void ScherkDomain::finalize() {
  if (components.empty())
    throw std::invalid_argument("domain: no boundary components");
  for (const auto& comp : components) {
    if (comp.empty()) throw std::invalid_argument("domain: empty component");
    for (size_t i = 0; i < comp.size(); ++i) {
      const Edge& e = edges.at(comp[i]);
      const Edge& next = edges.at(comp[(i + 1) % comp.size()]);
      if (e.v_to != next.v_from)
        throw std::invalid_argument("domain: edges of component " +
                                    std::to_string(&comp - &components[0]) +
                                    " do not chain (" + e.name + " -> " +
                                    next.name + ")");
    }
  }
  for (const Edge& e : edges) {
    if (e.kind == EdgeKind::C) {
      if (e.arc.size() < 2)
        throw std::invalid_argument("domain: C edge without sampled arc");
      for (size_t i = 0; i + 1 < e.arc_params.size(); ++i)
        if (!(e.arc_params[i] < e.arc_params[i + 1]))
          throw std::invalid_argument(
              "domain: C edge parameters not strictly increasing");
    }
    if (e.kind == EdgeKind::D) {
      if (!is_ideal(vertices.at(e.v_from)) || !is_ideal(vertices.at(e.v_to)))
        throw std::invalid_argument("domain: D edge with finite endpoint");
    }
  }

  loops_.assign(components.size(), {});
  for (size_t ci = 0; ci < components.size(); ++ci) {
    auto& loop = loops_[ci];
    for (int ei : components[ci]) {
      const Edge& e = edges[ei];
      std::vector<std::array<double, 2>> part;
      switch (e.kind) {
        case EdgeKind::A:
        case EdgeKind::B:
          part = disk_arc_polyline(vertices[e.v_from], vertices[e.v_to],
                                   kLoopSamples);
          break;
        case EdgeKind::C:
          for (const auto& p : e.arc) part.push_back(halfplane_to_disk(p));
          break;
        case EdgeKind::D: {
          const double a0 = disk_angle_of_vertex(vertices[e.v_from]);
          double a1 = disk_angle_of_vertex(vertices[e.v_to]);
          while (a1 <= a0) a1 += 2.0 * kPi;
          for (int k = 0; k <= kLoopSamples; ++k) {
            const double t = a0 + (a1 - a0) * static_cast<double>(k) / kLoopSamples;
            part.push_back({std::cos(t), std::sin(t)});
          }
          break;
        }
      }
      if (!loop.empty()) loop.pop_back();  // drop duplicated joint
      loop.insert(loop.end(), part.begin(), part.end());
    }
  }

  // Orient each component: interior on the left unless flagged reversed.
  reversed_.assign(components.size(), false);
  for (size_t ci = 0; ci < components.size(); ++ci) {
    const auto& loop = loops_[ci];
    size_t best = 0;
    double best_len = -1.0;
    for (size_t i = 0; i + 1 < loop.size(); ++i) {
      const double len = std::hypot(loop[i + 1][0] - loop[i][0],
                                    loop[i + 1][1] - loop[i][1]);
      if (len > best_len) {
        best_len = len;
        best = i;
      }
    }
    const double mx = 0.5 * (loop[best][0] + loop[best + 1][0]);
    const double my = 0.5 * (loop[best][1] + loop[best + 1][1]);
    auto t = normalize2({loop[best + 1][0] - loop[best][0],
                         loop[best + 1][1] - loop[best][1]});
    const double off = 0.05 * best_len;
    const bool left_in = even_odd_inside(loops_, mx - off * t[1], my + off * t[0]);
    const bool right_in = even_odd_inside(loops_, mx + off * t[1], my - off * t[0]);
    reversed_[ci] = !left_in && right_in;
  }
}

bool ScherkDomain::contains(const HPoint& p) const {
  const auto d = halfplane_to_disk(p);
  return even_odd_inside(loops_, d[0], d[1]);
}

bool ScherkDomain::disk_contains(double u, double v) const {
  return even_odd_inside(loops_, u, v);
}

Horocycle ScherkDomain::horocycle_at(int vertex, int generation) const {
  const auto it = horocycle_sizes.find(vertex);
  if (it == horocycle_sizes.end() || !is_ideal(vertices[vertex]))
    throw std::invalid_argument("domain: no horocycle at vertex " +
                                std::to_string(vertex));
  Horocycle h;
  h.center = std::get<IdealPoint>(vertices[vertex]);
  h.size = it->second * std::pow(2.0, 1.0 - generation);
  return h;
}

Geodesic ScherkDomain::edge_geodesic(int e) const {
  return geodesic_between(vertices[edges[e].v_from], vertices[edges[e].v_to]);
}

bool ScherkDomain::has_ideal_boundary() const {
  for (const auto& v : vertices)
    if (is_ideal(v)) return true;
  return has_edge_kind(EdgeKind::D);
}

bool ScherkDomain::has_edge_kind(EdgeKind k) const {
  for (const auto& e : edges)
    if (e.kind == k) return true;
  return false;
}

int ScherkDomain::component_of_edge(int e) const {
  for (size_t ci = 0; ci < components.size(); ++ci)
    for (int ei : components[ci])
      if (ei == e) return static_cast<int>(ci);
  return -1;
}

ScherkDomain ScherkDomain::transformed(const Mobius& m) const {
  ScherkDomain out;
  out.vertices.reserve(vertices.size());
  for (const auto& v : vertices) out.vertices.push_back(m.apply(v));
  out.edges = edges;
  for (auto& e : out.edges) {
    for (auto& p : e.arc) p = m.apply(p);
    if (e.kind == EdgeKind::D) {
      for (auto& s : e.data.samples) {
        const BPoint ip = disk_boundary_to_halfplane(s.first);
        const BPoint img = m.apply(ip);
        s.first = halfplane_abscissa_to_disk_angle(std::get<IdealPoint>(img));
      }
      std::sort(e.data.samples.begin(), e.data.samples.end());
    }
  }
  out.components = components;
  for (const auto& [v, size] : horocycle_sizes) {
    Horocycle h{std::get<IdealPoint>(vertices[v]), size};
    out.horocycle_sizes[v] = transport_horocycle(m, h).size;
  }
  out.finalize();
  return out;
}

ScherkDomain ScherkDomain::relabeled_ab() const {
  ScherkDomain out = *this;
  for (auto& e : out.edges) {
    if (e.kind == EdgeKind::A)
      e.kind = EdgeKind::B;
    else if (e.kind == EdgeKind::B)
      e.kind = EdgeKind::A;
  }
  out.finalize();
  return out;
}

std::vector<Diagnostic> validate_domain(const ScherkDomain& d) {
  std::vector<Diagnostic> diags;

  // Convex-corner rule for A-A and B-B meetings at finite vertices.
  for (size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& comp = d.components[ci];
    for (size_t i = 0; i < comp.size(); ++i) {
      const Edge& e1 = d.edges[comp[i]];
      const Edge& e2 = d.edges[comp[(i + 1) % comp.size()]];
      const bool same_infinite_kind =
          (e1.kind == EdgeKind::A && e2.kind == EdgeKind::A) ||
          (e1.kind == EdgeKind::B && e2.kind == EdgeKind::B);
      if (!same_infinite_kind) continue;
      const int v = e1.v_to;
      if (is_ideal(d.vertices[v])) continue;
      const HPoint at = std::get<HPoint>(d.vertices[v]);
      auto din = geodesic_tangent(at, d.vertices[e1.v_from]);
      din = {-din[0], -din[1]};  // direction of travel into v
      const auto dout = geodesic_tangent(at, d.vertices[e2.v_to]);
      double tau = turn_angle(din, dout);
      if (d.component_reversed(ci)) tau = -tau;
      if (tau > 1e-9) {
        diags.push_back({"corner",
                         "two " + edge_kind_name(e1.kind) +
                             " edges meet at a strictly convex corner at "
                             "vertex " + std::to_string(v),
                         true});
      }
    }
  }

  // Condition (C1) when both the C and D families are empty.
  if (!d.has_edge_kind(EdgeKind::C) && !d.has_edge_kind(EdgeKind::D)) {
    for (EdgeKind k : {EdgeKind::A, EdgeKind::B}) {
      std::vector<int> parent(d.vertices.size());
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      int count = 0;
      for (const Edge& e : d.edges)
        if (e.kind == k) {
          ++count;
          parent[find(e.v_from)] = find(e.v_to);
        }
      if (count == 0) continue;
      std::set<int> roots;
      for (const Edge& e : d.edges)
        if (e.kind == k) roots.insert(find(e.v_from));
      if (roots.size() <= 1)
        diags.push_back({"C1",
                         "the closure of the " + edge_kind_name(k) +
                             " family is a connected subset of the boundary",
                         true});
    }
  }

  // C-edge convexity: discrete turning one-signed toward the interior.
  for (size_t ei = 0; ei < d.edges.size(); ++ei) {
    const Edge& e = d.edges[ei];
    if (e.kind != EdgeKind::C || e.arc.size() < 3) continue;
    const bool rev = d.component_reversed(d.component_of_edge(static_cast<int>(ei)));
    for (size_t i = 1; i + 1 < e.arc.size(); ++i) {
      auto din = geodesic_tangent(e.arc[i], BPoint(e.arc[i - 1]));
      din = {-din[0], -din[1]};
      const auto dout = geodesic_tangent(e.arc[i], BPoint(e.arc[i + 1]));
      double tau = turn_angle(din, dout);
      if (rev) tau = -tau;
      if (tau < -1e-8) {
        diags.push_back({"c-convexity",
                         "C edge " + e.name + " is not convex toward the "
                         "domain near sample " + std::to_string(i),
                         true});
        break;
      }
    }
  }

  // Horocycles: pairwise disjoint, disjoint from bounded edges and C edges.
  std::vector<std::pair<int, Horocycle>> horos;
  for (const auto& [v, size] : d.horocycle_sizes)
    horos.push_back({v, d.horocycle_at(v, 1)});
  for (size_t i = 0; i < horos.size(); ++i) {
    for (size_t j = i + 1; j < horos.size(); ++j) {
      const Horocycle &a = horos[i].second, &b = horos[j].second;
      bool overlap = false;
      if (a.center.infinite || b.center.infinite) {
        const Horocycle& line = a.center.infinite ? a : b;
        const Horocycle& circ = a.center.infinite ? b : a;
        if (circ.center.infinite)
          overlap = true;  // two horocycles at the same ideal point
        else
          overlap = circ.size > line.size - 1e-12;
      } else {
        const double dist = std::hypot(a.center.x - b.center.x,
                                       0.5 * (a.size - b.size));
        overlap = dist < 0.5 * (a.size + b.size) - 1e-12;
      }
      if (overlap)
        diags.push_back({"horocycle-overlap",
                         "horocycles at vertices " +
                             std::to_string(horos[i].first) + " and " +
                             std::to_string(horos[j].first) + " intersect",
                         true});
    }
  }
  for (const auto& [v, h] : horos) {
    for (size_t ei = 0; ei < d.edges.size(); ++ei) {
      const Edge& e = d.edges[ei];
      std::vector<HPoint> samples;
      if (e.kind == EdgeKind::C) {
        samples = e.arc;
      } else if (e.kind != EdgeKind::D && !is_ideal(d.vertices[e.v_from]) &&
                 !is_ideal(d.vertices[e.v_to])) {
        const Geodesic g = d.edge_geodesic(static_cast<int>(ei));
        const double t0 = g.param_of(std::get<HPoint>(d.vertices[e.v_from]));
        const double t1 = g.param_of(std::get<HPoint>(d.vertices[e.v_to]));
        for (int k = 0; k <= 32; ++k)
          samples.push_back(g.point_at(t0 + (t1 - t0) * k / 32.0));
      }
      for (const auto& p : samples) {
        if (h.contains(p)) {
          diags.push_back({e.kind == EdgeKind::C ? "horocycle-c-edge"
                                                 : "horocycle-edge",
                           "horocycle at vertex " + std::to_string(v) +
                               " meets edge " + e.name,
                           true});
          break;
        }
      }
    }
  }

  // Ideal vertices without a configured horocycle (informational).
  for (size_t v = 0; v < d.vertices.size(); ++v) {
    if (is_ideal(d.vertices[v]) && !d.horocycle_sizes.count(static_cast<int>(v)))
      diags.push_back({"missing-horocycle",
                       "ideal vertex " + std::to_string(v) +
                           " has no configured horocycle",
                       false});
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Inscribed polygon enumeration

namespace {

struct PairInfo {
  bool available = false;
  int edge = -1;            // >= 0 for boundary sides
  EdgeKind kind = EdgeKind::C;
  std::vector<std::array<double, 2>> poly;  // coarse disk polyline
};

}  // namespace

std::vector<InscribedPolygon> enumerate_inscribed_polygons(
    const ScherkDomain& d, const EnumerationLimits& lim) {
  const int n = static_cast<int>(d.vertices.size());
  if (n > lim.max_vertices)
    throw std::length_error("enumerate_inscribed_polygons: vertex budget "
                            "exceeded");

  // Pair availability and geometry.
  std::vector<PairInfo> pair(n * n);
  auto at = [&](int i, int j) -> PairInfo& { return pair[i * n + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (same_point(d.vertices[i], d.vertices[j])) continue;
      PairInfo info;
      // Edge matching this vertex pair?
      for (size_t ei = 0; ei < d.edges.size(); ++ei) {
        const Edge& e = d.edges[ei];
        if (e.kind == EdgeKind::D) continue;
        const bool match = (e.v_from == i && e.v_to == j) ||
                           (e.v_from == j && e.v_to == i);
        if (!match) continue;
        if (e.kind == EdgeKind::A || e.kind == EdgeKind::B) {
          info.available = true;
          info.edge = static_cast<int>(ei);
          info.kind = e.kind;
          break;
        }
        // C edge: only usable as a boundary side when it is geodesic.
        const auto chord = disk_arc_polyline(d.vertices[i], d.vertices[j], 64);
        double dev = 0.0;
        for (const auto& p : e.arc) {
          const auto q = halfplane_to_disk(p);
          double best = 1e9;
          for (size_t s = 0; s + 1 < chord.size(); ++s) {
            const double ex = chord[s + 1][0] - chord[s][0];
            const double ey = chord[s + 1][1] - chord[s][1];
            const double wx = q[0] - chord[s][0], wy = q[1] - chord[s][1];
            const double len2 = ex * ex + ey * ey;
            const double t = len2 > 0 ? std::clamp((wx * ex + wy * ey) / len2,
                                                   0.0, 1.0)
                                      : 0.0;
            best = std::min(best, std::hypot(wx - t * ex, wy - t * ey));
          }
          dev = std::max(dev, best);
        }
        if (dev < 1e-9) {
          info.available = true;
          info.edge = static_cast<int>(ei);
          info.kind = EdgeKind::C;
          break;
        }
      }
      if (!info.available) {
        // Interior chord: sample strictly inside the domain.
        const int m = lim.chord_samples + 1;
        const auto pts = disk_arc_polyline(d.vertices[i], d.vertices[j], m);
        bool inside = true;
        for (int k = 1; k < m; ++k)
          if (!d.disk_contains(pts[k][0], pts[k][1])) {
            inside = false;
            break;
          }
        if (inside) {
          info.available = true;
          info.edge = -1;
        }
      }
      if (info.available)
        info.poly = disk_arc_polyline(d.vertices[i], d.vertices[j], kSideSamples);
      at(i, j) = info;
      at(j, i) = info;
    }
  }

  const size_t total_edges = d.edges.size();
  std::vector<InscribedPolygon> result;
  long raw_orders = 0;

  for (int mask = 0; mask < (1 << n); ++mask) {
    const int size = __builtin_popcount(static_cast<unsigned>(mask));
    if (size < 3) continue;
    std::vector<int> verts;
    for (int v = 0; v < n; ++v)
      if (mask & (1 << v)) verts.push_back(v);
    std::vector<int> rest(verts.begin() + 1, verts.end());
    std::sort(rest.begin(), rest.end());
    do {
      if (++raw_orders > lim.max_raw_orders)
        throw std::length_error(
            "enumerate_inscribed_polygons: combinatorial budget exceeded");
      if (rest.front() > rest.back()) continue;  // kill reflections
      std::vector<int> cyc;
      cyc.push_back(verts[0]);
      cyc.insert(cyc.end(), rest.begin(), rest.end());
      bool ok = true;
      for (size_t i = 0; i < cyc.size() && ok; ++i)
        ok = at(cyc[i], cyc[(i + 1) % cyc.size()]).available;
      if (!ok) continue;
      // Simplicity: no interior crossing between non-adjacent sides.
      const size_t k = cyc.size();
      for (size_t i = 0; i < k && ok; ++i) {
        const auto& pi = at(cyc[i], cyc[(i + 1) % k]).poly;
        for (size_t j = i + 1; j < k && ok; ++j) {
          if (j == i + 1 || (i == 0 && j == k - 1)) continue;
          const auto& pj = at(cyc[j], cyc[(j + 1) % k]).poly;
          for (size_t a = 0; a + 1 < pi.size() && ok; ++a)
            for (size_t b = 0; b + 1 < pj.size() && ok; ++b)
              if (segments_cross(pi[a], pi[a + 1], pj[b], pj[b + 1]))
                ok = false;
        }
      }
      if (!ok) continue;
      // The polygon must not enclose any unused part of the boundary.
      std::set<int> used_edges;
      for (size_t i = 0; i < k; ++i) {
        const int e = at(cyc[i], cyc[(i + 1) % k]).edge;
        if (e >= 0) used_edges.insert(e);
      }
      std::vector<std::vector<std::array<double, 2>>> ploops(1);
      for (size_t i = 0; i < k; ++i) {
        const auto& side = at(cyc[i], cyc[(i + 1) % k]).poly;
        auto& loop = ploops[0];
        if (!loop.empty()) loop.pop_back();
        loop.insert(loop.end(), side.begin(), side.end());
      }
      for (size_t ci = 0; ci < d.components.size() && ok; ++ci) {
        for (int ei : d.components[ci]) {
          if (used_edges.count(ei)) continue;
          const Edge& e = d.edges[ei];
          std::array<double, 2> rep;
          if (e.kind == EdgeKind::C) {
            rep = halfplane_to_disk(e.arc[e.arc.size() / 2]);
          } else if (e.kind == EdgeKind::D) {
            const double a0 = disk_angle_of_vertex(d.vertices[e.v_from]);
            double a1 = disk_angle_of_vertex(d.vertices[e.v_to]);
            while (a1 <= a0) a1 += 2.0 * kPi;
            const double t = 0.5 * (a0 + a1);
            rep = {std::cos(t), std::sin(t)};
          } else {
            const auto pts = disk_arc_polyline(d.vertices[e.v_from],
                                               d.vertices[e.v_to], 8);
            rep = pts[4];
          }
          if (even_odd_inside(ploops, rep[0], rep[1])) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;

      InscribedPolygon poly;
      poly.verts = cyc;
      for (size_t i = 0; i < k; ++i) {
        const auto& info = at(cyc[i], cyc[(i + 1) % k]);
        poly.sides.push_back({cyc[i], cyc[(i + 1) % k], info.edge, info.kind});
      }
      poly.is_domain = used_edges.size() == total_edges &&
                       static_cast<size_t>(size) == d.vertices.size();
      result.push_back(std::move(poly));
      if (static_cast<long>(result.size()) > lim.max_polygons)
        throw std::length_error(
            "enumerate_inscribed_polygons: polygon budget exceeded");
    } while (std::next_permutation(rest.begin(), rest.end()));
  }

  std::sort(result.begin(), result.end(),
            [](const InscribedPolygon& a, const InscribedPolygon& b) {
              if (a.verts.size() != b.verts.size())
                return a.verts.size() < b.verts.size();
              return a.verts < b.verts;
            });
  return result;
}

TruncationRow compute_truncated_lengths(const ScherkDomain& d,
                                        const InscribedPolygon& p,
                                        int polygon_index, int generation) {
  TruncationRow row;
  row.polygon = polygon_index;
  row.generation = generation;
  for (const auto& side : p.sides) {
    const Geodesic g = geodesic_between(d.vertices[side.v0],
                                        d.vertices[side.v1]);
    std::optional<Horocycle> hp, hq;
    if (is_ideal(d.vertices[side.v0]))
      hp = d.horocycle_at(side.v0, generation);
    if (is_ideal(d.vertices[side.v1]))
      hq = d.horocycle_at(side.v1, generation);
    double len = 0.0;
    try {
      len = truncated_side_length(g, hp, hq);
    } catch (const std::domain_error&) {
      row.degenerate = true;
    }
    row.gamma += len;
    if (side.edge >= 0 && side.kind == EdgeKind::A) row.alpha += len;
    if (side.edge >= 0 && side.kind == EdgeKind::B) row.beta += len;
  }
  // Replacement arcs inside the horodisks: geodesic chords between the two
  // crossings at each ideal vertex of the polygon.
  const size_t k = p.verts.size();
  for (size_t i = 0; i < k; ++i) {
    const int v = p.verts[i];
    if (!is_ideal(d.vertices[v])) continue;
    const Horocycle h = d.horocycle_at(v, generation);
    const int vprev = p.verts[(i + k - 1) % k];
    const int vnext = p.verts[(i + 1) % k];
    try {
      const Geodesic g1 = geodesic_between(d.vertices[vprev], d.vertices[v]);
      const Geodesic g2 = geodesic_between(d.vertices[v], d.vertices[vnext]);
      const HPoint c1 = horocycle_geodesic_intersection(h, g1);
      const HPoint c2 = horocycle_geodesic_intersection(h, g2);
      row.eps += hyperbolic_distance(c1, c2);
    } catch (const std::domain_error&) {
      row.degenerate = true;
    }
  }
  return row;
}

std::string verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Satisfied: return "SATISFIED";
    case VerdictStatus::Violated: return "VIOLATED";
    case VerdictStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

Verdict evaluate_inequalities(const ScherkDomain& d,
                              const EnumerationLimits& lim, int theorem,
                              bool equality_for_domain,
                              const std::vector<int>& generations) {
  Verdict v;
  v.theorem = theorem;
  v.polygons = enumerate_inscribed_polygons(d, lim);
  if (v.polygons.empty()) {
    v.status = VerdictStatus::Satisfied;
    v.detail = "no inscribed polygons";
    return v;
  }
  const int lead_gen = generations.front();
  double min_margin = std::numeric_limits<double>::infinity();
  int arg_min = -1;
  double defect = 0.0;
  bool any_degenerate = false;
  for (size_t pi = 0; pi < v.polygons.size(); ++pi) {
    for (int gen : generations) {
      const TruncationRow row = compute_truncated_lengths(
          d, v.polygons[pi], static_cast<int>(pi), gen);
      v.rows.push_back(row);
      if (gen != lead_gen) continue;
      any_degenerate = any_degenerate || row.degenerate;
      if (equality_for_domain && v.polygons[pi].is_domain) {
        defect = std::abs(row.alpha - row.beta);
        if (defect > kStrictTol) {
          v.status = VerdictStatus::Violated;
          v.witness = static_cast<int>(pi);
          v.equality_defect = defect;
          v.detail = "alpha != beta for the full domain";
        }
        continue;
      }
      const double margin = std::min(row.gamma - 2.0 * row.alpha,
                                     row.gamma - 2.0 * row.beta);
      if (margin < min_margin) {
        min_margin = margin;
        arg_min = static_cast<int>(pi);
      }
    }
  }
  v.min_margin = min_margin;
  v.equality_defect = defect;
  if (v.status == VerdictStatus::Violated) return v;
  if (min_margin < -kStrictTol) {
    v.status = VerdictStatus::Violated;
    v.witness = arg_min;
    v.detail = "strict Jenkins-Serrin inequality fails";
    return v;
  }
  if (any_degenerate || min_margin <= kStrictTol) {
    v.status = VerdictStatus::Inconclusive;
    v.detail = any_degenerate ? "degenerate truncation rows"
                              : "margins within the strictness tolerance";
    return v;
  }
  v.status = VerdictStatus::Satisfied;
  return v;
}

}  // namespace

Verdict check_theorem1(const ScherkDomain& d, const EnumerationLimits& lim) {
  if (d.has_ideal_boundary())
    throw std::invalid_argument(
        "check_theorem1: domain has ideal boundary (use theorems 2/3)");
  const bool no_c = !d.has_edge_kind(EdgeKind::C);
  return evaluate_inequalities(d, lim, 1, no_c, {1});
}

Verdict check_theorem2(const ScherkDomain& d, const EnumerationLimits& lim) {
  if (!d.has_ideal_boundary() ||
      (!d.has_edge_kind(EdgeKind::C) && !d.has_edge_kind(EdgeKind::D)))
    throw std::invalid_argument(
        "check_theorem2: needs ideal boundary and a C or D edge");
  return evaluate_inequalities(d, lim, 2, false, {1, 2, 3});
}

Verdict check_theorem3(const ScherkDomain& d, const EnumerationLimits& lim) {
  if (!d.has_ideal_boundary() || d.has_edge_kind(EdgeKind::C) ||
      d.has_edge_kind(EdgeKind::D))
    throw std::invalid_argument(
        "check_theorem3: needs ideal vertices and only A/B edges");
  return evaluate_inequalities(d, lim, 3, true, {1, 2, 3});
}

Verdict check_domain(const ScherkDomain& d, const EnumerationLimits& lim) {
  if (!d.has_ideal_boundary()) return check_theorem1(d, lim);
  if (d.has_edge_kind(EdgeKind::C) || d.has_edge_kind(EdgeKind::D))
    return check_theorem2(d, lim);
  return check_theorem3(d, lim);
}

double domain_alpha_beta_gap(const ScherkDomain& d, int generation) {
  double gap = 0.0;
  for (size_t ei = 0; ei < d.edges.size(); ++ei) {
    const Edge& e = d.edges[ei];
    if (e.kind != EdgeKind::A && e.kind != EdgeKind::B) continue;
    const Geodesic g = d.edge_geodesic(static_cast<int>(ei));
    std::optional<Horocycle> hp, hq;
    if (is_ideal(d.vertices[e.v_from]))
      hp = d.horocycle_at(e.v_from, generation);
    if (is_ideal(d.vertices[e.v_to]))
      hq = d.horocycle_at(e.v_to, generation);
    const double len = truncated_side_length(g, hp, hq);
    gap += e.kind == EdgeKind::A ? len : -len;
  }
  return gap;
}

}  // namespace scherk
