#include "scherk/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scherk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}
}  // namespace

bool is_ideal(const BPoint& p) { return std::holds_alternative<IdealPoint>(p); }

bool same_point(const BPoint& a, const BPoint& b, double tol) {
  if (is_ideal(a) != is_ideal(b)) return false;
  if (is_ideal(a)) {
    const auto& ia = std::get<IdealPoint>(a);
    const auto& ib = std::get<IdealPoint>(b);
    if (ia.infinite || ib.infinite) return ia.infinite == ib.infinite;
    return std::abs(ia.x - ib.x) <= tol;
  }
  const auto& pa = std::get<HPoint>(a);
  const auto& pb = std::get<HPoint>(b);
  return std::abs(pa.x - pb.x) <= tol && std::abs(pa.y - pb.y) <= tol;
}

std::complex<double> Mobius::apply(std::complex<double> z) const {
  return (a * z + b) / (c * z + d);
}

std::complex<double> Mobius::derivative(std::complex<double> z) const {
  const std::complex<double> den = c * z + d;
  return (a * d - b * c) / (den * den);
}

HPoint Mobius::apply(HPoint p) const {
  const auto w = apply(std::complex<double>(p.x, p.y));
  return {w.real(), w.imag()};
}

IdealPoint Mobius::apply(IdealPoint p) const {
  if (p.infinite) {
    if (std::abs(c) < kGeomTol) return IdealPoint::infinity();
    return IdealPoint::at(a / c);
  }
  const double den = c * p.x + d;
  if (std::abs(den) < kGeomTol) return IdealPoint::infinity();
  return IdealPoint::at((a * p.x + b) / den);
}

BPoint Mobius::apply(BPoint p) const {
  if (is_ideal(p)) return apply(std::get<IdealPoint>(p));
  return apply(std::get<HPoint>(p));
}

Mobius Mobius::inverse() const { return {d, -b, -c, a}; }

Mobius Mobius::after(const Mobius& f) const {
  return {a * f.a + b * f.c, a * f.b + b * f.d, c * f.a + d * f.c,
          c * f.b + d * f.d};
}

HPoint Geodesic::point_at(double t) const {
  if (vertical) return {c, std::exp(t)};
  return {c + r * std::cos(t), r * std::sin(t)};
}

std::array<double, 2> Geodesic::velocity_at(double t) const {
  if (vertical) return {0.0, std::exp(t)};
  return {-r * std::sin(t), r * std::cos(t)};
}

double Geodesic::param_of(const HPoint& pt) const {
  if (vertical) return std::log(pt.y);
  return std::atan2(pt.y, pt.x - c);
}

double Geodesic::param_of_end(const BPoint& pt) const {
  if (!is_ideal(pt)) return param_of(std::get<HPoint>(pt));
  const auto& ip = std::get<IdealPoint>(pt);
  if (vertical) return ip.infinite ? kInf : -kInf;
  return ip.x > c ? 0.0 : kPi;
}

double Geodesic::length_between(double t0, double t1) const {
  if (vertical) return std::abs(t1 - t0);
  // Antiderivative of 1/sin is ln tan(t/2).
  return std::abs(std::log(std::tan(0.5 * t1)) - std::log(std::tan(0.5 * t0)));
}

bool Geodesic::has_ideal_end(const IdealPoint& ip, double tol) const {
  auto match = [&](const BPoint& e) {
    if (!is_ideal(e)) return false;
    const auto& ie = std::get<IdealPoint>(e);
    if (ie.infinite || ip.infinite) return ie.infinite == ip.infinite;
    return std::abs(ie.x - ip.x) <= tol;
  };
  return match(p) || match(q);
}

Geodesic geodesic_between(const BPoint& p, const BPoint& q) {
  require(!same_point(p, q), "geodesic_between: coincident points");
  Geodesic g;
  g.p = p;
  g.q = q;

  const bool pi = is_ideal(p), qi = is_ideal(q);
  if (pi && qi) {
    const auto& a = std::get<IdealPoint>(p);
    const auto& b = std::get<IdealPoint>(q);
    if (a.infinite || b.infinite) {
      g.vertical = true;
      g.c = a.infinite ? b.x : a.x;
    } else {
      g.vertical = false;
      g.c = 0.5 * (a.x + b.x);
      g.r = 0.5 * std::abs(b.x - a.x);
    }
    return g;
  }
  if (pi != qi) {
    const auto& ip = std::get<IdealPoint>(pi ? p : q);
    const auto& hp = std::get<HPoint>(pi ? q : p);
    if (ip.infinite) {
      g.vertical = true;
      g.c = hp.x;
    } else if (std::abs(hp.x - ip.x) <= kGeomTol) {
      g.vertical = true;
      g.c = ip.x;
    } else {
      g.vertical = false;
      g.c = (hp.x * hp.x + hp.y * hp.y - ip.x * ip.x) / (2.0 * (hp.x - ip.x));
      g.r = std::abs(ip.x - g.c);
    }
    return g;
  }
  const auto& a = std::get<HPoint>(p);
  const auto& b = std::get<HPoint>(q);
  if (std::abs(a.x - b.x) <= kGeomTol) {
    g.vertical = true;
    g.c = 0.5 * (a.x + b.x);
  } else {
    g.vertical = false;
    g.c = (a.x * a.x + a.y * a.y - b.x * b.x - b.y * b.y) /
          (2.0 * (a.x - b.x));
    g.r = std::hypot(a.x - g.c, a.y);
  }
  return g;
}

double hyperbolic_distance(const HPoint& p, const HPoint& q) {
  require(p.y > 0.0 && q.y > 0.0, "hyperbolic_distance: point not in H^2");
  const double dx = p.x - q.x, dy = p.y - q.y;
  const double arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
  return std::acosh(arg);
}

QuadResult arc_length(const Curve& c, double t0, double t1, double abs_tol) {
  auto integrand = [&](double t) {
    const HPoint p = c.pos(t);
    if (!(p.y > 0.0))
      throw std::domain_error("arc_length: curve touches the ideal boundary");
    const auto v = c.vel(t);
    return std::hypot(v[0], v[1]) / p.y;
  };
  return adaptive_simpson(integrand, t0, t1, abs_tol);
}

bool Horocycle::contains(const HPoint& p) const {
  if (center.infinite) return p.y > size;
  const double dx = p.x - center.x, dy = p.y - 0.5 * size;
  return dx * dx + dy * dy < 0.25 * size * size;
}

HPoint horocycle_geodesic_intersection(const Horocycle& h, const Geodesic& g) {
  require(h.size > 0.0, "horocycle size must be positive");
  if (h.center.infinite) {
    if (g.vertical) return {g.c, h.size};
    // No ideal end at infinity: the only admissible case is tangency.
    require(std::abs(g.r - h.size) <= 1e-9,
            "horocycle_geodesic_intersection: geodesic does not end at the "
            "horocycle center");
    return {g.c, g.r};
  }
  const double a = h.center.x, s = h.size;
  if (g.vertical) {
    require(std::abs(g.c - a) <= kGeomTol,
            "horocycle_geodesic_intersection: geodesic does not end at the "
            "horocycle center");
    return {a, s};
  }
  const bool plus = std::abs((g.c + g.r) - a) <= 1e-9 * (1.0 + std::abs(a));
  const bool minus = std::abs((g.c - g.r) - a) <= 1e-9 * (1.0 + std::abs(a));
  require(plus || minus,
          "horocycle_geodesic_intersection: geodesic does not end at the "
          "horocycle center");
  const double t = plus ? 2.0 * std::atan(s / (2.0 * g.r))
                        : 2.0 * std::atan(2.0 * g.r / s);
  return g.point_at(t);
}

double equidistant_distance(double theta0) {
  if (!(theta0 > 0.0 && theta0 < kPi))
    throw std::overflow_error(
        "equidistant_distance: unbounded as theta0 -> 0 or pi");
  return std::abs(std::log(std::tan(0.5 * theta0)));
}

double truncated_side_length(const Geodesic& g,
                             const std::optional<Horocycle>& at_p,
                             const std::optional<Horocycle>& at_q) {
  auto cut = [&](const BPoint& end, const std::optional<Horocycle>& h) {
    if (is_ideal(end)) {
      const auto& ip = std::get<IdealPoint>(end);
      require(h.has_value(),
              "truncated_side_length: ideal endpoint without horocycle");
      require(h->center.infinite == ip.infinite &&
                  (ip.infinite || std::abs(h->center.x - ip.x) <= 1e-9),
              "truncated_side_length: horocycle not centered at endpoint");
      return g.param_of(horocycle_geodesic_intersection(*h, g));
    }
    return g.param_of(std::get<HPoint>(end));
  };
  double tp = cut(g.p, at_p);
  double tq = cut(g.q, at_q);
  // Orient: lower parameter first along the geodesic.
  const double ep = g.param_of_end(g.p);
  const double eq = g.param_of_end(g.q);
  double lo, hi;
  if (ep < eq) {
    lo = tp;
    hi = tq;
  } else {
    lo = tq;
    hi = tp;
  }
  if (!(lo < hi))
    throw std::domain_error(
        "truncated_side_length: horodisks cover the whole side");
  return g.length_between(lo, hi);
}

PolarChart PolarChart::centered_at(const IdealPoint& p) {
  PolarChart chart;
  chart.base = p;
  if (p.infinite)
    chart.to_origin = {0.0, -1.0, 1.0, 0.0};  // z -> -1/z
  else
    chart.to_origin = {1.0, -p.x, 0.0, 1.0};  // z -> z - p
  return chart;
}

PolarChart PolarChart::centered_at(const IdealPoint& p, const HPoint& q) {
  PolarChart chart = centered_at(p);
  const auto w = chart.to_origin.apply(std::complex<double>(q.x, q.y));
  // Stabilizer of 0: z -> lambda z/(cz+1). Choose c so the image of w is on
  // the imaginary axis, then scale it to i.
  const double n2 = std::norm(w);
  require(n2 > kGeomTol, "PolarChart: point coincides with the base");
  const Mobius m1{1.0, 0.0, -w.real() / n2, 1.0};
  const auto w1 = m1.apply(w);
  require(w1.imag() > kGeomTol, "PolarChart: degenerate normalization");
  const Mobius m2{1.0 / w1.imag(), 0.0, 0.0, 1.0};
  chart.to_origin = m2.after(m1.after(chart.to_origin));
  return chart;
}

std::pair<double, double> PolarChart::polar_from_halfplane(
    const HPoint& p) const {
  const auto w = to_origin.apply(std::complex<double>(p.x, p.y));
  const double n = std::abs(w);
  require(n > kGeomTol, "polar_from_halfplane: point at the chart base");
  return {std::log(n), std::atan2(w.imag(), w.real())};
}

HPoint PolarChart::polar_to_halfplane(double phi, double theta) const {
  require(theta > 0.0 && theta < kPi,
          "polar_to_halfplane: theta outside (0,pi)");
  const double rr = std::exp(phi);
  const std::complex<double> w(rr * std::cos(theta), rr * std::sin(theta));
  const auto z = to_origin.inverse().apply(w);
  return {z.real(), z.imag()};
}

void PolarChart::pull_back(std::complex<double> z, std::complex<double> dz,
                           double& phi, double& theta, double& dphi,
                           double& dtheta) const {
  const auto w = to_origin.apply(z);
  const auto dw = to_origin.derivative(z) * dz;
  const double n2 = std::norm(w);
  phi = 0.5 * std::log(n2);
  theta = std::atan2(w.imag(), w.real());
  const auto q = std::conj(w) * dw / n2;  // d(log w) = dphi + i dtheta
  dphi = q.real();
  dtheta = q.imag();
}

std::array<double, 2> halfplane_to_disk(const HPoint& p) {
  const std::complex<double> z(p.x, p.y);
  const auto w = (z - std::complex<double>(0, 1)) /
                 (z + std::complex<double>(0, 1));
  return {w.real(), w.imag()};
}

std::array<double, 2> halfplane_to_disk(const BPoint& p) {
  if (!is_ideal(p)) return halfplane_to_disk(std::get<HPoint>(p));
  const auto& ip = std::get<IdealPoint>(p);
  if (ip.infinite) return {1.0, 0.0};
  const std::complex<double> z(ip.x, 0.0);
  const auto w = (z - std::complex<double>(0, 1)) /
                 (z + std::complex<double>(0, 1));
  // Ideal points land on the unit circle; renormalize rounding noise.
  const double n = std::abs(w);
  return {w.real() / n, w.imag() / n};
}

HPoint disk_to_halfplane(double u, double v) {
  const std::complex<double> w(u, v);
  const auto z = std::complex<double>(0, 1) * (1.0 + w) / (1.0 - w);
  return {z.real(), z.imag()};
}

BPoint disk_boundary_to_halfplane(double angle) {
  const std::complex<double> w = std::polar(1.0, angle);
  if (std::abs(w - 1.0) < kGeomTol) return IdealPoint::infinity();
  const auto z = std::complex<double>(0, 1) * (1.0 + w) / (1.0 - w);
  return IdealPoint::at(z.real());
}

double halfplane_abscissa_to_disk_angle(const IdealPoint& p) {
  if (p.infinite) return 0.0;
  const std::complex<double> z(p.x, 0.0);
  const auto w = (z - std::complex<double>(0, 1)) /
                 (z + std::complex<double>(0, 1));
  return std::atan2(w.imag(), w.real());
}

Horocycle transport_horocycle(const Mobius& m, const Horocycle& h) {
  const IdealPoint center = m.apply(h.center);
  // Deepest point of the horocycle (top of the circle / a point on the line).
  const std::complex<double> deep =
      h.center.infinite ? std::complex<double>(0.0, h.size)
                        : std::complex<double>(h.center.x, h.size);
  const auto img = m.apply(deep);
  Horocycle out;
  out.center = center;
  if (center.infinite) {
    out.size = img.imag();
  } else {
    const double dx = img.real() - center.x;
    out.size = (dx * dx + img.imag() * img.imag()) / img.imag();
  }
  return out;
}

std::vector<std::array<double, 2>> disk_arc_polyline(const BPoint& p,
                                                     const BPoint& q, int n) {
  const auto a = halfplane_to_disk(p);
  const auto b = halfplane_to_disk(q);
  std::vector<std::array<double, 2>> pts;
  pts.reserve(n + 1);
  const double cross = a[0] * b[1] - a[1] * b[0];
  if (std::abs(cross) < 1e-14) {
    // Through the disk center: the geodesic is a Euclidean diameter chord.
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      pts.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
    return pts;
  }
  // Circle orthogonal to the unit circle through a and b: |m|^2 = R^2 + 1.
  const double ra = 0.5 * (a[0] * a[0] + a[1] * a[1] + 1.0);
  const double rb = 0.5 * (b[0] * b[0] + b[1] * b[1] + 1.0);
  const double det = a[0] * b[1] - a[1] * b[0];
  const double mx = (ra * b[1] - rb * a[1]) / det;
  const double my = (rb * a[0] - ra * b[0]) / det;
  double ta = std::atan2(a[1] - my, a[0] - mx);
  double tb = std::atan2(b[1] - my, b[0] - mx);
  // Walk the short way (the orthogonal arc inside the disk).
  double dtheta = tb - ta;
  while (dtheta > kPi) dtheta -= 2.0 * kPi;
  while (dtheta < -kPi) dtheta += 2.0 * kPi;
  const double radius = std::hypot(a[0] - mx, a[1] - my);
  for (int k = 0; k <= n; ++k) {
    const double t = ta + dtheta * static_cast<double>(k) / n;
    pts.push_back({mx + radius * std::cos(t), my + radius * std::sin(t)});
  }
  // Pin the ends to the exact inputs.
  pts.front() = a;
  pts.back() = b;
  return pts;
}

}  // namespace scherk
