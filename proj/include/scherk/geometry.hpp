#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "scherk/numerics.hpp"

namespace scherk {

// Point of H^2 in the half-plane model, y > 0.
struct HPoint {
  double x = 0.0;
  double y = 1.0;
};

// Point of the ideal boundary: a finite abscissa on {y=0} or infinity.
struct IdealPoint {
  double x = 0.0;
  bool infinite = false;

  static IdealPoint infinity() { return {0.0, true}; }
  static IdealPoint at(double x) { return {x, false}; }
};

using BPoint = std::variant<HPoint, IdealPoint>;

bool is_ideal(const BPoint& p);
bool same_point(const BPoint& a, const BPoint& b, double tol = kGeomTol);

// Real Moebius map z -> (az+b)/(cz+d) with ad-bc > 0 (isometry of H^2).
struct Mobius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  std::complex<double> apply(std::complex<double> z) const;
  std::complex<double> derivative(std::complex<double> z) const;
  HPoint apply(HPoint p) const;
  IdealPoint apply(IdealPoint p) const;
  BPoint apply(BPoint p) const;
  Mobius inverse() const;
  Mobius after(const Mobius& first) const;  // this ∘ first
};

// Geodesic through two distinct points; cached Euclidean representation is a
// vertical line {x=c} or a semicircle of center (c,0) and radius r.
//
// Parametrization: vertical lines use s = ln y (unit speed, increasing y);
// semicircles use the polar angle t in (0,pi) at the center, with the hidden
// arc-length element dt/sin t.
struct Geodesic {
  BPoint p, q;
  bool vertical = false;
  double c = 0.0;
  double r = 0.0;

  HPoint point_at(double t) const;
  std::array<double, 2> velocity_at(double t) const;  // Euclidean d/dt
  double param_of(const HPoint& pt) const;
  // Parameter of an endpoint; ideal endpoints map to the open extremes
  // (-inf/+inf for vertical, 0/pi for semicircles).
  double param_of_end(const BPoint& pt) const;
  // Closed-form hyperbolic length between two parameters.
  double length_between(double t0, double t1) const;
  bool has_ideal_end(const IdealPoint& ip, double tol = kGeomTol) const;
};

Geodesic geodesic_between(const BPoint& p, const BPoint& q);

double hyperbolic_distance(const HPoint& p, const HPoint& q);

// Parametrized path with explicit velocity (for arc-length quadrature).
struct Curve {
  std::function<HPoint(double)> pos;
  std::function<std::array<double, 2>(double)> vel;
};

// Hyperbolic length of the curve over [t0,t1]: adaptive quadrature of
// |gamma'|/y. Throws std::domain_error if the curve leaves the open
// half-plane inside the interval.
QuadResult arc_length(const Curve& c, double t0, double t1,
                      double abs_tol = 1e-10);

// Horocycle: for a finite center, the Euclidean circle tangent to {y=0} at
// the center with diameter `size`; for the center at infinity, the line
// {y = size}. Shrinking `size` shrinks the horodisk.
struct Horocycle {
  IdealPoint center;
  double size = 1.0;

  bool contains(const HPoint& p) const;  // strictly inside the horodisk
};

// Unique intersection of h with a geodesic ending at h.center. For a
// geodesic not ending there, the degenerate tangency case (semicircle of
// radius equal to the height of a horocycle at infinity) returns the top
// point; anything else is a domain error.
HPoint horocycle_geodesic_intersection(const Horocycle& h, const Geodesic& g);

// Distance between the geodesic {theta=pi/2} and its equidistant
// {theta=theta0} in polar coordinates: |ln tan(theta0/2)|.
double equidistant_distance(double theta0);

// Length of g minus its intersections with the horodisks at its ideal ends.
// Horocycles must be centered at the corresponding ideal endpoints; finite
// endpoints need no horocycle. Throws std::domain_error when the horodisks
// swallow the whole geodesic.
double truncated_side_length(const Geodesic& g,
                             const std::optional<Horocycle>& at_p,
                             const std::optional<Horocycle>& at_q);

// Conformal polar coordinates (phi, theta) centered at an ideal point p:
// the normalizing Moebius map sends p to the half-plane origin, after which
// (phi,theta) -> e^phi (cos theta, sin theta).
struct PolarChart {
  IdealPoint base;
  Mobius to_origin;  // sends base -> 0

  static PolarChart centered_at(const IdealPoint& p);
  // Additionally sends q to polar coordinates (0, pi/2), i.e. to (0,1).
  static PolarChart centered_at(const IdealPoint& p, const HPoint& q);

  std::pair<double, double> polar_from_halfplane(const HPoint& p) const;
  HPoint polar_to_halfplane(double phi, double theta) const;

  // Pullback of a half-plane position/velocity to (phi,theta) coordinates.
  void pull_back(std::complex<double> z, std::complex<double> dz,
                 double& phi, double& theta, double& dphi,
                 double& dtheta) const;
};

// Fixed Cayley map between the Poincare disk and the half-plane:
// z = i(1+w)/(1-w), w = (z-i)/(z+i).
std::array<double, 2> halfplane_to_disk(const HPoint& p);
std::array<double, 2> halfplane_to_disk(const BPoint& p);
HPoint disk_to_halfplane(double u, double v);
BPoint disk_boundary_to_halfplane(double angle);
double halfplane_abscissa_to_disk_angle(const IdealPoint& p);

// Exact image of a horocycle under a Moebius map (tangency point plus the
// deepest point determine the image circle).
Horocycle transport_horocycle(const Mobius& m, const Horocycle& h);

// Disk-model polyline of a geodesic between two (possibly ideal) points,
// sampled at n+1 points; used by containment and simplicity tests.
std::vector<std::array<double, 2>> disk_arc_polyline(const BPoint& p,
                                                     const BPoint& q, int n);

}  // namespace scherk
