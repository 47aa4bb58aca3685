#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scherk/geometry.hpp"

using namespace scherk;

namespace {
const double e = std::exp(1.0);
}

TEST_CASE("geodesic between two ideal points") {
  const Geodesic g = geodesic_between(IdealPoint::at(-1.0), IdealPoint::at(1.0));
  CHECK(!g.vertical);
  CHECK(g.c == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("geodesic through points with equal abscissae is vertical") {
  const Geodesic g = geodesic_between(BPoint(HPoint{0, 1}), BPoint(HPoint{0, e}));
  CHECK(g.vertical);
  CHECK(g.c == doctest::Approx(0.0));
}

TEST_CASE("geodesic through (0,1) and (3,2)") {
  // Oracle: c solves (0-c)^2 + 1 = (3-c)^2 + 4, then r^2 = c^2 + 1.
  const Geodesic g = geodesic_between(BPoint(HPoint{0, 1}), BPoint(HPoint{3, 2}));
  CHECK(!g.vertical);
  const double c = g.c, r = g.r;
  CHECK(std::abs((0 - c) * (0 - c) + 1 - r * r) < 1e-12);
  CHECK(std::abs((3 - c) * (3 - c) + 4 - r * r) < 1e-12);
}

TEST_CASE("coincident points are rejected") {
  CHECK_THROWS_AS(geodesic_between(BPoint(HPoint{1, 1}), BPoint(HPoint{1, 1})),
                  std::domain_error);
  CHECK_THROWS_AS(geodesic_between(IdealPoint::infinity(), IdealPoint::infinity()),
                  std::domain_error);
}

TEST_CASE("hyperbolic distance basics") {
  CHECK(hyperbolic_distance({0, 1}, {0, e}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hyperbolic_distance({0, 1}, {0, 1}) == 0.0);
  // Symmetry and triangle inequality on a few points.
  const HPoint a{0, 1}, b{1, 2}, c{-1, 0.5};
  CHECK(hyperbolic_distance(a, b) == doctest::Approx(hyperbolic_distance(b, a)));
  CHECK(hyperbolic_distance(a, c) <=
        hyperbolic_distance(a, b) + hyperbolic_distance(b, c) + 1e-12);
}

TEST_CASE("distance agrees with quadrature arc length along the geodesic") {
  const HPoint p{0, 1}, q{1, 1};
  const Geodesic g = geodesic_between(BPoint(p), BPoint(q));
  const double t0 = g.param_of(p), t1 = g.param_of(q);
  Curve curve{[&](double t) { return g.point_at(t); },
              [&](double t) { return g.velocity_at(t); }};
  const QuadResult len = arc_length(curve, std::min(t0, t1), std::max(t0, t1));
  CHECK(len.converged);
  CHECK(hyperbolic_distance(p, q) == doctest::Approx(len.value).epsilon(1e-9));
}

TEST_CASE("arc length closed forms") {
  // Vertical segment from y=1 to y=e.
  Curve vertical{[](double t) { return HPoint{0, t}; },
                 [](double) { return std::array<double, 2>{0, 1}; }};
  CHECK(arc_length(vertical, 1.0, e).value == doctest::Approx(1.0).epsilon(1e-10));
  // Horocycle arc y=1, x in [0,2].
  Curve horo{[](double t) { return HPoint{t, 1}; },
             [](double) { return std::array<double, 2>{1, 0}; }};
  CHECK(arc_length(horo, 0.0, 2.0).value == doctest::Approx(2.0).epsilon(1e-10));
  // Unit semicircle between polar angles pi/3 and 2pi/3: ln tan differences.
  Curve circ{[](double t) { return HPoint{std::cos(t), std::sin(t)}; },
             [](double t) {
               return std::array<double, 2>{-std::sin(t), std::cos(t)};
             }};
  const double expect = std::log(std::tan(kPi / 3.0)) -
                        std::log(std::tan(kPi / 6.0));  // = ln 3
  CHECK(arc_length(circ, kPi / 3.0, 2.0 * kPi / 3.0).value ==
        doctest::Approx(expect).epsilon(1e-9));
  CHECK(expect == doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("arc length flags the ideal boundary") {
  Curve bad{[](double t) { return HPoint{t, 1.0 - t}; },
            [](double) { return std::array<double, 2>{1, -1}; }};
  CHECK_THROWS_AS(arc_length(bad, 0.0, 1.0), std::domain_error);
}

TEST_CASE("polar chart at the origin") {
  const PolarChart chart = PolarChart::centered_at(IdealPoint::at(0.0));
  // (phi,theta) = (0, pi/2) -> (0,1).
  const HPoint p = chart.polar_to_halfplane(0.0, kPi / 2.0);
  CHECK(p.x == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p.y == doctest::Approx(1.0).epsilon(1e-14));
  const HPoint q = chart.polar_to_halfplane(0.0, kPi / 4.0);
  CHECK(q.x == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(q.y == doctest::Approx(std::sqrt(2.0) / 2.0));
  // (3,4): e^phi = 5, theta = atan2(4,3); round trip.
  const auto [phi, theta] = chart.polar_from_halfplane({3, 4});
  CHECK(std::exp(phi) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(theta == doctest::Approx(std::atan2(4.0, 3.0)).epsilon(1e-12));
  const HPoint back = chart.polar_to_halfplane(phi, theta);
  CHECK(back.x == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(back.y == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("polar chart round trip on random points") {
  SplitMix64 rng(7);
  for (const auto& base :
       {IdealPoint::at(0.0), IdealPoint::at(-2.5), IdealPoint::infinity()}) {
    const PolarChart chart = PolarChart::centered_at(base);
    for (int k = 0; k < 1000; ++k) {
      const HPoint p{rng.uniform(-4, 4), rng.uniform(0.05, 5)};
      const auto [phi, theta] = chart.polar_from_halfplane(p);
      const HPoint q = chart.polar_to_halfplane(phi, theta);
      CHECK(std::abs(p.x - q.x) < 1e-10 * (1 + std::abs(p.x)));
      CHECK(std::abs(p.y - q.y) < 1e-10 * (1 + p.y));
    }
  }
}

TEST_CASE("normalized polar chart sends the reference point to (0,pi/2)") {
  const PolarChart chart =
      PolarChart::centered_at(IdealPoint::at(1.5), HPoint{0.3, 2.0});
  const auto [phi, theta] = chart.polar_from_halfplane({0.3, 2.0});
  CHECK(std::abs(phi) < 1e-12);
  CHECK(theta == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("chart conformality: coordinate steps have length ~ h/sin(theta)") {
  const PolarChart chart = PolarChart::centered_at(IdealPoint::at(0.0));
  SplitMix64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const double phi = rng.uniform(-1, 1);
    const double theta = rng.uniform(0.4, kPi - 0.4);
    const double h = 1e-4;
    const HPoint p0 = chart.polar_to_halfplane(phi, theta);
    const HPoint p1 = chart.polar_to_halfplane(phi + h, theta);
    const HPoint p2 = chart.polar_to_halfplane(phi, theta + h);
    const double expected = h / std::sin(theta);
    CHECK(hyperbolic_distance(p0, p1) ==
          doctest::Approx(expected).epsilon(1e-6));
    CHECK(hyperbolic_distance(p0, p2) ==
          doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("distance is invariant under the chart's normalizing map") {
  const PolarChart chart =
      PolarChart::centered_at(IdealPoint::at(-1.0), HPoint{2.0, 0.7});
  SplitMix64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const HPoint p{rng.uniform(-3, 3), rng.uniform(0.1, 4)};
    const HPoint q{rng.uniform(-3, 3), rng.uniform(0.1, 4)};
    const double d0 = hyperbolic_distance(p, q);
    const double d1 = hyperbolic_distance(chart.to_origin.apply(p),
                                          chart.to_origin.apply(q));
    CHECK(std::abs(d0 - d1) < 1e-9 * (1 + d0));
  }
}

TEST_CASE("equidistant distance") {
  CHECK(equidistant_distance(kPi / 2.0) == doctest::Approx(0.0));
  // Closed form ln cot(pi/8), cross-checked by quadrature of 1/sin.
  const double closed = std::log(1.0 / std::tan(kPi / 8.0));
  CHECK(equidistant_distance(kPi / 4.0) ==
        doctest::Approx(closed).epsilon(1e-13));
  CHECK(closed == doctest::Approx(0.881374).epsilon(1e-6));
  const QuadResult q = adaptive_simpson(
      [](double t) { return 1.0 / std::sin(t); }, kPi / 4.0, kPi / 2.0);
  CHECK(equidistant_distance(kPi / 4.0) ==
        doctest::Approx(q.value).epsilon(1e-10));
  // Symmetry theta <-> pi - theta.
  CHECK(equidistant_distance(3.0 * kPi / 4.0) ==
        doctest::Approx(equidistant_distance(kPi / 4.0)).epsilon(1e-13));
  CHECK_THROWS_AS(equidistant_distance(0.0), std::overflow_error);
  CHECK_THROWS_AS(equidistant_distance(kPi), std::overflow_error);
}

TEST_CASE("equidistant closed form vs quadrature on a sweep") {
  for (double theta0 = 0.1; theta0 < kPi - 0.05; theta0 += 0.13) {
    const double lo = std::min(theta0, kPi / 2.0);
    const double hi = std::max(theta0, kPi / 2.0);
    const QuadResult q = adaptive_simpson(
        [](double t) { return 1.0 / std::sin(t); }, lo, hi);
    CHECK(std::abs(equidistant_distance(theta0) - q.value) < 1e-10);
  }
}

TEST_CASE("horocycle-geodesic intersections") {
  // Horizontal horocycle against a vertical geodesic.
  const Geodesic vert = geodesic_between(IdealPoint::at(0.0),
                                         IdealPoint::infinity());
  const HPoint p1 = horocycle_geodesic_intersection(
      {IdealPoint::infinity(), 2.0}, vert);
  CHECK(p1.x == doctest::Approx(0.0));
  CHECK(p1.y == doctest::Approx(2.0));
  // Horocycle of diameter 1 at 0 meets the vertical at height 1.
  const HPoint p2 = horocycle_geodesic_intersection({IdealPoint::at(0.0), 1.0},
                                                    vert);
  CHECK(p2.y == doctest::Approx(1.0).epsilon(1e-12));
  // Tangency of the line y=1 with the unit semicircle; otherwise an error.
  const Geodesic semi = geodesic_between(IdealPoint::at(-1.0),
                                         IdealPoint::at(1.0));
  const HPoint p3 = horocycle_geodesic_intersection(
      {IdealPoint::infinity(), 1.0}, semi);
  CHECK(p3.x == doctest::Approx(0.0));
  CHECK(p3.y == doctest::Approx(1.0));
  CHECK_THROWS_AS(horocycle_geodesic_intersection(
                      {IdealPoint::infinity(), 0.5}, semi),
                  std::domain_error);
  // Intersection points land on the horocycle and on the geodesic.
  const Geodesic g = geodesic_between(IdealPoint::at(2.0), IdealPoint::at(7.0));
  const Horocycle h{IdealPoint::at(2.0), 0.8};
  const HPoint q = horocycle_geodesic_intersection(h, g);
  CHECK(std::abs(std::hypot(q.x - g.c, q.y) - g.r) < 1e-12);
  const double dx = q.x - 2.0, dy = q.y - 0.4;
  CHECK(std::abs(std::hypot(dx, dy) - 0.4) < 1e-12);
}

TEST_CASE("truncated side lengths") {
  const Geodesic vert = geodesic_between(IdealPoint::at(0.0),
                                         IdealPoint::infinity());
  // Horocycles meeting exactly at (0,1): empty segment.
  CHECK_THROWS_AS(truncated_side_length(vert, Horocycle{IdealPoint::at(0.0), 1.0},
                                        Horocycle{IdealPoint::infinity(), 1.0}),
                  std::domain_error);
  // Raising the top horocycle to y=e leaves length 1.
  CHECK(truncated_side_length(vert, Horocycle{IdealPoint::at(0.0), 1.0},
                              Horocycle{IdealPoint::infinity(), e}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Both endpoints finite: plain distance.
  const HPoint a{0, 1}, b{2, 2};
  const Geodesic g = geodesic_between(BPoint(a), BPoint(b));
  CHECK(truncated_side_length(g, std::nullopt, std::nullopt) ==
        doctest::Approx(hyperbolic_distance(a, b)).epsilon(1e-12));
}

TEST_CASE("truncated length grows strictly as horocycles shrink") {
  SplitMix64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const double a = rng.uniform(-2, 0), b = rng.uniform(0.5, 3);
    const Geodesic g = geodesic_between(IdealPoint::at(a), IdealPoint::at(b));
    const double sa = rng.uniform(0.05, 0.3), sb = rng.uniform(0.05, 0.3);
    const double l1 = truncated_side_length(g, Horocycle{IdealPoint::at(a), sa},
                                            Horocycle{IdealPoint::at(b), sb});
    const double l2 = truncated_side_length(
        g, Horocycle{IdealPoint::at(a), 0.5 * sa},
        Horocycle{IdealPoint::at(b), 0.5 * sb});
    CHECK(l2 > l1);
  }
}

TEST_CASE("horocycle transport under Moebius maps is exact") {
  const Mobius m{2.0, 1.0, 1.0, 1.0};  // det = 1
  const Horocycle h{IdealPoint::at(0.5), 0.3};
  const Horocycle img = transport_horocycle(m, h);
  // The image circle must contain the images of horocycle points.
  for (double t : {0.3, 1.2, 2.5, 4.0}) {
    const HPoint on{0.5 + 0.15 * std::sin(t), 0.15 - 0.15 * std::cos(t)};
    if (on.y <= 0) continue;
    const HPoint w = m.apply(on);
    const double dx = w.x - img.center.x, dy = w.y - 0.5 * img.size;
    CHECK(std::abs(std::hypot(dx, dy) - 0.5 * img.size) < 1e-12);
  }
}

TEST_CASE("disk conversions are inverse to each other") {
  SplitMix64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const HPoint p{rng.uniform(-3, 3), rng.uniform(0.05, 5)};
    const auto w = halfplane_to_disk(p);
    CHECK(w[0] * w[0] + w[1] * w[1] < 1.0);
    const HPoint q = disk_to_halfplane(w[0], w[1]);
    CHECK(std::abs(p.x - q.x) < 1e-10);
    CHECK(std::abs(p.y - q.y) < 1e-10);
  }
}
