#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scherk/profiles.hpp"

using namespace scherk;

TEST_CASE("classification of the H=0 family") {
  const auto c1 = cmc_classify(0.0, 0.5);
  CHECK(c1.tag == CmcCase::H0SubUnit);
  CHECK(c1.endpoints.lo == 0.0);
  CHECK(c1.endpoints.hi == doctest::Approx(kPi));

  const auto c2 = cmc_classify(0.0, 1.0);
  CHECK(c2.tag == CmcCase::H0Unit);
  CHECK(c2.endpoints.hi == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(c2.endpoints.hi_kind == EndpointKind::PlusInfinity);

  const auto c3 = cmc_classify(0.0, 2.0);
  CHECK(c3.tag == CmcCase::H0SuperUnit);
  CHECK(c3.theta1 == doctest::Approx(std::asin(0.5)).epsilon(1e-13));
  CHECK(std::abs(c3.theta1 - kPi / 6.0) < 1e-12);
  CHECK(c3.endpoints.hi_kind == EndpointKind::InfiniteNormalDerivative);
}

TEST_CASE("classification thresholds for H < 1/2") {
  // H = 0.4: the A2 wall sits at k* = sqrt((1/0.8)^2 - 1) = 0.75.
  const double kstar = std::sqrt(1.0 / (0.8 * 0.8) - 1.0);
  CHECK(kstar == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(cmc_classify(0.4, 0.5).tag == CmcCase::A1Entire);
  CHECK(cmc_classify(0.4, 0.75).tag == CmcCase::A2Wall);
  CHECK(cmc_classify(0.4, 1.0).tag == CmcCase::A3Edge);
  const auto c = cmc_classify(0.4, 1.0);
  CHECK(c.theta1 < c.theta0);
  CHECK(c.theta0 < c.theta2);
  // The roots satisfy |g| = 1/(2H).
  auto g = [](double t, double k) { return std::cos(t) - k * std::sin(t); };
  CHECK(std::abs(g(c.theta1, 1.0) + 1.25) < 1e-11);
  CHECK(std::abs(g(c.theta2, 1.0) + 1.25) < 1e-11);
}

TEST_CASE("classification for H = 1/2 and H > 1/2") {
  const auto b1 = cmc_classify(0.5, 0.0);
  CHECK(b1.tag == CmcCase::B1);
  CHECK(b1.endpoints.lo == 0.0);
  CHECK(b1.endpoints.hi == doctest::Approx(kPi));

  const auto b2 = cmc_classify(0.5, 0.7);
  CHECK(b2.tag == CmcCase::B2);
  CHECK(b2.theta1 > 0.0);
  CHECK(b2.theta1 < b2.theta0);

  const auto cc = cmc_classify(0.8, 0.3);
  CHECK(cc.tag == CmcCase::C);
  CHECK(cc.endpoints.lo == doctest::Approx(cc.theta1));
  CHECK(cc.endpoints.hi == doctest::Approx(cc.theta2));
  CHECK(cc.theta2 < cc.theta0);
  CHECK(cc.endpoints.lo_kind == EndpointKind::InfiniteNormalDerivative);
}

TEST_CASE("negative inputs are rejected") {
  CHECK_THROWS_AS(cmc_classify(-0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(cmc_classify(0.1, -1.0), std::domain_error);
}

TEST_CASE("closed-form derivatives") {
  const CmcProfile unit(0.0, 1.0);
  CHECK(unit.derivative(kPi / 4.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  const CmcProfile b1(0.5, 0.0);
  CHECK(b1.derivative(kPi / 2.0) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(b1.derivative(kPi / 3.0) ==
        doctest::Approx(-std::cos(kPi / 3) / std::pow(std::sin(kPi / 3), 2))
            .epsilon(1e-12));
  CHECK_THROWS_AS(unit.derivative(kPi / 2.0 + 0.01), std::domain_error);
}

TEST_CASE("f' satisfies the first integral identity to 1e-12") {
  // f'/sqrt(1+sin^2 f'^2) = -2H cot(theta) + A for every case.
  const std::pair<double, double> cases[] = {
      {0.0, 0.5}, {0.0, 1.0}, {0.0, 2.0}, {0.4, 0.5}, {0.4, 0.75},
      {0.4, 1.0}, {0.5, 0.0}, {0.5, 0.7}, {0.8, 0.3},
  };
  for (const auto& [H, param] : cases) {
    const CmcProfile prof(H, param);
    const auto& ep = prof.classification().endpoints;
    const double span = ep.hi - ep.lo;
    for (int k = 1; k < 40; ++k) {
      const double theta = ep.lo + span * k / 40.0;
      if (theta <= ep.lo + 1e-6 || theta >= ep.hi - 1e-6) continue;
      const double fp = prof.derivative(theta);
      const double lhs =
          fp / std::sqrt(1.0 + std::sin(theta) * std::sin(theta) * fp * fp);
      const double rhs = prof.flux_quantity(theta);
      CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("centered differences of the flux quantity give 2H/sin^2") {
  const std::pair<double, double> cases[] = {
      {0.0, 0.7}, {0.4, 0.5}, {0.5, 0.0}, {0.8, 0.3}};
  for (const auto& [H, param] : cases) {
    const CmcProfile prof(H, param);
    const auto& ep = prof.classification().endpoints;
    const double h = 1e-5;
    for (int k = 2; k < 38; ++k) {
      const double theta = ep.lo + (ep.hi - ep.lo) * k / 40.0;
      const double d = (prof.flux_quantity(theta + h) -
                        prof.flux_quantity(theta - h)) /
                       (2.0 * h);
      const double want = 2.0 * H / std::pow(std::sin(theta), 2);
      CHECK(std::abs(d - want) < 1e-6 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("B1 closed form 1/sin + K") {
  // Anchor f(pi/2) = 1 gives K = 0.
  const CmcProfile b1(0.5, 0.0, kPi / 2.0, 1.0);
  CHECK(b1.value(kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b1.value(kPi / 6.0) == doctest::Approx(2.0).epsilon(1e-9));
  for (double theta = 0.3; theta < kPi - 0.3; theta += 0.17)
    CHECK(b1.value(theta) ==
          doctest::Approx(1.0 / std::sin(theta)).epsilon(1e-9));
}

TEST_CASE("H=0, A=1 values match ln|sec+tan| differences") {
  const CmcProfile unit(0.0, 1.0, 0.0, 0.0);
  auto closed = [](double t) {
    return std::log((1 + std::sin(t)) / std::cos(t));
  };
  const double diff = unit.value(kPi / 3.0) - unit.value(kPi / 4.0);
  CHECK(diff ==
        doctest::Approx(closed(kPi / 3) - closed(kPi / 4)).epsilon(1e-9));
  CHECK(closed(kPi / 3) == doctest::Approx(1.3169578969248166).epsilon(1e-12));
  CHECK(closed(kPi / 4) == doctest::Approx(0.8813735870195430).epsilon(1e-12));
  CHECK(diff == doctest::Approx(0.4355843099052736).epsilon(1e-8));
}

TEST_CASE("A=0 profile is constant") {
  const CmcProfile flat(0.0, 0.0);
  CHECK(flat.value(0.3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.value(2.8) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("values reproduce f' by centered differences") {
  for (const auto& [H, param] :
       {std::pair{0.0, 2.0}, {0.5, 0.0}, {0.4, 1.0}, {0.8, 0.3}}) {
    const CmcProfile prof(H, param);
    const auto& ep = prof.classification().endpoints;
    for (double frac : {0.3, 0.5, 0.7}) {
      const double theta = ep.lo + (ep.hi - ep.lo) * frac;
      const double h = 1e-6 * (ep.hi - ep.lo);
      const double fd =
          (prof.value(theta + h) - prof.value(theta - h)) / (2.0 * h);
      CHECK(std::abs(fd - prof.derivative(theta)) <
            1e-6 * (1.0 + std::abs(prof.derivative(theta))));
    }
  }
}

TEST_CASE("mirror symmetry of the H=0 family") {
  // Replacing theta by pi-theta flips the sign of A: differences mirror.
  const CmcProfile prof(0.0, 0.6);
  const double a = 0.4, b = 1.1;
  const double d1 = prof.value(b) - prof.value(a);
  const double d2 = prof.value(kPi - b) - prof.value(kPi - a);
  CHECK(d1 == doctest::Approx(-d2).epsilon(1e-9));
}

TEST_CASE("singular endpoints keep finite values with converged quadrature") {
  const CmcProfile a3(0.4, 1.0);  // domain (0, theta1), sqrt-singular at hi
  const auto& ep = a3.classification().endpoints;
  const auto q = a3.value_checked(ep.hi);
  CHECK(q.converged);
  CHECK(std::abs(q.value) < 1e-11);  // anchored there
  const auto q2 = a3.value_checked(ep.hi - 1e-7);
  CHECK(q2.converged);
  CHECK(std::isfinite(q2.value));
}

TEST_CASE("A1 profiles blow up near the wall as k approaches k*") {
  const double H = 0.4;
  const double kstar = 0.75;
  double prev = -1e300;
  for (double k : {0.5, 0.7, 0.745, 0.7499}) {
    const CmcProfile prof(H, k);
    const double theta0 = prof.classification().theta0;
    const double v = prof.value(theta0);  // inside the A1 domain (0, pi)
    CHECK(v > prev);
    prev = v;
  }
  const CmcProfile close(H, kstar - 1e-7);
  CHECK(close.value(close.classification().theta0) > prev);
}

TEST_CASE("barrier closed form at theta0 = pi/2") {
  BarrierParams b;
  CHECK(barrier_value(b, {3, 4}) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  // Data 0 on the ideal arc {theta = 0}.
  CHECK(std::abs(barrier_value(b, {1.0, 1e-9})) < 1e-8);
  // Constant along equidistants: independent of phi at fixed theta.
  const CmcProfile unit(0.0, 1.0, 0.0, 0.0);
  for (double theta : {0.3, 0.7, 1.2}) {
    const double expect = std::log((1 + std::sin(theta)) / std::cos(theta));
    for (double phi : {-1.0, 0.0, 2.0}) {
      const double r = std::exp(phi);
      const HPoint p{r * std::cos(theta), r * std::sin(theta)};
      CHECK(barrier_value(b, p) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(unit.value(theta) == doctest::Approx(expect).epsilon(1e-9));
  }
  b.offset = 2.5;
  CHECK(barrier_value(b, {3, 4}) ==
        doctest::Approx(std::log(3.0) + 2.5).epsilon(1e-12));
  CHECK_THROWS_AS(barrier_value(BarrierParams{}, HPoint{-1, 1}),
                  std::domain_error);
}

TEST_CASE("barriers below pi/2 are the A = 1/sin(theta0) profiles") {
  const double theta0 = 1.1;  // < pi/2
  const auto c = cmc_classify(0.0, 1.0 / std::sin(theta0));
  CHECK(c.tag == CmcCase::H0SuperUnit);
  CHECK(c.theta1 == doctest::Approx(theta0).epsilon(1e-12));
  BarrierParams b;
  b.theta0 = theta0;
  const HPoint p{std::cos(0.9), std::sin(0.9)};
  const CmcProfile prof(0.0, 1.0 / std::sin(theta0), 0.0, 0.0);
  CHECK(barrier_value(b, p) == doctest::Approx(prof.value(0.9)).epsilon(1e-9));
  // Finite constant value on {theta = theta0} itself.
  const HPoint edge{std::cos(theta0), std::sin(theta0)};
  CHECK(std::isfinite(barrier_value(b, edge)));
}

TEST_CASE("profile graphs are translation invariant in phi") {
  ProfileGraph u{PolarChart::centered_at(IdealPoint::at(0.0)),
                 std::make_shared<CmcProfile>(0.0, 1.0, 0.0, 0.0), 0.25};
  for (double theta : {0.4, 1.0}) {
    const double v0 = u({std::cos(theta), std::sin(theta)});
    for (double phi : {-2.0, 1.0, 3.0}) {
      const double r = std::exp(phi);
      CHECK(u({r * std::cos(theta), r * std::sin(theta)}) ==
            doctest::Approx(v0).epsilon(1e-10));
    }
  }
}

TEST_CASE("flux integrand saturates on the singular geodesic") {
  // For h_{pi/2} the quantity sin(theta) f'/W tends to 1 at theta = pi/2.
  const CmcProfile unit(0.0, 1.0);
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    const double theta = kPi / 2.0 - delta;
    const double fp = unit.derivative(theta);
    const double w = std::sqrt(1.0 + std::pow(std::sin(theta) * fp, 2));
    const double integrand = std::sin(theta) * fp / w;
    CHECK(integrand > 1.0 - 3.0 * delta);
    CHECK(integrand <= 1.0 + 1e-12);
  }
}
