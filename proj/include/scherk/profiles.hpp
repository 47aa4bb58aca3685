#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scherk/geometry.hpp"

namespace scherk {

// Case tags of the translation-invariant cmc profile family. The H=0 family
// is split on A vs 1; for H>0 the parameter is k with A = 2Hk.
enum class CmcCase {
  H0SubUnit,    // H=0, A<1: entire on (0,pi)
  H0Unit,      // H=0, A=1: (0,pi/2), +inf at pi/2
  H0SuperUnit,  // H=0, A>1: (0, arcsin(1/A)), infinite normal derivative
  A1Entire,     // H<1/2, k<k*: entire, +inf at both ends
  A2Wall,       // H<1/2, k=k*: (0,theta0), +inf at both ends
  A3Edge,       // H<1/2, k>k*: (0,theta1), infinite normal derivative
  B1,           // H=1/2, k=0: f = 1/sin + K on (0,pi)
  B2,           // H=1/2, k>0: (0,theta1)
  C             // H>1/2: (theta1,theta2)
};

std::string cmc_case_name(CmcCase c);

enum class EndpointKind {
  FiniteValue,
  PlusInfinity,
  MinusInfinity,
  InfiniteNormalDerivative  // finite value, infinite normal derivative
};

struct ProfileEndpoints {
  double lo = 0.0, hi = 0.0;
  EndpointKind lo_kind = EndpointKind::FiniteValue;
  EndpointKind hi_kind = EndpointKind::FiniteValue;
};

struct CmcClassification {
  CmcCase tag;
  ProfileEndpoints endpoints;
  double theta0 = 0.0;  // critical angle pi + arctan(-k) (H>0 only)
  double theta1 = 0.0;  // lower |g|=1/(2H) root / arcsin(1/A), when present
  double theta2 = 0.0;  // upper root, when present
};

// Splits (H, param) into the appendix cases; param is A for H=0 and k for
// H>0. Throws std::domain_error on negative inputs.
CmcClassification cmc_classify(double H, double param);

// One branch of a translation-invariant cmc profile f(theta), evaluated from
// the closed-form f' and quadrature of f anchored per case: at a finite
// endpoint when one exists, else at the domain midpoint (value 0 unless a
// custom anchor is supplied).
class CmcProfile {
 public:
  CmcProfile(double H, double param);
  CmcProfile(double H, double param, double anchor_theta, double anchor_value);

  double H() const { return h_; }
  double param() const { return param_; }
  double A() const { return h_ == 0.0 ? param_ : 2.0 * h_ * param_; }
  const CmcClassification& classification() const { return cls_; }

  // Exact closed-form f'(theta); theta strictly inside the domain.
  double derivative(double theta) const;
  // The flux quantity f'/sqrt(1+sin^2 f'^2) = -2H cot(theta) + A, finite on
  // the closed domain.
  double flux_quantity(double theta) const;

  double value(double theta) const;
  QuadResult value_checked(double theta) const;

  struct TableRow {
    double theta, f, fprime;
  };
  const std::vector<TableRow>& table() const { return table_; }

 private:
  void build_table();
  QuadResult integrate(double from, double to) const;
  // 1 - A^2 sin^2(theta) (H=0) or 1 - 4H^2 g^2 (H>0), evaluated in factored
  // form around the classified roots so the sqrt stays cancellation-free.
  double radicand(double theta) const;
  // f' at distance `offset` from a sqrt-singular endpoint, with the singular
  // factor computed from the offset itself (no cancellation).
  double derivative_from_offset(double offset, bool at_hi) const;

  double h_, param_;
  CmcClassification cls_;
  double anchor_theta_, anchor_value_;
  std::vector<TableRow> table_;
};

// Graph u(p) = f(theta(p)) in a polar chart, plus an additive offset.
struct ProfileGraph {
  PolarChart chart;
  std::shared_ptr<const CmcProfile> profile;
  double offset = 0.0;

  double operator()(const HPoint& p) const;
};

// Sa Earp / Abresch barrier h_{theta0} on {0 < theta < theta0}, vanishing on
// the ideal boundary arc {theta=0}.
struct BarrierParams {
  double theta0 = 0.5 * kPi;  // in (0, pi/2]
  PolarChart chart = PolarChart::centered_at(IdealPoint::at(0.0));
  double offset = 0.0;
};

// For theta0 = pi/2 this is ln((sqrt(x^2+y^2)+y)/x) in chart coordinates;
// for theta0 < pi/2 it is the H=0, A=1/sin(theta0) profile anchored at 0.
double barrier_value(const BarrierParams& b, const HPoint& p);

}  // namespace scherk
