#include "scherk/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scherk {

namespace {

double g_of(double theta, double k) {
  return std::cos(theta) - k * std::sin(theta);
}

bool value_finite_kind(EndpointKind k) {
  return k == EndpointKind::FiniteValue ||
         k == EndpointKind::InfiniteNormalDerivative;
}

}  // namespace

std::string cmc_case_name(CmcCase c) {
  switch (c) {
    case CmcCase::H0SubUnit: return "H0-A<1";
    case CmcCase::H0Unit: return "H0-A=1";
    case CmcCase::H0SuperUnit: return "H0-A>1";
    case CmcCase::A1Entire: return "A1-entire";
    case CmcCase::A2Wall: return "A2-wall";
    case CmcCase::A3Edge: return "A3-edge";
    case CmcCase::B1: return "B1";
    case CmcCase::B2: return "B2";
    case CmcCase::C: return "C";
  }
  return "?";
}

CmcClassification cmc_classify(double H, double param) {
  if (H < 0.0 || param < 0.0)
    throw std::domain_error("cmc_classify: H and the parameter must be >= 0");
  CmcClassification cl{};

  if (H == 0.0) {
    const double A = param;
    if (std::abs(A - 1.0) <= 1e-14) {
      cl.tag = CmcCase::H0Unit;
      cl.endpoints = {0.0, 0.5 * kPi, EndpointKind::FiniteValue,
                      EndpointKind::PlusInfinity};
      cl.theta1 = 0.5 * kPi;
    } else if (A < 1.0) {
      cl.tag = CmcCase::H0SubUnit;
      cl.endpoints = {0.0, kPi, EndpointKind::FiniteValue,
                      EndpointKind::FiniteValue};
    } else {
      cl.tag = CmcCase::H0SuperUnit;
      cl.theta1 = std::asin(1.0 / A);
      cl.endpoints = {0.0, cl.theta1, EndpointKind::FiniteValue,
                      EndpointKind::InfiniteNormalDerivative};
    }
    return cl;
  }

  const double k = param;
  const double theta0 = kPi - std::atan(k);  // pi + arctan(-k)
  cl.theta0 = theta0;
  auto root_on = [&](double target, double lo, double hi) {
    double r = bisect([&](double t) { return g_of(t, k) - target; }, lo, hi,
                      1e-12);
    for (int it = 0; it < 4; ++it) {  // polish to machine precision
      const double gp = -std::sin(r) - k * std::cos(r);
      if (std::abs(gp) < 1e-14) break;
      r -= (g_of(r, k) - target) / gp;
    }
    return r;
  };

  if (H < 0.5) {
    const double inv = 1.0 / (2.0 * H);
    const double kstar = std::sqrt(inv * inv - 1.0);
    if (std::abs(k - kstar) <= 1e-12 * (1.0 + kstar)) {
      cl.tag = CmcCase::A2Wall;
      cl.endpoints = {0.0, theta0, EndpointKind::PlusInfinity,
                      EndpointKind::PlusInfinity};
    } else if (k < kstar) {
      cl.tag = CmcCase::A1Entire;
      cl.endpoints = {0.0, kPi, EndpointKind::PlusInfinity,
                      EndpointKind::PlusInfinity};
    } else {
      cl.tag = CmcCase::A3Edge;
      cl.theta1 = root_on(-inv, 1e-15, theta0);
      cl.theta2 = root_on(-inv, theta0, kPi - 1e-15);
      cl.endpoints = {0.0, cl.theta1, EndpointKind::PlusInfinity,
                      EndpointKind::InfiniteNormalDerivative};
    }
    return cl;
  }

  if (std::abs(H - 0.5) <= 1e-14) {
    if (k <= 1e-14) {
      cl.tag = CmcCase::B1;
      cl.endpoints = {0.0, kPi, EndpointKind::PlusInfinity,
                      EndpointKind::PlusInfinity};
    } else {
      cl.tag = CmcCase::B2;
      cl.theta1 = root_on(-1.0, 1e-15, theta0);
      cl.endpoints = {0.0, cl.theta1, EndpointKind::PlusInfinity,
                      EndpointKind::InfiniteNormalDerivative};
    }
    return cl;
  }

  const double inv = 1.0 / (2.0 * H);  // < 1
  cl.tag = CmcCase::C;
  cl.theta1 = root_on(inv, 1e-15, theta0);
  cl.theta2 = root_on(-inv, cl.theta1, theta0);
  cl.endpoints = {cl.theta1, cl.theta2,
                  EndpointKind::InfiniteNormalDerivative,
                  EndpointKind::InfiniteNormalDerivative};
  return cl;
}

CmcProfile::CmcProfile(double H, double param)
    : h_(H), param_(param), cls_(cmc_classify(H, param)) {
  const auto& ep = cls_.endpoints;
  if (value_finite_kind(ep.lo_kind)) {
    anchor_theta_ = ep.lo;
    anchor_value_ = 0.0;
  } else if (value_finite_kind(ep.hi_kind)) {
    anchor_theta_ = ep.hi;
    anchor_value_ = 0.0;
  } else {
    anchor_theta_ = 0.5 * (ep.lo + ep.hi);
    anchor_value_ = 0.0;
  }
  build_table();
}

CmcProfile::CmcProfile(double H, double param, double anchor_theta,
                       double anchor_value)
    : h_(H), param_(param), cls_(cmc_classify(H, param)),
      anchor_theta_(anchor_theta), anchor_value_(anchor_value) {
  if (anchor_theta_ < cls_.endpoints.lo || anchor_theta_ > cls_.endpoints.hi)
    throw std::domain_error("CmcProfile: anchor outside the profile domain");
  build_table();
}

double CmcProfile::derivative(double theta) const {
  const auto& ep = cls_.endpoints;
  if (!(theta > ep.lo && theta < ep.hi)) {
    // The formula stays regular at plain finite-value endpoints only.
    const bool lo_ok = std::abs(theta - ep.lo) <= 1e-15 &&
                       ep.lo_kind == EndpointKind::FiniteValue;
    const bool hi_ok = std::abs(theta - ep.hi) <= 1e-15 &&
                       ep.hi_kind == EndpointKind::FiniteValue;
    if (!lo_ok && !hi_ok)
      throw std::domain_error("CmcProfile::derivative: theta outside domain");
  }
  const double rad = std::max(radicand(theta), 1e-300);
  if (h_ == 0.0) return param_ / std::sqrt(rad);
  const double g = g_of(theta, param_);
  return -2.0 * h_ * g / (std::sin(theta) * std::sqrt(rad));
}

double CmcProfile::radicand(double theta) const {
  if (h_ == 0.0) {
    const double A = param_;
    if (std::abs(A - 1.0) <= 1e-14) {
      const double c = std::cos(theta);
      return c * c;
    }
    if (A > 1.0)
      return A * A * std::sin(cls_.theta1 - theta) *
             std::sin(cls_.theta1 + theta);
    const double s = std::sin(theta);
    return 1.0 - A * A * s * s;
  }
  const double H = h_, k = param_;
  if (std::abs(H - 0.5) <= 1e-14 && k <= 1e-14) {
    const double s = std::sin(theta);
    return s * s;  // B1: 1 - cos^2
  }
  const double sq = std::sqrt(1.0 + k * k);
  const double phi = std::atan(k);
  // 1 - 2Hg vanishes at a root of g = +1/(2H) (case C only).
  double f_minus;
  if (cls_.tag == CmcCase::C) {
    const double tr = cls_.theta1;
    f_minus = 4.0 * H * sq * std::sin(0.5 * (theta - tr)) *
              std::sin(0.5 * (theta + tr) + phi);
  } else {
    f_minus = 1.0 - 2.0 * H * g_of(theta, k);
  }
  // 1 + 2Hg vanishes at the roots of g = -1/(2H).
  double root = std::numeric_limits<double>::quiet_NaN();
  switch (cls_.tag) {
    case CmcCase::A3Edge:
      root = std::abs(theta - cls_.theta1) <= std::abs(theta - cls_.theta2)
                 ? cls_.theta1
                 : cls_.theta2;
      break;
    case CmcCase::B2:
      root = cls_.theta1;
      break;
    case CmcCase::C:
      root = cls_.theta2;
      break;
    case CmcCase::A2Wall:
      root = cls_.theta0;  // double root
      break;
    default:
      break;
  }
  const double f_plus =
      std::isnan(root) ? 1.0 + 2.0 * H * g_of(theta, k)
                       : -4.0 * H * sq * std::sin(0.5 * (theta - root)) *
                             std::sin(0.5 * (theta + root) + phi);
  return f_minus * f_plus;
}

double CmcProfile::derivative_from_offset(double offset, bool at_hi) const {
  const auto& ep = cls_.endpoints;
  const double root = at_hi ? ep.hi : ep.lo;
  const double theta = at_hi ? root - offset : root + offset;
  if (h_ == 0.0) {
    // H0-A>1: R = A^2 sin(theta1 - theta) sin(theta1 + theta).
    const double A = param_;
    const double rad = std::max(
        A * A * std::sin(offset) * std::sin(cls_.theta1 + theta), 1e-300);
    return A / std::sqrt(rad);
  }
  const double H = h_, k = param_;
  const double sq = std::sqrt(1.0 + k * k);
  const double phi = std::atan(k);
  const double half = 0.5 * (at_hi ? -offset : offset);
  double f_sing, f_other;
  if (cls_.tag == CmcCase::C && !at_hi) {
    // Lower endpoint: root of g = +1/(2H).
    f_sing = 4.0 * H * sq * std::sin(half) *
             std::sin(0.5 * (theta + root) + phi);
    f_other = -4.0 * H * sq * std::sin(0.5 * (theta - cls_.theta2)) *
              std::sin(0.5 * (theta + cls_.theta2) + phi);
  } else {
    f_sing = -4.0 * H * sq * std::sin(half) *
             std::sin(0.5 * (theta + root) + phi);
    f_other = cls_.tag == CmcCase::C
                  ? 4.0 * H * sq * std::sin(0.5 * (theta - cls_.theta1)) *
                        std::sin(0.5 * (theta + cls_.theta1) + phi)
                  : 1.0 - 2.0 * H * g_of(theta, k);
  }
  const double rad = std::max(f_sing * f_other, 1e-300);
  return -2.0 * H * g_of(theta, k) / (std::sin(theta) * std::sqrt(rad));
}

double CmcProfile::flux_quantity(double theta) const {
  if (h_ == 0.0) return param_;
  return -2.0 * h_ / std::tan(theta) + 2.0 * h_ * param_;
}

QuadResult CmcProfile::integrate(double from, double to) const {
  if (from == to) return {0.0, 0.0, true};
  const double sign = to > from ? 1.0 : -1.0;
  double a = std::min(from, to), b = std::max(from, to);
  const auto& ep = cls_.endpoints;
  const double span = ep.hi - ep.lo;
  const double w = 0.05 * span;
  const bool sing_lo = ep.lo_kind == EndpointKind::InfiniteNormalDerivative;
  const bool sing_hi = ep.hi_kind == EndpointKind::InfiniteNormalDerivative;

  // Absolute tolerances below the round-off floor of the local magnitude
  // stall the recursion where f' is pole-like, so scale them with a crude
  // three-point estimate of the piece.
  auto run = [&](const std::function<double(double)>& f, double x0,
                 double x1) {
    const double rough = (x1 - x0) / 6.0 *
                         (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    const double tol = std::max(1e-12, 5e-13 * std::abs(rough));
    return adaptive_simpson(f, x0, x1, tol);
  };

  QuadResult total{0.0, 0.0, true};
  // Left sqrt zone: substitute theta = lo + s^2.
  if (sing_lo && a < ep.lo + w) {
    const double b1 = std::min(b, ep.lo + w);
    const double sa = std::sqrt(std::max(a - ep.lo, 0.0));
    const double sb = std::sqrt(b1 - ep.lo);
    auto f = [&](double s) {
      if (s <= 1e-9) {
        const double s0 = 1e-6;
        return 2.0 * s0 * derivative_from_offset(s0 * s0, false);
      }
      return 2.0 * s * derivative_from_offset(s * s, false);
    };
    total = total + run(f, sa, sb);
    a = b1;
  }
  // Right sqrt zone: substitute theta = hi - s^2.
  QuadResult right{0.0, 0.0, true};
  if (sing_hi && b > ep.hi - w) {
    const double a1 = std::max(a, ep.hi - w);
    const double sa = std::sqrt(ep.hi - a1);
    const double sb = std::sqrt(std::max(ep.hi - b, 0.0));
    auto f = [&](double s) {
      if (s <= 1e-9) {
        const double s0 = 1e-6;
        return 2.0 * s0 * derivative_from_offset(s0 * s0, true);
      }
      return 2.0 * s * derivative_from_offset(s * s, true);
    };
    right = run(f, sb, sa);
    b = a1;
  }
  if (b > a)
    total = total + run([&](double th) { return derivative(th); }, a, b);
  total = total + right;
  total.value *= sign;
  return total;
}

void CmcProfile::build_table() {
  const auto& ep = cls_.endpoints;
  const double span = ep.hi - ep.lo;
  const int n = 256;
  auto margin = [&](EndpointKind k) {
    if (k == EndpointKind::FiniteValue ||
        k == EndpointKind::InfiniteNormalDerivative)
      return 0.0;
    return 1e-6 * span;
  };
  const double lo = ep.lo + margin(ep.lo_kind);
  const double hi = ep.hi - margin(ep.hi_kind);

  std::vector<double> nodes;
  nodes.reserve(n + 80);
  for (int i = 0; i <= n; ++i)
    nodes.push_back(lo + (hi - lo) * static_cast<double>(i) / n);
  // Geometric ladders toward the blow-up endpoints keep the per-segment
  // quadrature cheap where f' is pole-like.
  auto ladder = [&](double from_margin, bool at_lo) {
    double dist = from_margin;
    while (dist < 0.06 * span) {
      nodes.push_back(at_lo ? ep.lo + dist : ep.hi - dist);
      dist *= 1.5;
    }
  };
  if (margin(ep.lo_kind) > 0.0) ladder(1e-6 * span, true);
  if (margin(ep.hi_kind) > 0.0) ladder(1e-6 * span, false);
  // An A1 profile close to the A2 wall has an interior spike of f' at
  // theta0; cluster nodes around it the same way.
  if (cls_.tag == CmcCase::A1Entire && h_ > 0.0) {
    const double gap = 1.0 - 2.0 * h_ * std::sqrt(1.0 + param_ * param_);
    if (gap < 1e-3) {
      nodes.push_back(cls_.theta0);
      double dist = 1e-8 * span;
      while (dist < 0.06 * span) {
        if (cls_.theta0 + dist < hi) nodes.push_back(cls_.theta0 + dist);
        if (cls_.theta0 - dist > lo) nodes.push_back(cls_.theta0 - dist);
        dist *= 1.5;
      }
    }
  }
  nodes.push_back(std::clamp(anchor_theta_, lo, hi));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double a, double b) {
                            return std::abs(a - b) < 1e-14 * span;
                          }),
              nodes.end());

  const double ath = std::clamp(anchor_theta_, lo, hi);
  size_t ai = 0;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(nodes[i] - ath) < std::abs(nodes[ai] - ath)) ai = i;

  table_.assign(nodes.size(), TableRow{});
  table_[ai].theta = nodes[ai];
  table_[ai].f = anchor_value_ + integrate(anchor_theta_, nodes[ai]).value;
  for (size_t i = ai + 1; i < nodes.size(); ++i) {
    table_[i].theta = nodes[i];
    table_[i].f = table_[i - 1].f + integrate(nodes[i - 1], nodes[i]).value;
  }
  for (size_t i = ai; i-- > 0;) {
    table_[i].theta = nodes[i];
    table_[i].f = table_[i + 1].f - integrate(nodes[i], nodes[i + 1]).value;
  }
  for (auto& row : table_) {
    const bool endpoint_sing =
        (row.theta <= ep.lo &&
         ep.lo_kind == EndpointKind::InfiniteNormalDerivative) ||
        (row.theta >= ep.hi &&
         ep.hi_kind == EndpointKind::InfiniteNormalDerivative);
    row.fprime = endpoint_sing ? std::numeric_limits<double>::infinity()
                               : derivative(row.theta);
  }
}

QuadResult CmcProfile::value_checked(double theta) const {
  const auto& ep = cls_.endpoints;
  // Snap rounding noise onto value-finite endpoints.
  const double snap = 1e-12 * (1.0 + ep.hi - ep.lo);
  if (value_finite_kind(ep.lo_kind) && theta < ep.lo && theta > ep.lo - snap)
    theta = ep.lo;
  if (value_finite_kind(ep.hi_kind) && theta > ep.hi && theta < ep.hi + snap)
    theta = ep.hi;
  const bool lo_ok = value_finite_kind(ep.lo_kind) ? theta >= ep.lo
                                                   : theta > ep.lo;
  const bool hi_ok = value_finite_kind(ep.hi_kind) ? theta <= ep.hi
                                                   : theta < ep.hi;
  if (!lo_ok || !hi_ok)
    throw std::domain_error("CmcProfile::value: theta outside domain");
  // Nearest table node, then a short quadrature hop.
  size_t k = 0;
  for (size_t i = 0; i < table_.size(); ++i)
    if (std::abs(table_[i].theta - theta) < std::abs(table_[k].theta - theta))
      k = i;
  auto q = integrate(table_[k].theta, theta);
  q.value += table_[k].f;
  return q;
}

double CmcProfile::value(double theta) const {
  return value_checked(theta).value;
}

double ProfileGraph::operator()(const HPoint& p) const {
  const auto [phi, theta] = chart.polar_from_halfplane(p);
  (void)phi;
  return offset + profile->value(theta);
}

double barrier_value(const BarrierParams& b, const HPoint& p) {
  if (!(b.theta0 > 0.0 && b.theta0 <= 0.5 * kPi + 1e-15))
    throw std::domain_error("barrier_value: theta0 outside (0, pi/2]");
  const auto w = b.chart.to_origin.apply(std::complex<double>(p.x, p.y));
  const double x = w.real(), y = w.imag();
  if (!(y > 0.0)) throw std::domain_error("barrier_value: point not in H^2");
  const double theta = std::atan2(y, x);
  if (std::abs(b.theta0 - 0.5 * kPi) <= 1e-14) {
    if (!(theta < 0.5 * kPi))
      throw std::domain_error("barrier_value: theta outside [0, theta0)");
    return b.offset + std::log((std::hypot(x, y) + y) / x);
  }
  if (!(theta <= b.theta0))
    throw std::domain_error("barrier_value: theta outside [0, theta0]");
  CmcProfile prof(0.0, 1.0 / std::sin(b.theta0), 0.0, 0.0);
  return b.offset + prof.value(theta);
}

}  // namespace scherk
