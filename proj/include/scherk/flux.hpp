#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "scherk/domain.hpp"
#include "scherk/profiles.hpp"
#include "scherk/solver.hpp"

namespace scherk {

// Parametrized arc in the half-plane with exact velocity.
struct ParamArc {
  std::function<std::complex<double>(double)> z;
  std::function<std::complex<double>(double)> dz;
  double t0 = 0.0, t1 = 1.0;
  std::string desc;

  static ParamArc segment(std::complex<double> a, std::complex<double> b,
                          const std::string& desc = "segment");
  // Euclidean circle arc (hyperbolic circles and horocycle arcs included).
  static ParamArc circle(std::complex<double> center, double radius,
                         double a0, double a1,
                         const std::string& desc = "circle");
};

enum class NormalSide { Left, Right };  // relative to the travel direction

struct FluxResult {
  double value = 0.0;
  double arc_length = 0.0;
  double error = 0.0;
  bool truncated = false;  // arc clipped at the profile's singular edge
  std::string arc_desc;
};

// Adaptive quadrature of <X_u, nu> ds along the arc for a profile graph;
// nu is the unit normal on the requested side of the travel direction.
FluxResult flux_exact(const ProfileGraph& u, const ParamArc& arc,
                      NormalSide side, double tol = 1e-10);

struct ReportRow {
  std::string label;
  double value = 0.0, target = 0.0, bound = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::string> config_echo;
  std::vector<ReportRow> rows;
  bool pass = false;
};

// Flux lemma verification on an exact profile graph: closed loops (zero
// flux), interior arcs (strictly below arc length), and probes approaching a
// +-infinity edge (flux saturating at the arc length).
ExperimentReport verify_flux_lemmas(const ProfileGraph& u, double theta_lo,
                                    double theta_hi, double phi_lo,
                                    double phi_hi, uint64_t seed = 0);

struct NonzeroFluxConfig {
  int k = 4;                   // outer ideal polygon has 2k vertices
  double deform = 0.05;        // alternating vertex rotation (radians)
  double inner_radius = 0.5;   // hyperbolic radius of the inner C circle
  double horocycle_size = 0.12;  // disk-model horocycle diameter
  double loop_radius = 1.2;    // hyperbolic radius of the flux loop
  double h = 1.0 / 24.0;
  std::vector<double> levels = {2, 4, 8, 16};
  double cap_r0 = 1.5, cap_step = 0.5;
  int loop_samples = 2048;
};

// Builds the deformed annular domain of the non-zero-flux construction.
ScherkDomain make_nonzero_flux_domain(const NonzeroFluxConfig& cfg);

ExperimentReport experiment_nonzero_flux(const NonzeroFluxConfig& cfg);

struct NonuniquenessConfig {
  double alpha = 3.0 * kPi / 8.0;  // in (pi/4, pi/2)
  std::vector<int> depths = {1, 2, 4};
  double h = kPi / 96.0;
  double m0 = 4.0;            // surrogate schedule m_k = m0 * 2^k
  double horocycle_size = 0.1;  // cuts defining the flux segment
  int max_newton = 200;
};

ExperimentReport experiment_nonuniqueness(const NonuniquenessConfig& cfg);

}  // namespace scherk
