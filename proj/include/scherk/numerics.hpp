#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace scherk {

inline constexpr double kPi = 3.14159265358979323846;

// Geometric predicates compare Euclidean quantities at this tolerance;
// metric (length/flux) comparisons use kMetricTol relative.
inline constexpr double kGeomTol = 1e-12;
inline constexpr double kMetricTol = 1e-9;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;  // false when the subdivision cap was reached

  QuadResult operator+(const QuadResult& o) const {
    return {value + o.value, error + o.error, converged && o.converged};
  }
};

// Adaptive Simpson with absolute tolerance and a hard depth cap. Hitting the
// cap returns the running estimate with converged=false instead of throwing.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double abs_tol = 1e-10,
                            int max_depth = 40);

// Bisection for a continuous f with f(a), f(b) of opposite sign.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-12);

// Deterministic rng: identical streams for identical seeds on every platform.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
};

// 17 significant digits: round-trip exact for doubles, '.' decimal point.
std::string fmt_g17(double x);

// FNV-1a over a byte buffer, hex-encoded; used for input hashes in reports.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace scherk
