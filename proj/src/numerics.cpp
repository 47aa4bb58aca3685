#include "scherk/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace scherk {

namespace {

struct SimpsonWorker {
  const std::function<double(double)>& f;
  int max_depth;
  long budget;  // remaining function evaluations
  bool hit_cap = false;
  double err_accum = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    budget -= 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Terminate on the requested tolerance, on the round-off floor of the
    // local integrand scale, at the depth cap, or when the evaluation
    // budget is spent (ill-conditioned integrands otherwise recurse on
    // evaluation noise, which shrinks at the same rate as the tolerance).
    const double scale = std::abs(left) + std::abs(right) + std::abs(whole);
    const bool noise_floor = std::abs(delta) <= 5e-14 * scale;
    if (std::abs(delta) <= 15.0 * tol || noise_floor || depth >= max_depth ||
        budget <= 0) {
      if (std::abs(delta) > 15.0 * tol && !noise_floor) hit_cap = true;
      err_accum += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double abs_tol, int max_depth) {
  if (a == b) return {0.0, 0.0, true};
  SimpsonWorker w{f, max_depth, 200000};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = w.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
  return {v, w.err_accum, !w.hit_cap};
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  while (std::abs(b - a) > tol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace scherk
