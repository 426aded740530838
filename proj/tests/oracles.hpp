// Test-only oracles, independent of the library's own solver paths: plain
// quadrature, grid suprema, finite differences, closed forms. Expected values
// in the suites are computed (or cross-checked) against these.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "mo/extended_real.hpp"
#include "mo/measure.hpp"
#include "mo/rng.hpp"
#include "mo/young.hpp"

namespace oracle {

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Brute-force Legendre transform on a y-grid (a lower bound that converges
// from below as the grid refines).
inline double legendre_grid_sup(const std::function<mo::ExtReal(double)>& phi, double x,
                                double y_max, int points = 20000) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double y = y_max * double(i) / double(points);
    const mo::ExtReal ph = phi(y);
    if (!ph.is_finite()) break;
    best = std::max(best, x * y - ph.value());
  }
  return best;
}

// Exact conjugate of x^p for p > 1: (p-1) p^{-p'} x^{p'}.
inline double power_conjugate(double p, double x) {
  const double q = p / (p - 1.0);
  return (p - 1.0) * std::pow(p, -q) * std::pow(x, q);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double forward_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x)) / h;
}

// A random convex piecewise-linear table on [0, 4]: nondecreasing slopes
// accumulated from nonnegative draws.
inline mo::ConvexTable random_convex_table(mo::Rng& rng, bool infinite_tail) {
  mo::ConvexTable tb;
  tb.infinite_tail = infinite_tail;
  double slope = rng.uniform(0.0, 0.5);
  double y = 0.0, x = 0.0;
  tb.x.push_back(0.0);
  tb.y.push_back(0.0);
  for (int i = 0; i < 8; ++i) {
    x += 0.5;
    y += slope * 0.5;
    tb.x.push_back(x);
    tb.y.push_back(y);
    slope += rng.uniform(0.0, 1.5);
  }
  return tb;
}

// A random Young function drawn across the built-in families.
inline mo::YoungFunction random_family(mo::Rng& rng, std::size_t atoms) {
  switch (rng.integer(4)) {
    case 0:
      return mo::YoungFunction::power(atoms, rng.uniform(1.1, 4.0));
    case 1: {
      std::vector<double> p(atoms);
      for (double& e : p) e = rng.uniform(1.1, 4.0);
      return mo::YoungFunction::variable_exponent(std::move(p));
    }
    case 2:
      return mo::YoungFunction::exp_minus_one(atoms);
    default:
      return mo::YoungFunction::tabulated(atoms, random_convex_table(rng, rng.integer(4) == 0));
  }
}

inline mo::SimpleFunction random_function(mo::Rng& rng, std::size_t atoms, double amp = 2.0) {
  mo::SimpleFunction f(atoms);
  for (std::size_t t = 0; t < atoms; ++t) f[t] = amp * rng.symmetric();
  return f;
}

}  // namespace oracle
