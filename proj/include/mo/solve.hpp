#pragma once

#include <cmath>
#include <limits>

namespace mo {

// Shared bracket-expansion caps: searches give up past 2^60 (and below 2^-60).
inline constexpr double kBracketCap = 0x1p60;
inline constexpr double kBracketFloor = 0x1p-60;

struct ThresholdResult {
  double value = 0.0;  // feasible (predicate-true) end of the final bracket
  int iterations = 0;
  double residual = 0.0;  // relative bracket width at termination
  double lo = 0.0, hi = 0.0;
  bool converged = false;
};

/**
// Infimum of {x > 0 : pred(x)} for a monotone predicate which is false below
// the threshold and true above it. Brackets by doubling/halving from x0, then
// bisects until hi - lo <= rel_tol * hi. Returns the feasible end hi, so
// pred(result) holds whenever converged is set.
//
// converged == false means the predicate never turned true up to 2^60.
// If the predicate is already true at 2^-60 the floor itself is returned
// (threshold indistinguishable from zero at this scale).
*/
template <class Pred>
ThresholdResult monotone_infimum(Pred&& pred, double x0 = 1.0, double rel_tol = 1e-12) {
  ThresholdResult r;
  double x = x0;
  if (!(x > 0.0)) x = 1.0;

  int iter = 0;
  double lo, hi;
  if (pred(x)) {
    hi = x;
    lo = x;
    while (pred(lo)) {
      hi = lo;
      lo *= 0.5;
      ++iter;
      if (lo < kBracketFloor) {
        r.value = hi;
        r.iterations = iter;
        r.residual = (hi - lo) / hi;
        r.lo = lo;
        r.hi = hi;
        r.converged = true;
        return r;
      }
    }
  } else {
    lo = x;
    hi = x;
    while (!pred(hi)) {
      lo = hi;
      hi *= 2.0;
      ++iter;
      if (hi > kBracketCap) {
        r.value = hi;
        r.iterations = iter;
        r.lo = lo;
        r.hi = hi;
        r.converged = false;  // unbounded above the cap
        return r;
      }
    }
  }

  // Invariant: pred(lo) false, pred(hi) true.
  while (hi - lo > rel_tol * hi && iter < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in doubles
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
    ++iter;
  }
  r.value = hi;
  r.iterations = iter;
  r.residual = (hi - lo) / hi;
  r.lo = lo;
  r.hi = hi;
  r.converged = true;
  return r;
}

struct GoldenResult {
  double x = 0.0;
  double fx = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double residual = 0.0;  // final bracket width
  double lo = 0.0, hi = 0.0;
  bool converged = false;
};

/**
// Minimizes a unimodal objective on [lo, hi]. The objective may return +inf
// (HUGE_VAL) outside its effective domain; infinite probes shrink the bracket
// toward the finite side. Terminates when the bracket is narrower than
// tol (absolute, in the argument).
*/
template <class F>
GoldenResult golden_section_min(F&& f, double lo, double hi, double tol = 1e-10,
                                int max_iter = 200) {
  GoldenResult r;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  r.x = x1;
  r.fx = f1;

  int iter = 0;
  while (hi - lo > tol && iter < max_iter) {
    if (std::isinf(f1) && std::isinf(f2)) {
      // No finite probe: domain is off to one side; shrink from the left.
      lo = x1;
      x1 = hi - inv_phi * (hi - lo);
      x2 = lo + inv_phi * (hi - lo);
      f1 = f(x1);
      f2 = f(x2);
    } else if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
    if (f1 < r.fx) {
      r.fx = f1;
      r.x = x1;
    }
    if (f2 < r.fx) {
      r.fx = f2;
      r.x = x2;
    }
    ++iter;
  }
  r.iterations = iter;
  r.residual = hi - lo;
  r.lo = lo;
  r.hi = hi;
  r.converged = hi - lo <= tol;
  return r;
}

}  // namespace mo
