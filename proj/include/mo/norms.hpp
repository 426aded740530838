#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "mo/extended_real.hpp"
#include "mo/measure.hpp"
#include "mo/solve.hpp"
#include "mo/young.hpp"

namespace mo {

inline constexpr double kLuxemburgTol = 1e-12;  // relative, bisection
inline constexpr double kAmemiyaTol = 1e-10;    // golden section, in log2(lambda)

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tolerance = 0.0;  // solver tolerance the run was held to
  bool converged = true;

  static NormResult zero() { return NormResult{}; }
};

// The modular: sum over atoms of Phi(t, |f(t)| / lambda) * mu(t), with +inf
// absorbing. lambda must be positive.
inline ExtReal modular(const YoungFunction& phi, const AtomicMeasureSpace& space,
                       const SimpleFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("modular: lambda must be positive");
  if (f.size() != space.size() || phi.atom_count() != space.size())
    throw std::invalid_argument("modular: size mismatch");
  ExtReal total(0.0);
  for (std::size_t t = 0; t < space.size(); ++t) {
    total += space.weights[t] * phi.value(t, std::fabs(f[t]) / lambda);
    if (!total.is_finite()) return total;
  }
  return total;
}

// Luxemburg norm inf{lambda > 0 : modular(phi, f, lambda) <= 1} by monotone
// bisection; the returned value sits on the feasible side of the bracket, so
// modular at the result is <= 1 whenever the solve converged. f = 0 gives 0.
inline NormResult luxemburg_norm(const YoungFunction& phi, const AtomicMeasureSpace& space,
                                 const SimpleFunction& f) {
  if (f.size() != space.size()) throw std::invalid_argument("luxemburg_norm: size mismatch");
  if (f.is_zero()) {
    NormResult r = NormResult::zero();
    r.tolerance = kLuxemburgTol;
    return r;
  }
  auto feasible = [&](double lambda) { return modular(phi, space, f, lambda) <= ExtReal(1.0); };
  const ThresholdResult t = monotone_infimum(feasible, f.max_abs(), kLuxemburgTol);
  NormResult r;
  r.value = t.converged ? t.value : std::numeric_limits<double>::infinity();
  r.iterations = t.iterations;
  r.residual = t.residual;
  r.bracket_lo = t.lo;
  r.bracket_hi = t.hi;
  r.tolerance = kLuxemburgTol;
  r.converged = t.converged;
  return r;
}

// Amemiya norm inf_{lambda > 0} (1/lambda) [1 + integral Phi(t, lambda |f|)].
// The objective is unimodal on its effective domain: a coarse scan over
// lambda = 2^k locates the basin, golden section over log2(lambda) refines.
inline NormResult amemiya_norm(const YoungFunction& phi, const AtomicMeasureSpace& space,
                               const SimpleFunction& f) {
  if (f.size() != space.size()) throw std::invalid_argument("amemiya_norm: size mismatch");
  if (f.is_zero()) {
    NormResult r = NormResult::zero();
    r.tolerance = kAmemiyaTol;
    return r;
  }

  auto objective = [&](double lambda) -> double {
    ExtReal acc(1.0);
    for (std::size_t t = 0; t < space.size(); ++t) {
      acc += space.weights[t] * phi.value(t, lambda * std::fabs(f[t]));
      if (!acc.is_finite()) return std::numeric_limits<double>::infinity();
    }
    return acc.value() / lambda;
  };

  int best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = -60; k <= 60; ++k) {
    const double val = objective(std::ldexp(1.0, k));
    if (val < best) {
      best = val;
      best_k = k;
    }
  }
  NormResult r;
  r.tolerance = kAmemiyaTol;
  if (std::isinf(best)) {
    r.value = std::numeric_limits<double>::infinity();
    r.converged = false;
    return r;
  }

  const GoldenResult g = golden_section_min(
      [&](double u) { return objective(std::exp2(u)); }, double(best_k) - 1.0,
      double(best_k) + 1.0, kAmemiyaTol);
  r.value = std::min(g.fx, best);
  r.iterations = g.iterations;
  r.residual = g.residual;
  r.bracket_lo = std::exp2(g.lo);
  r.bracket_hi = std::exp2(g.hi);
  r.converged = g.converged;
  return r;
}

// Amemiya / Luxemburg; lands in [1, 2] up to solver tolerance. The zero
// function has no ratio.
inline double check_equivalence(const YoungFunction& phi, const AtomicMeasureSpace& space,
                                const SimpleFunction& f) {
  if (f.is_zero()) throw std::domain_error("check_equivalence: zero function");
  const NormResult lux = luxemburg_norm(phi, space, f);
  const NormResult am = amemiya_norm(phi, space, f);
  if (!lux.converged || !am.converged)
    throw std::runtime_error("check_equivalence: norm solver failure");
  return am.value / lux.value;
}

}  // namespace mo
