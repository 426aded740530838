#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mo/extended_real.hpp"
#include "mo/solve.hpp"

namespace mo {

namespace detail {

inline bool small_integer_exponent(double p, long& n) {
  if (p < 1.0 || p > 64.0) return false;
  const double fl = std::floor(p);
  if (fl != p) return false;
  n = long(fl);
  return true;
}

// pow with a repeated-product path for small integer exponents. The product
// path keeps (2x)^n / x^n bit-exact (scaling by 2 commutes with rounding),
// which the Delta2 doubling constants of the power families rely on.
inline double pow_young(double x, double p) {
  long n;
  if (small_integer_exponent(p, n)) {
    double r = 1.0;
    while (n-- > 0) r *= x;
    return r;
  }
  return std::pow(x, p);
}

}  // namespace detail

// Holder conjugate p' with 1/p + 1/p' = 1; p = 1 maps to +inf.
inline double holder_conjugate(double p) {
  if (!(p >= 1.0)) throw std::domain_error("holder_conjugate: p < 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

// Per-atom convex piecewise-linear table. Breakpoints start at (0, 0) and
// slopes must be nondecreasing. Beyond the last breakpoint the function
// either keeps the last slope or jumps to +inf, per infinite_tail.
struct ConvexTable {
  std::vector<double> x;
  std::vector<double> y;
  bool infinite_tail = false;

  void validate() const {
    if (x.size() < 2 || x.size() != y.size())
      throw std::invalid_argument("ConvexTable: need >= 2 matching breakpoints");
    if (x.front() != 0.0 || y.front() != 0.0)
      throw std::invalid_argument("ConvexTable: first breakpoint must be (0, 0)");
    double prev_slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) throw std::invalid_argument("ConvexTable: x not increasing");
      if (y[i] < y[i - 1]) throw std::invalid_argument("ConvexTable: values decreasing");
      const double s = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      if (s < prev_slope - 1e-12 * (std::fabs(prev_slope) + 1.0))
        throw std::invalid_argument("ConvexTable: slopes decreasing (not convex)");
      prev_slope = s;
    }
    if (prev_slope < 0.0) throw std::invalid_argument("ConvexTable: negative tail slope");
  }

  double last_slope() const {
    const std::size_t m = x.size();
    return (y[m - 1] - y[m - 2]) / (x[m - 1] - x[m - 2]);
  }
};

/**
// sup_{y >= 0} (x*y - phi(y)) for a convex phi with phi(0) = 0; the objective
// is concave. Doubling expansion brackets the maximizer, then a ternary
// section refines it to relative tolerance tol_rel. Objective growth that
// persists past the 2^60 expansion cap reports +inf.
//
// phi is any callable double -> ExtReal; +inf values of phi mark the edge of
// its effective domain and are handled as objective value -inf.
*/
template <class PhiFn>
ExtReal legendre_sup(PhiFn&& phi, double x, double tol_rel = 1e-10) {
  if (x < 0.0) throw std::domain_error("legendre_sup: negative argument");

  auto objective = [&](double y) -> std::optional<double> {
    const ExtReal ph = phi(y);
    if (!ph.is_finite()) return std::nullopt;
    return x * y - ph.value();
  };

  const auto j0 = objective(0.0);
  if (!j0) throw std::domain_error("legendre_sup: phi(0) must be finite");
  double best = *j0;

  // Expansion: double until the objective stops increasing or leaves the
  // effective domain. Strictness is tested with a small slack so a flat
  // plateau (e.g. an exactly attained asymptotic slope) does not run to the
  // cap and get misread as divergence.
  double lo = 0.0, hi;
  double y_prev = 0.0, y_cur = 1.0;
  double j_prev = *j0;
  while (true) {
    const auto jc = objective(y_cur);
    if (!jc) {
      hi = y_cur;
      break;
    }
    best = std::max(best, *jc);
    if (*jc <= j_prev + 1e-12 * (std::fabs(j_prev) + 1.0)) {
      hi = y_cur;
      break;
    }
    if (y_cur >= kBracketCap) return ExtReal::infinity();
    lo = y_prev;
    y_prev = y_cur;
    j_prev = *jc;
    y_cur *= 2.0;
  }

  // Ternary section on the concave objective over [lo, hi]. Stops on
  // relative bracket width, an iteration cap, or a long stall of the best
  // value (the maximizer may sit at 0, where relative width cannot shrink).
  int since_improve = 0;
  for (int iter = 0; iter < 300 && hi - lo > 1e-300; ++iter) {
    if (hi - lo <= tol_rel * hi) break;
    if (since_improve > 48) break;
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const auto j1 = objective(m1);
    if (!j1) {
      hi = m1;
      continue;
    }
    const auto j2 = objective(m2);
    if (!j2) {
      hi = m2;
      best = std::max(best, *j1);
      continue;
    }
    const double cand = std::max(*j1, *j2);
    if (cand > best + 1e-13 * (std::fabs(best) + 1e-300))
      since_improve = 0;
    else
      ++since_improve;
    best = std::max(best, cand);
    if (*j1 < *j2)
      lo = m1;
    else
      hi = m2;
  }
  if (const auto jm = objective(0.5 * (lo + hi))) best = std::max(best, *jm);

  return ExtReal(std::max(best, 0.0));
}

// Per-atom Young function Phi(t, .): convex, nondecreasing, Phi(t, 0) = 0,
// possibly +inf. Families:
//   power              Phi(t, x) = x^p, one exponent for all atoms
//   variable_exponent  Phi(t, x) = x^{p(t)}
//   exp_minus_one      Phi(t, x) = e^x - 1
//   tabulated          convex piecewise-linear interpolation per atom
//   holder_conjugate_power   x^{p'(t)}, with the p = 1 branch 0 on [0,1]
//                            and +inf on (1, inf)
//   conjugate_of       numerical Legendre transform of another family
class YoungFunction {
 public:
  static YoungFunction power(std::size_t atoms, double p) {
    require_exponent(p);
    return YoungFunction(atoms, Power{p});
  }

  static YoungFunction variable_exponent(std::vector<double> p) {
    if (p.empty()) throw std::invalid_argument("variable_exponent: empty exponent list");
    for (double e : p) require_exponent(e);
    const std::size_t n = p.size();
    return YoungFunction(n, Variable{std::move(p)});
  }

  static YoungFunction exp_minus_one(std::size_t atoms) {
    return YoungFunction(atoms, ExpM1{});
  }

  static YoungFunction tabulated(std::vector<ConvexTable> tables) {
    if (tables.empty()) throw std::invalid_argument("tabulated: no tables");
    for (const auto& t : tables) t.validate();
    const std::size_t n = tables.size();
    return YoungFunction(n, Tables{std::move(tables)});
  }

  static YoungFunction tabulated(std::size_t atoms, ConvexTable shared) {
    shared.validate();
    return YoungFunction(atoms, Tables{std::vector<ConvexTable>(atoms, std::move(shared))});
  }

  static YoungFunction holder_conjugate_power(std::vector<double> p) {
    if (p.empty()) throw std::invalid_argument("holder_conjugate_power: empty exponent list");
    for (double e : p) require_exponent(e);
    const std::size_t n = p.size();
    return YoungFunction(n, HolderConj{std::move(p)});
  }

  static YoungFunction conjugate_of(YoungFunction phi) {
    const std::size_t n = phi.atom_count();
    return YoungFunction(n, ConjugateOf{std::make_shared<YoungFunction>(std::move(phi))});
  }

  std::size_t atom_count() const { return atoms_; }

  // Phi(t, x). Exactly 0 at x = 0; negative x is a domain error.
  ExtReal value(std::size_t t, double x) const {
    check_args(t, x);
    if (const auto* f = std::get_if<Power>(&family_)) return detail::pow_young(x, f->p);
    if (const auto* f = std::get_if<Variable>(&family_)) return detail::pow_young(x, f->p[t]);
    if (std::get_if<ExpM1>(&family_)) return ExtReal(std::expm1(x));
    if (const auto* f = std::get_if<Tables>(&family_)) return table_value(f->t[t], x);
    if (const auto* f = std::get_if<HolderConj>(&family_)) {
      const double p = f->p[t];
      if (p > 1.0) return detail::pow_young(x, holder_conjugate(p));
      return x <= 1.0 ? ExtReal(0.0) : ExtReal::infinity();
    }
    const auto& c = std::get<ConjugateOf>(family_);
    return legendre_sup([&](double y) { return c.base->value(t, y); }, x);
  }

  // The right-continuous right-derivative phi(t, x). Throws where
  // Phi(t, x) = +inf; returns an infinite double at a finite-value point
  // whose right neighborhood is outside the effective domain.
  double right_derivative(std::size_t t, double x) const {
    check_args(t, x);
    if (!value(t, x).is_finite())
      throw std::domain_error("right_derivative: Phi is +inf here");
    return derivative_ext(t, x).value_or(std::numeric_limits<double>::infinity());
  }

  // The Legendre transform Psi(t, x) = sup_{y>=0} (x y - Phi(t, y)).
  ExtReal conjugate_value(std::size_t t, double x) const {
    check_args(t, x);
    return legendre_sup([&](double y) { return value(t, y); }, x);
  }

  // Generalized inverse of the right-derivative:
  //   sup{x >= 0 : phi(t, x) <= y},  with sup(empty) = 0.
  // At a jump of phi this is the right end of the flat region. Monotone
  // bisection to relative tolerance 1e-12; a derivative that never exceeds y
  // below the 2^60 cap reports +inf (flat phi).
  ExtReal inverse_derivative(std::size_t t, double y) const {
    if (t >= atoms_) throw std::domain_error("YoungFunction: atom out of range");
    if (y < 0.0) throw std::domain_error("inverse_derivative: negative argument");
    auto leq = [&](double x) { return derivative_ext(t, x) <= ExtReal(y); };
    if (!leq(0.0)) return ExtReal(0.0);
    double hi = 1.0;
    while (leq(hi)) {
      if (hi >= kBracketCap) return ExtReal::infinity();
      hi *= 2.0;
    }
    double lo = hi > 1.0 ? 0.5 * hi : 0.0;
    if (lo > 0.0 && !leq(lo)) lo = 0.0;  // keep the bisection invariant: leq(lo) holds
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (leq(mid))
        lo = mid;
      else
        hi = mid;
    }
    return ExtReal(lo);
  }

 private:
  struct Power {
    double p;
  };
  struct Variable {
    std::vector<double> p;
  };
  struct ExpM1 {};
  struct Tables {
    std::vector<ConvexTable> t;
  };
  struct HolderConj {
    std::vector<double> p;
  };
  struct ConjugateOf {
    std::shared_ptr<const YoungFunction> base;
  };
  using Family = std::variant<Power, Variable, ExpM1, Tables, HolderConj, ConjugateOf>;

  YoungFunction(std::size_t atoms, Family family) : atoms_(atoms), family_(std::move(family)) {
    if (atoms_ == 0) throw std::invalid_argument("YoungFunction: zero atoms");
  }

  static void require_exponent(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::domain_error("YoungFunction: exponent must lie in [1, inf)");
  }

  void check_args(std::size_t t, double x) const {
    if (t >= atoms_) throw std::domain_error("YoungFunction: atom out of range");
    if (x < 0.0 || std::isnan(x)) throw std::domain_error("YoungFunction: negative argument");
  }

  static ExtReal table_value(const ConvexTable& tb, double x) {
    const std::size_t m = tb.x.size();
    if (x >= tb.x[m - 1]) {
      if (x == tb.x[m - 1]) return ExtReal(tb.y[m - 1]);
      if (tb.infinite_tail) return ExtReal::infinity();
      return ExtReal(tb.y[m - 1] + tb.last_slope() * (x - tb.x[m - 1]));
    }
    const auto it = std::upper_bound(tb.x.begin(), tb.x.end(), x);
    const std::size_t i = std::size_t(it - tb.x.begin());  // x < tb.x[i], i >= 1
    const double w = (x - tb.x[i - 1]) / (tb.x[i] - tb.x[i - 1]);
    return ExtReal(tb.y[i - 1] + w * (tb.y[i] - tb.y[i - 1]));
  }

  // Right-derivative as an extended real: +inf both where Phi itself is +inf
  // and at a finite boundary point with no effective domain to the right.
  ExtReal derivative_ext(std::size_t t, double x) const {
    if (const auto* f = std::get_if<Power>(&family_)) return power_derivative(x, f->p);
    if (const auto* f = std::get_if<Variable>(&family_)) return power_derivative(x, f->p[t]);
    if (std::get_if<ExpM1>(&family_)) return ExtReal(std::exp(x));
    if (const auto* f = std::get_if<Tables>(&family_)) {
      const ConvexTable& tb = f->t[t];
      const std::size_t m = tb.x.size();
      if (x >= tb.x[m - 1]) {
        if (tb.infinite_tail) return ExtReal::infinity();
        return ExtReal(tb.last_slope());
      }
      const auto it = std::upper_bound(tb.x.begin(), tb.x.end(), x);
      const std::size_t i = std::size_t(it - tb.x.begin());
      return ExtReal((tb.y[i] - tb.y[i - 1]) / (tb.x[i] - tb.x[i - 1]));
    }
    if (const auto* f = std::get_if<HolderConj>(&family_)) {
      const double p = f->p[t];
      if (p > 1.0) {
        const double q = holder_conjugate(p);
        return power_derivative(x, q);
      }
      return x < 1.0 ? ExtReal(0.0) : ExtReal::infinity();
    }
    // Conjugate family: psi = generalized inverse of the base derivative
    // (eqn phi^{-1}(y) = sup{x : phi(x) <= y}, taken right-continuous).
    const auto& c = std::get<ConjugateOf>(family_);
    return c.base->inverse_derivative(t, x);
  }

  static ExtReal power_derivative(double x, double p) {
    if (p == 1.0) return ExtReal(1.0);
    return ExtReal(p * detail::pow_young(x, p - 1.0));
  }

  std::size_t atoms_;
  Family family_;
};

// Young's-inequality margin Phi(t, x) + Psi(t, y) - x*y. Nonnegative when
// Psi is the conjugate of Phi (up to solver tolerance), zero at y = phi(t, x).
inline ExtReal young_margin(const YoungFunction& phi, const YoungFunction& psi, std::size_t t,
                            double x, double y) {
  if (x < 0.0 || y < 0.0) throw std::domain_error("young_margin: negative argument");
  return phi.value(t, x) + psi.value(t, y) - x * y;
}

}  // namespace mo
