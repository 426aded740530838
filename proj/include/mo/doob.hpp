#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mo/martingale.hpp"
#include "mo/young.hpp"

namespace mo {

// Nonnegative submartingale on the dyadic tree: value(node) <= mean of its
// children (up to tolerance). Scalar-valued; the canonical source is
// |f(t)| of a Paley-Walsh martingale at a fixed atom t.
struct ScalarTree {
  std::vector<std::vector<double>> levels;  // levels[k] has 2^k entries

  int depth() const { return int(levels.size()) - 1; }

  double submartingale_residual() const {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k)
      for (std::size_t i = 0; i < levels[k].size(); ++i)
        worst = std::max(worst,
                         levels[k][i] - 0.5 * (levels[k + 1][2 * i] + levels[k + 1][2 * i + 1]));
    return worst;
  }

  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& level : levels)
      for (double x : level) m = std::min(m, x);
    return m;
  }

  void require_valid(double tol = 1e-9) const {
    if (levels.empty() || levels[0].size() != 1)
      throw std::invalid_argument("ScalarTree: missing root level");
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (levels[k].size() != (std::size_t(1) << k))
        throw std::invalid_argument("ScalarTree: level size must be 2^k");
    if (min_value() < -tol) throw std::invalid_argument("ScalarTree: negative values");
    if (submartingale_residual() > tol)
      throw std::invalid_argument("ScalarTree: submartingale property violated");
  }
};

// |f(t)| fiberwise; a nonnegative submartingale by convexity.
inline ScalarTree abs_fiber(const PaleyWalshMartingale& f, std::size_t atom) {
  ScalarTree out;
  out.levels.resize(std::size_t(f.depth()) + 1);
  for (int k = 0; k <= f.depth(); ++k) {
    out.levels[std::size_t(k)].resize(std::size_t(1) << k);
    for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i)
      out.levels[std::size_t(k)][i] = std::fabs(f.value(k, i)[atom]);
  }
  return out;
}

struct DoobCheck {
  bool accepted = false;          // precondition Phi(l) <= (1/q) l phi(l) + c held on grid
  double precondition_margin = 0.0;    // min over grid of rhs - lhs
  double margin = 0.0;            // E Phi(q' f_n) + c - E Phi(f_n*)
  double q_conj = 0.0;
};

/**
// The Phi-form of Doob's maximal inequality for a scalar Young function
// satisfying Phi(lambda) <= (1/q) lambda phi(lambda) + c:
//
//   E Phi(f_n*)  <=  E Phi(q' f_n) + c,   q' = q/(q-1),
//
// checked on a nonnegative submartingale tree with exact uniform-path
// expectations. The precondition is verified on precheck_grid first (with
// relative slack 1e-9); failure rejects the input instead of reporting a
// meaningless margin.
*/
inline DoobCheck doob_check(const YoungFunction& phi, double q, double c, const ScalarTree& f,
                            const std::vector<double>& precheck_grid) {
  if (phi.atom_count() != 1) throw std::invalid_argument("doob_check: scalar Phi expected");
  if (!(q > 1.0)) throw std::domain_error("doob_check: q must exceed 1");
  if (c < 0.0) throw std::domain_error("doob_check: c must be nonnegative");
  if (precheck_grid.empty()) throw std::invalid_argument("doob_check: empty precheck grid");
  f.require_valid();

  DoobCheck out;
  out.q_conj = q / (q - 1.0);
  out.precondition_margin = std::numeric_limits<double>::infinity();
  for (double l : precheck_grid) {
    const ExtReal val = phi.value(0, l);
    if (!val.is_finite()) {
      out.precondition_margin = -std::numeric_limits<double>::infinity();
      return out;
    }
    const double lhs = val.value();
    const double rhs = (1.0 / q) * l * phi.right_derivative(0, l) + c;
    out.precondition_margin = std::min(out.precondition_margin, rhs - lhs);
    if (rhs - lhs < -1e-9 * std::max(1.0, lhs)) return out;  // accepted stays false
  }
  out.accepted = true;

  const int n = f.depth();
  const std::size_t leaves = std::size_t(1) << n;
  double e_star = 0.0, e_last = 0.0;
  for (std::size_t i = 0; i < leaves; ++i) {
    double running = 0.0;
    for (int k = 0; k <= n; ++k)
      running = std::max(running, f.levels[std::size_t(k)][i >> (n - k)]);
    e_star += phi.value(0, running).value_or(std::numeric_limits<double>::infinity());
    e_last += phi.value(0, out.q_conj * f.levels[std::size_t(n)][i])
                  .value_or(std::numeric_limits<double>::infinity());
  }
  e_star /= double(leaves);
  e_last /= double(leaves);
  out.margin = e_last + c - e_star;
  return out;
}

}  // namespace mo
