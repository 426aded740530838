#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mo/measure.hpp"
#include "mo/young.hpp"

namespace mo {

// The variable-Lebesgue specialization: Phi(t, x) = x^{p(t)} together with
// its exact (numerical Legendre) conjugate and the plain x^{p'(t)} power
// form conventionally written for it. The two differ by the constant
// (p-1) p^{-p'}; both are kept so either can be exercised.
struct VariableLebesgue {
  YoungFunction phi;
  YoungFunction psi_exact;
  YoungFunction psi_holder;
  double p_plus = 0.0;
  double p_minus = 0.0;
};

inline VariableLebesgue variable_lebesgue(const AtomicMeasureSpace& space,
                                          std::vector<double> p) {
  if (p.size() != space.size())
    throw std::invalid_argument("variable_lebesgue: exponent list must match atoms");
  for (double e : p)
    if (!(e >= 1.0)) throw std::domain_error("variable_lebesgue: exponents must be >= 1");

  YoungFunction phi = YoungFunction::variable_exponent(p);
  return VariableLebesgue{
      phi,
      YoungFunction::conjugate_of(phi),
      YoungFunction::holder_conjugate_power(p),
      *std::max_element(p.begin(), p.end()),
      *std::min_element(p.begin(), p.end()),
  };
}

}  // namespace mo
