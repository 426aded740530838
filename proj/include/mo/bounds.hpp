#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mo/delta2.hpp"
#include "mo/young.hpp"

namespace mo {

// C_h := 2 + ||h_Phi||_{L^1} + ||h_Psi||_{L^1} / K_Psi.
inline double c_h(double h_phi_l1, double k_psi, double h_psi_l1) {
  if (!(k_psi > 1.0)) throw std::domain_error("c_h: K_Psi must exceed 1");
  if (h_phi_l1 < 0.0 || h_psi_l1 < 0.0) throw std::domain_error("c_h: negative h norm");
  return 2.0 + h_phi_l1 + h_psi_l1 / k_psi;
}

struct CkxBound {
  long M = 0;
  double C = 0.0;  // 2 (M K^{M+1} + 1)
};

// The explicit bound C_{K,X} <= 2 (M K^{M+1} + 1) with M >= 1 the least
// integer satisfying 2^{-M} <= zeta00 / (48 K).
inline CkxBound c_kx_bound(double K, double zeta00) {
  if (!(K > 1.0)) throw std::domain_error("c_kx_bound: K must exceed 1");
  if (!(zeta00 > 0.0) || zeta00 > 1.0)
    throw std::domain_error("c_kx_bound: zeta00 must lie in (0, 1]");
  const double target = 48.0 * K / zeta00;
  long M = 1;
  double pw = 2.0;
  while (pw < target) {
    pw *= 2.0;
    ++M;
    if (M > 4096) throw std::overflow_error("c_kx_bound: M out of range");
  }
  double k_pow = 1.0;
  for (long i = 0; i <= M; ++i) k_pow *= K;  // K^{M+1}
  return CkxBound{M, 2.0 * (double(M) * k_pow + 1.0)};
}

// zeta(0,0) >= 1 / (6 K_Psi C_{K_Phi,X} C_h).
inline double zeta_lower(double k_psi, double c_kx, double ch) {
  if (!(k_psi > 0.0) || !(c_kx > 0.0) || !(ch > 0.0))
    throw std::domain_error("zeta_lower: arguments must be positive");
  return 1.0 / (6.0 * k_psi * c_kx * ch);
}

// beta_p <= 432 K_Psi C_{K_Phi,X} C_h (p+1)^2 / (p-1); algebraically equal to
// 72 / zeta_lower * (p+1)^2 / (p-1) since 432 = 72 * 6.
inline double beta_upper(double p, double k_psi, double c_kx, double ch) {
  if (!(p > 1.0)) throw std::domain_error("beta_upper: p must exceed 1");
  return 432.0 * k_psi * c_kx * ch * (p + 1.0) * (p + 1.0) / (p - 1.0);
}

// The closing-Remark reading of the variable-Lebesgue constants (K_Phi = p_+,
// K_Psi = p_-'), kept alongside the proven 2^{p_+}, 2^{p_-'} reading so the
// discrepancy stays visible instead of being silently corrected.
struct RemarkConstants {
  double K_phi = 0.0;
  double K_psi = 0.0;
  long M = 0;
  double C_KX = 0.0;
  double zeta00_lower = 0.0;
};

struct ConstantsReport {
  double K_phi = 0.0;
  double h_phi_l1 = 0.0;
  double K_psi = 0.0;
  double h_psi_l1 = 0.0;
  double C_h = 0.0;

  double zeta00_fiber = 1.0;  // admissible zeta(0,0) of the scalar fiber
  long M = 0;
  double C_KX = 0.0;
  double zeta00_lower = 0.0;
  std::map<double, double> beta_upper_by_p;

  // Variable-Lebesgue extras; NaN when not applicable.
  double p_plus = std::numeric_limits<double>::quiet_NaN();
  double p_minus = std::numeric_limits<double>::quiet_NaN();
  double p_minus_conj = std::numeric_limits<double>::quiet_NaN();
  std::optional<RemarkConstants> remark_variant;
  bool remark_matches = false;
};

inline ConstantsReport constants_report(const Delta2Certificate& cert_phi,
                                        const Delta2Certificate& cert_psi, double zeta00_fiber,
                                        std::span<const double> p_list) {
  if (!cert_phi.valid || !cert_psi.valid)
    throw std::invalid_argument("constants_report: need two valid Delta2 certificates");
  ConstantsReport rep;
  rep.K_phi = cert_phi.K;
  rep.h_phi_l1 = cert_phi.h_l1;
  rep.K_psi = cert_psi.K;
  rep.h_psi_l1 = cert_psi.h_l1;
  rep.C_h = c_h(rep.h_phi_l1, rep.K_psi, rep.h_psi_l1);
  rep.zeta00_fiber = zeta00_fiber;
  const CkxBound ckx = c_kx_bound(rep.K_phi, zeta00_fiber);
  rep.M = ckx.M;
  rep.C_KX = ckx.C;
  rep.zeta00_lower = zeta_lower(rep.K_psi, rep.C_KX, rep.C_h);
  for (double p : p_list)
    rep.beta_upper_by_p[p] = beta_upper(p, rep.K_psi, rep.C_KX, rep.C_h);
  return rep;
}

struct VariableLebesgueReport {
  bool admissible = false;
  std::string reason;
  ConstantsReport report;
};

/**
// Constants for the variable-Lebesgue space with exponent map p: the proven
// reading K_Phi = 2^{p_+}, K_Psi = 2^{p_-'}, h = 0 (so C_h = 2), plus the
// closing-Remark literal variant side by side. Spaces with min p = 1 or an
// unbounded exponent are rejected: the Delta2 pair fails there.
*/
inline VariableLebesgueReport variable_lebesgue_report(std::span<const double> p_map,
                                                       std::span<const double> p_list,
                                                       double zeta00_fiber = 1.0) {
  VariableLebesgueReport out;
  if (p_map.empty()) throw std::invalid_argument("variable_lebesgue_report: empty exponent map");
  double p_plus = 1.0, p_minus = std::numeric_limits<double>::infinity();
  for (double p : p_map) {
    if (!(p >= 1.0)) throw std::domain_error("variable_lebesgue_report: exponent below 1");
    p_plus = std::max(p_plus, p);
    p_minus = std::min(p_minus, p);
  }
  if (!std::isfinite(p_plus)) {
    out.reason = "p_+ is infinite; Phi is not Delta2";
    return out;
  }
  if (p_minus <= 1.0) {
    out.reason = "min p = 1; the complementary function is not Delta2";
    return out;
  }

  ConstantsReport& rep = out.report;
  rep.p_plus = p_plus;
  rep.p_minus = p_minus;
  rep.p_minus_conj = holder_conjugate(p_minus);
  rep.K_phi = detail::pow_young(2.0, p_plus);
  rep.K_psi = detail::pow_young(2.0, rep.p_minus_conj);
  rep.h_phi_l1 = 0.0;
  rep.h_psi_l1 = 0.0;
  rep.C_h = c_h(0.0, rep.K_psi, 0.0);
  rep.zeta00_fiber = zeta00_fiber;
  const CkxBound ckx = c_kx_bound(rep.K_phi, zeta00_fiber);
  rep.M = ckx.M;
  rep.C_KX = ckx.C;
  rep.zeta00_lower = zeta_lower(rep.K_psi, rep.C_KX, rep.C_h);
  for (double p : p_list)
    rep.beta_upper_by_p[p] = beta_upper(p, rep.K_psi, rep.C_KX, rep.C_h);

  RemarkConstants rv;
  rv.K_phi = p_plus;
  rv.K_psi = rep.p_minus_conj;
  const CkxBound rckx = c_kx_bound(rv.K_phi, zeta00_fiber);
  rv.M = rckx.M;
  rv.C_KX = rckx.C;
  rv.zeta00_lower = zeta_lower(rv.K_psi, rv.C_KX, 2.0);
  rep.remark_variant = rv;
  rep.remark_matches = rv.K_phi == rep.K_phi && rv.K_psi == rep.K_psi;

  out.admissible = true;
  return out;
}

struct CertifyResult {
  bool certified = false;
  double bound = 0.0;         // beta_upper at the requested p
  double lower_margin = 0.0;  // ratio - (1 - 1e-9)
  double upper_margin = 0.0;  // bound - ratio
};

// Empirical best transform ratio against the theoretical envelope:
// certified iff 1 - 1e-9 <= ratio <= beta_upper(p).
inline CertifyResult certify(double empirical_best_ratio, const ConstantsReport& rep, double p) {
  CertifyResult r;
  r.bound = beta_upper(p, rep.K_psi, rep.C_KX, rep.C_h);
  r.lower_margin = empirical_best_ratio - (1.0 - 1e-9);
  r.upper_margin = r.bound - empirical_best_ratio;
  r.certified = r.lower_margin >= 0.0 && r.upper_margin >= 0.0;
  return r;
}

}  // namespace mo
