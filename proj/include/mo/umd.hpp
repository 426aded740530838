#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mo/bounds.hpp"
#include "mo/delta2.hpp"
#include "mo/martingale.hpp"
#include "mo/rng.hpp"

namespace mo {

// ||(eps*f)_n||_{L^p(Omega;Y)} / ||f_n||_{L^p(Omega;Y)} with the Luxemburg
// node norm. The denominator must not vanish.
inline double transform_ratio(const PaleyWalshMartingale& f, const SignSequence& eps, double p) {
  const PathNorm norm = PathNorm::luxemburg();
  const double denom = lp_omega_norm(f, p, norm);
  if (denom <= 0.0) throw std::domain_error("transform_ratio: degenerate f_n = 0");
  return lp_omega_norm(transform(f, eps), p, norm) / denom;
}

// Exact maximum of the transform ratio over all 2^n sign sequences.
inline double best_ratio_over_signs(const PaleyWalshMartingale& f, double p,
                                    SignSequence* best_signs = nullptr) {
  const int n = f.depth();
  const PathNorm norm = PathNorm::luxemburg();
  const double denom = lp_omega_norm(f, p, norm);
  if (denom <= 0.0) throw std::domain_error("best_ratio_over_signs: degenerate f_n = 0");
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = (std::uint64_t(1) << n) - 1;  // eps = +1 everywhere
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    const double num = lp_omega_norm(transform(f, SignSequence::from_mask(std::size_t(n), mask)),
                                     p, norm);
    if (num / denom > best) {
      best = num / denom;
      best_mask = mask;
    }
  }
  if (best_signs) *best_signs = SignSequence::from_mask(std::size_t(n), best_mask);
  return best;
}

struct UmdBudget {
  int restarts = 8;
  int steps = 64;
};

struct UmdEstimate {
  double best_ratio = 0.0;
  SignSequence best_signs;
  PaleyWalshMartingale best_martingale;
  int restarts = 0;
  long ascent_steps = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
  int depth = 0;
};

/**
// Empirical lower bound on the UMD constant beta_{p,Y}: maximizes the
// transform ratio over all sign sequences (exact enumeration) and over
// martingale leaf values by random restarts plus coordinate ascent. A step
// perturbs one leaf at one atom, re-projects onto the martingale manifold by
// subtree averaging (with the root forced back to zero), and keeps the
// perturbation only if the best-over-signs ratio improves.
//
// Each restart runs on its own derived RNG stream, so the estimate is
// deterministic per seed and monotone nondecreasing in both restarts and
// steps: growing the budget only extends or adds search paths.
*/
inline UmdEstimate estimate_umd(std::shared_ptr<const OrliczSpace> space, double p, int depth,
                                UmdBudget budget, std::uint64_t seed) {
  if (!(p > 1.0)) throw std::domain_error("estimate_umd: p must lie in (1, inf)");
  if (budget.restarts < 1) throw std::invalid_argument("estimate_umd: need >= 1 restart");
  if (budget.steps < 0) throw std::invalid_argument("estimate_umd: negative step budget");

  UmdEstimate out{0.0,
                  SignSequence::all_plus(std::size_t(depth)),
                  PaleyWalshMartingale(space, depth),
                  0,
                  0,
                  seed,
                  p,
                  depth};
  out.best_ratio = -std::numeric_limits<double>::infinity();

  for (int r = 0; r < budget.restarts; ++r) {
    Rng rng(Rng::mix(seed, std::uint64_t(r)));

    PaleyWalshMartingale f = random_martingale(space, depth, 1.0, rng);
    for (int attempt = 0; attempt < 16 && f.sup_leaf_luxemburg() <= 0.0; ++attempt)
      f = random_martingale(space, depth, 1.0, rng);  // discard degenerate draws
    SignSequence signs = SignSequence::all_plus(std::size_t(depth));
    double ratio = best_ratio_over_signs(f, p, &signs);

    for (int step = 0; step < budget.steps; ++step) {
      ++out.ascent_steps;
      std::vector<SimpleFunction> leaves;
      leaves.reserve(f.leaf_count());
      for (std::uint32_t i = 0; i < f.leaf_count(); ++i) leaves.push_back(f.value(depth, i));
      const std::size_t leaf = std::size_t(rng.integer(f.leaf_count()));
      const std::size_t atom = std::size_t(rng.integer(f.atoms()));
      leaves[leaf][atom] += rng.symmetric();

      PaleyWalshMartingale cand = PaleyWalshMartingale::from_leaves(space, leaves);
      const double sup = cand.sup_leaf_luxemburg();
      if (sup <= 1e-12) continue;
      cand.scale(1.0 / sup);

      SignSequence cand_signs = SignSequence::all_plus(std::size_t(depth));
      const double cand_ratio = best_ratio_over_signs(cand, p, &cand_signs);
      if (cand_ratio > ratio) {
        ratio = cand_ratio;
        f = std::move(cand);
        signs = std::move(cand_signs);
      }
    }

    ++out.restarts;
    if (ratio > out.best_ratio) {
      out.best_ratio = ratio;
      out.best_signs = signs;
      out.best_martingale = f;
    }
  }
  return out;
}

/**
// The main estimate: for a Paley-Walsh martingale with sup_omega ||f_n|| <= 1
// and a sign sequence eps, the expected running maximum of ||(eps*f)_k|| is
// dominated by K_Psi * C_{K_Phi,X} * C_h. Returns bound - E sup_k ||g_k||.
*/
inline double main_estimate_check(const PaleyWalshMartingale& f, const SignSequence& eps,
                                  const Delta2Certificate& cert_phi,
                                  const Delta2Certificate& cert_psi, double zeta00) {
  if (!cert_phi.valid || !cert_psi.valid)
    throw std::invalid_argument("main_estimate_check: need valid Delta2 certificates");
  const PaleyWalshMartingale g = transform(f, eps);
  const std::vector<double> sup_per_path = maximal(g, PathNorm::luxemburg());
  double left = 0.0;
  for (double s : sup_per_path) left += s;
  left /= double(sup_per_path.size());

  const double bound =
      cert_psi.K * c_kx_bound(cert_phi.K, zeta00).C * c_h(cert_phi.h_l1, cert_psi.K, cert_psi.h_l1);
  return bound - left;
}

inline CertifyResult certify(const UmdEstimate& est, const ConstantsReport& rep) {
  return certify(est.best_ratio, rep, est.p);
}

// The scalar-fiber zeta witness zeta(x, y) = 1 + x y: biconvex, zeta(0,0) = 1,
// and zeta <= |x + y| on unit vectors of R (checked on a grid rather than
// assumed). Any admissible witness makes zeta00 = 1 usable in c_kx_bound.
inline bool zeta_witness_valid(int grid_points = 21) {
  auto zeta = [](double x, double y) { return 1.0 + x * y; };
  // Boundary inequality on the unit sphere of R, i.e. x, y in {-1, +1}.
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0})
      if (zeta(x, y) > std::fabs(x + y) + 1e-12) return false;
  if (!(zeta(0.0, 0.0) > 0.0)) return false;
  // Midpoint convexity in each slot over [-1, 1]^2.
  for (int i = 0; i < grid_points; ++i) {
    const double fixed = -1.0 + 2.0 * double(i) / double(grid_points - 1);
    for (int a = 0; a < grid_points; ++a) {
      for (int b = a; b < grid_points; ++b) {
        const double u = -1.0 + 2.0 * double(a) / double(grid_points - 1);
        const double v = -1.0 + 2.0 * double(b) / double(grid_points - 1);
        if (zeta(fixed, 0.5 * (u + v)) > 0.5 * (zeta(fixed, u) + zeta(fixed, v)) + 1e-12)
          return false;
        if (zeta(0.5 * (u + v), fixed) > 0.5 * (zeta(u, fixed) + zeta(v, fixed)) + 1e-12)
          return false;
      }
    }
  }
  return true;
}

inline constexpr double kScalarFiberZeta00 = 1.0;

}  // namespace mo
