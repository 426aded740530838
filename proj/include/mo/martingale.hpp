#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mo/measure.hpp"
#include "mo/norms.hpp"
#include "mo/rng.hpp"
#include "mo/young.hpp"

namespace mo {

// The discretized L^Phi(T) martingales take values in.
struct OrliczSpace {
  AtomicMeasureSpace atoms;
  YoungFunction phi;

  OrliczSpace(AtomicMeasureSpace a, YoungFunction f) : atoms(std::move(a)), phi(std::move(f)) {
    if (atoms.size() != phi.atom_count())
      throw std::invalid_argument("OrliczSpace: atom count mismatch");
  }

  double luxemburg(const SimpleFunction& f) const {
    const NormResult r = luxemburg_norm(phi, atoms, f);
    if (!r.converged) throw std::runtime_error("OrliczSpace: Luxemburg norm did not converge");
    return r.value;
  }
};

// epsilon_k in {-1, +1} for k = 1..n.
class SignSequence {
 public:
  explicit SignSequence(std::vector<int> signs) : s_(std::move(signs)) {
    for (int s : s_)
      if (s != 1 && s != -1) throw std::invalid_argument("SignSequence: entries must be +-1");
  }

  static SignSequence all_plus(std::size_t n) { return SignSequence(std::vector<int>(n, 1)); }
  static SignSequence all_minus(std::size_t n) { return SignSequence(std::vector<int>(n, -1)); }

  // Bit k-1 of mask set means epsilon_k = +1.
  static SignSequence from_mask(std::size_t n, std::uint64_t mask) {
    std::vector<int> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = (mask >> k) & 1 ? 1 : -1;
    return SignSequence(std::move(s));
  }

  std::size_t size() const { return s_.size(); }
  int at(std::size_t k) const { return s_.at(k - 1); }  // 1-based level index

  std::string to_string() const {
    std::string out;
    out.reserve(s_.size());
    for (int s : s_) out.push_back(s > 0 ? '+' : '-');
    return out;
  }

  static SignSequence parse(const std::string& text) {
    std::vector<int> s;
    s.reserve(text.size());
    for (char c : text) {
      if (c == '+')
        s.push_back(1);
      else if (c == '-')
        s.push_back(-1);
      else
        throw std::invalid_argument("SignSequence: expected only '+'/'-'");
    }
    return SignSequence(std::move(s));
  }

 private:
  std::vector<int> s_;
};

/**
// Paley-Walsh martingale on the full dyadic tree of depth n <= 10, with
// f_0 = 0 and value(node) = mean of its two children.
//
// Storage is by node increments d_k(node) = f_k(node) - f_{k-1}(parent) with
// sibling increments exact negatives of each other, so the martingale
// identity holds with zero residual and a sign transform is a bit-exact
// operation (it only flips increment signs). Values are materialized
// alongside the increments.
//
// Node indexing at level k: index i in [0, 2^k); children of (k, i) are
// (k+1, 2i) for the '-' branch and (k+1, 2i+1) for the '+' branch. The
// ancestor of leaf L at level k is L >> (n - k).
*/
class PaleyWalshMartingale {
 public:
  static constexpr int kMaxDepth = 10;

  PaleyWalshMartingale(std::shared_ptr<const OrliczSpace> space, int depth)
      : space_(std::move(space)), depth_(depth) {
    if (!space_) throw std::invalid_argument("PaleyWalshMartingale: null space");
    if (depth_ < 1 || depth_ > kMaxDepth)
      throw std::invalid_argument("PaleyWalshMartingale: depth must be in [1, 10]");
    const std::size_t atoms = space_->atoms.size();
    inc_.resize(std::size_t(depth_));
    for (int k = 1; k <= depth_; ++k)
      inc_[std::size_t(k - 1)].assign(std::size_t(1) << k, SimpleFunction(atoms));
    materialize();
  }

  // Per-parent '+'-child increments; the '-' child gets the exact negative.
  // plus_inc[k-1] has 2^{k-1} entries, one per level-(k-1) parent.
  static PaleyWalshMartingale from_plus_increments(
      std::shared_ptr<const OrliczSpace> space,
      const std::vector<std::vector<SimpleFunction>>& plus_inc) {
    PaleyWalshMartingale f(std::move(space), int(plus_inc.size()));
    for (int k = 1; k <= f.depth_; ++k) {
      const auto& level = plus_inc[std::size_t(k - 1)];
      if (level.size() != (std::size_t(1) << (k - 1)))
        throw std::invalid_argument("from_plus_increments: wrong level size");
      for (std::size_t parent = 0; parent < level.size(); ++parent)
        f.set_increment(k, std::uint32_t(parent), level[parent]);
    }
    f.materialize();
    return f;
  }

  // Projection onto the martingale manifold from prescribed leaf values:
  // interior nodes by subtree averaging, increments split exactly
  // symmetrically, and the root forced to zero (a global shift, absorbed by
  // keeping the level-1 increments as computed).
  static PaleyWalshMartingale from_leaves(std::shared_ptr<const OrliczSpace> space,
                                          const std::vector<SimpleFunction>& leaves) {
    int depth = 0;
    while ((std::size_t(1) << depth) < leaves.size()) ++depth;
    if ((std::size_t(1) << depth) != leaves.size() || depth < 1)
      throw std::invalid_argument("from_leaves: leaf count must be 2^n, n >= 1");
    PaleyWalshMartingale f(std::move(space), depth);
    std::vector<SimpleFunction> cur = leaves;
    for (int k = depth; k >= 1; --k) {
      std::vector<SimpleFunction> parents(cur.size() / 2);
      for (std::size_t parent = 0; parent < parents.size(); ++parent) {
        const SimpleFunction& minus = cur[2 * parent];
        const SimpleFunction& plus = cur[2 * parent + 1];
        f.set_increment(k, std::uint32_t(parent), 0.5 * (plus - minus));
        parents[parent] = 0.5 * (plus + minus);
      }
      cur = std::move(parents);
    }
    f.materialize();
    return f;
  }

  int depth() const { return depth_; }
  std::size_t atoms() const { return space_->atoms.size(); }
  std::size_t leaf_count() const { return std::size_t(1) << depth_; }
  const OrliczSpace& space() const { return *space_; }
  const std::shared_ptr<const OrliczSpace>& space_ptr() const { return space_; }

  // f_k at node (k, i); level 0 is the zero function.
  const SimpleFunction& value(int k, std::uint32_t node) const {
    return values_.at(std::size_t(k)).at(node);
  }

  // d_k at node (k, i), k >= 1.
  const SimpleFunction& increment(int k, std::uint32_t node) const {
    return inc_.at(std::size_t(k - 1)).at(node);
  }

  void scale(double c) {
    for (auto& level : inc_)
      for (auto& d : level) d *= c;
    materialize();
  }

  // max over internal nodes of |value - mean(children)|, plus |f_0|.
  double martingale_residual() const {
    double worst = 0.0;
    for (double x : values_[0][0].v) worst = std::max(worst, std::fabs(x));
    for (int k = 0; k < depth_; ++k) {
      for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i) {
        const SimpleFunction& parent = values_[std::size_t(k)][i];
        const SimpleFunction& minus = values_[std::size_t(k + 1)][2 * i];
        const SimpleFunction& plus = values_[std::size_t(k + 1)][2 * i + 1];
        for (std::size_t a = 0; a < parent.size(); ++a)
          worst = std::max(worst, std::fabs(0.5 * (minus[a] + plus[a]) - parent[a]));
      }
    }
    return worst;
  }

  void require_valid(double tol = 1e-12) const {
    if (martingale_residual() > tol)
      throw std::logic_error("PaleyWalshMartingale: martingale property violated");
  }

  double max_abs_value() const {
    double m = 0.0;
    for (const auto& level : values_)
      for (const SimpleFunction& v : level) m = std::max(m, v.max_abs());
    return m;
  }

  double sup_leaf_luxemburg() const {
    double m = 0.0;
    for (const SimpleFunction& leaf : values_[std::size_t(depth_)])
      m = std::max(m, space_->luxemburg(leaf));
    return m;
  }

 private:
  friend PaleyWalshMartingale transform(const PaleyWalshMartingale&, const SignSequence&);

  void set_increment(int k, std::uint32_t parent, SimpleFunction d) {
    auto& level = inc_[std::size_t(k - 1)];
    level[2 * parent + 1] = d;
    level[2 * parent] = -std::move(d);
  }

  void materialize() {
    const std::size_t atoms = space_->atoms.size();
    values_.assign(std::size_t(depth_) + 1, {});
    values_[0].assign(1, SimpleFunction(atoms));
    for (int k = 1; k <= depth_; ++k) {
      values_[std::size_t(k)].resize(std::size_t(1) << k);
      for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i)
        values_[std::size_t(k)][i] =
            values_[std::size_t(k - 1)][i >> 1] + inc_[std::size_t(k - 1)][i];
    }
  }

  std::shared_ptr<const OrliczSpace> space_;
  int depth_;
  std::vector<std::vector<SimpleFunction>> inc_;     // inc_[k-1][node], k = 1..n
  std::vector<std::vector<SimpleFunction>> values_;  // values_[k][node], k = 0..n
};

// Mean-zero martingale with independent symmetric increments, rescaled so
// sup over leaves of the Luxemburg norm is `scale`. Deterministic per seed.
inline PaleyWalshMartingale random_martingale(std::shared_ptr<const OrliczSpace> space,
                                              int depth, double scale, Rng& rng) {
  const std::size_t atoms = space->atoms.size();
  std::vector<std::vector<SimpleFunction>> plus_inc(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) {
    auto& level = plus_inc[std::size_t(k - 1)];
    level.assign(std::size_t(1) << (k - 1), SimpleFunction(atoms));
    for (auto& d : level)
      for (std::size_t a = 0; a < atoms; ++a) d[a] = rng.symmetric();
  }
  PaleyWalshMartingale f =
      PaleyWalshMartingale::from_plus_increments(std::move(space), plus_inc);
  const double sup = f.sup_leaf_luxemburg();
  if (sup > 0.0 && scale > 0.0) f.scale(scale / sup);
  return f;
}

inline PaleyWalshMartingale random_martingale(std::shared_ptr<const OrliczSpace> space,
                                              int depth, double scale, std::uint64_t seed) {
  Rng rng(seed);
  return random_martingale(std::move(space), depth, scale, rng);
}

// The epsilon-transform (eps * f)_k = sum_{j<=k} eps_j (f_j - f_{j-1}).
// On increments this is a pure sign flip per level, so eps = +1 reproduces f
// bit-exactly and eps = -1 gives exactly -f.
inline PaleyWalshMartingale transform(const PaleyWalshMartingale& f, const SignSequence& eps) {
  if (eps.size() != std::size_t(f.depth()))
    throw std::invalid_argument("transform: sign sequence length mismatch");
  PaleyWalshMartingale g = f;
  for (int k = 1; k <= f.depth(); ++k) {
    if (eps.at(std::size_t(k)) < 0)
      for (auto& d : g.inc_[std::size_t(k - 1)]) d *= -1.0;
  }
  g.materialize();
  g.require_valid(1e-12 * std::max(1.0, g.max_abs_value()));
  return g;
}

// How a node value is reduced to a scalar for maximal functions and
// L^p(Omega) norms: the Luxemburg norm of the whole simple function, or the
// absolute value at one atom (the t-fiberwise view).
class PathNorm {
 public:
  static PathNorm luxemburg() { return PathNorm{true, 0}; }
  static PathNorm atom_abs(std::size_t t) { return PathNorm{false, t}; }

  double operator()(const OrliczSpace& space, const SimpleFunction& f) const {
    if (!luxemburg_) return std::fabs(f[atom_]);
    // One-atom spaces admit the exact homogeneous shortcut |v| * ||e_0||.
    if (f.size() == 1) {
      if (unit_norm_ < 0.0)
        unit_norm_ = space.luxemburg(SimpleFunction{1.0});
      return std::fabs(f[0]) * unit_norm_;
    }
    return space.luxemburg(f);
  }

 private:
  PathNorm(bool lux, std::size_t atom) : luxemburg_(lux), atom_(atom) {}
  bool luxemburg_;
  std::size_t atom_;
  mutable double unit_norm_ = -1.0;
};

// Pathwise running maximum max_{0<=k<=n} ||f_k|| per leaf path.
inline std::vector<double> maximal(const PaleyWalshMartingale& f, const PathNorm& norm) {
  const int n = f.depth();
  // Norms per node, then a root-to-leaf running max down the tree.
  std::vector<std::vector<double>> run(std::size_t(n) + 1);
  run[0].assign(1, norm(f.space(), f.value(0, 0)));
  for (int k = 1; k <= n; ++k) {
    run[std::size_t(k)].resize(std::size_t(1) << k);
    for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i)
      run[std::size_t(k)][i] =
          std::max(run[std::size_t(k - 1)][i >> 1], norm(f.space(), f.value(k, i)));
  }
  return run[std::size_t(n)];
}

// (2^{-n} sum over leaves ||f_n(omega)||^p)^{1/p}.
inline double lp_omega_norm(const PaleyWalshMartingale& f, double p, const PathNorm& norm) {
  if (!(p > 1.0)) throw std::domain_error("lp_omega_norm: p must exceed 1");
  const int n = f.depth();
  double acc = 0.0;
  for (std::uint32_t i = 0; i < (std::uint32_t(1) << n); ++i)
    acc += std::pow(norm(f.space(), f.value(n, i)), p);
  return std::pow(acc / double(std::size_t(1) << n), 1.0 / p);
}

}  // namespace mo
