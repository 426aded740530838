#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mo {

// Finite list of weighted atoms; the discrete carrier of every integral in
// this library. Weights are strictly positive.
struct AtomicMeasureSpace {
  std::vector<std::string> ids;
  std::vector<double> weights;

  AtomicMeasureSpace() = default;
  AtomicMeasureSpace(std::vector<std::string> atom_ids, std::vector<double> atom_weights)
      : ids(std::move(atom_ids)), weights(std::move(atom_weights)) {
    if (ids.size() != weights.size())
      throw std::invalid_argument("AtomicMeasureSpace: ids/weights size mismatch");
    if (weights.empty()) throw std::invalid_argument("AtomicMeasureSpace: no atoms");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("AtomicMeasureSpace: weights must be positive finite");
  }

  static AtomicMeasureSpace uniform(std::size_t n, double total_mass = 1.0) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "a" + std::to_string(i);
    return AtomicMeasureSpace(std::move(ids), std::vector<double>(n, total_mass / double(n)));
  }

  std::size_t size() const { return weights.size(); }
  double total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

// One scalar per atom (the Banach space of values is fixed to the reals).
struct SimpleFunction {
  std::vector<double> v;

  SimpleFunction() = default;
  explicit SimpleFunction(std::size_t n, double fill = 0.0) : v(n, fill) {}
  SimpleFunction(std::initializer_list<double> init) : v(init) {}
  explicit SimpleFunction(std::vector<double> values) : v(std::move(values)) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  bool is_zero() const {
    for (double x : v)
      if (x != 0.0) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  }

  SimpleFunction& operator+=(const SimpleFunction& o) {
    check_size(o);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  SimpleFunction& operator-=(const SimpleFunction& o) {
    check_size(o);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  SimpleFunction& operator*=(double c) {
    for (double& x : v) x *= c;
    return *this;
  }

  friend SimpleFunction operator+(SimpleFunction a, const SimpleFunction& b) { return a += b; }
  friend SimpleFunction operator-(SimpleFunction a, const SimpleFunction& b) { return a -= b; }
  friend SimpleFunction operator*(double c, SimpleFunction a) { return a *= c; }
  friend SimpleFunction operator-(SimpleFunction a) { return a *= -1.0; }

 private:
  void check_size(const SimpleFunction& o) const {
    if (o.v.size() != v.size()) throw std::invalid_argument("SimpleFunction: size mismatch");
  }
};

}  // namespace mo
