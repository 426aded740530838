#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mo {

// A real number or +infinity. The infinite state is an explicit tag, never
// an IEEE payload stored in the value slot; a +inf double fed to the
// constructor (e.g. an overflowed pow) collapses into the tagged state.
//
// Conventions, fixed once for the whole library:
//   inf + x = inf,  c * inf = inf for c > 0,  0 * inf = 0,  inf - c = inf.
// Negative scaling of infinity is a logic error here, not -inf.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) : v_(v) {  // implicit on purpose
    if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN");
    if (std::isinf(v)) {
      if (v < 0) throw std::invalid_argument("ExtReal: -inf is not representable");
      finite_ = false;
      v_ = 0.0;
    }
  }

  static ExtReal infinity() {
    ExtReal r;
    r.finite_ = false;
    return r;
  }

  constexpr bool is_finite() const { return finite_; }

  double value() const {
    if (!finite_) throw std::logic_error("ExtReal: value() called on +inf");
    return v_;
  }

  double value_or(double inf_stand_in) const { return finite_ ? v_ : inf_stand_in; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtReal(a.v_ + b.v_);
  }
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  friend ExtReal operator*(double c, ExtReal a) {
    if (c == 0.0) return ExtReal(0.0);
    if (c < 0.0) {
      if (!a.finite_) throw std::logic_error("ExtReal: negative multiple of +inf");
      return ExtReal(c * a.v_);
    }
    return a.finite_ ? ExtReal(c * a.v_) : infinity();
  }
  friend ExtReal operator*(ExtReal a, double c) { return c * a; }

  friend ExtReal operator-(ExtReal a, double c) {
    return a.finite_ ? ExtReal(a.v_ - c) : infinity();
  }

  friend bool operator==(ExtReal a, ExtReal b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.v_ == b.v_;
  }
  friend bool operator!=(ExtReal a, ExtReal b) { return !(a == b); }
  friend bool operator<(ExtReal a, ExtReal b) {
    if (!a.finite_) return false;          // inf < anything is false
    if (!b.finite_) return true;           // finite < inf
    return a.v_ < b.v_;
  }
  friend bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }
  friend bool operator>=(ExtReal a, ExtReal b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.finite_) return os << a.v_;
    return os << "inf";
  }

 private:
  double v_ = 0.0;
  bool finite_ = true;
};

}  // namespace mo
