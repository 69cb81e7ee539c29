#pragma once

#include <cmath>

namespace drexp {

/// A real value extended with a tagged +infinity marker.
///
/// Unboundedness is a first-class verdict here, so +inf is carried as an
/// explicit tag rather than the IEEE infinity: any arithmetic involving the
/// marker yields the marker, and finite() lets callers branch before doing
/// float work.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: intentionally implicit

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool finite() const { return !infinite_; }
  constexpr bool infinite() const { return infinite_; }

  /// Finite value; meaningless when infinite().
  constexpr double value() const { return value_; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }
  friend constexpr ExtendedReal operator-(ExtendedReal a, double b) {
    if (a.infinite_) return infinity();
    return ExtendedReal(a.value_ - b);
  }
  friend constexpr bool operator<(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator>(ExtendedReal a, ExtendedReal b) { return b < a; }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace drexp
