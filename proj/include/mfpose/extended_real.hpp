#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace mfpose {

/// A real number or the NEG_INF sentinel.
///
/// Infeasibility is carried as an explicit flag instead of an IEEE -inf so
/// that no descriptor arithmetic ever sees an infinity (no inf*0 NaNs).
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : value_(v) {}

  static constexpr ExtendedReal neg_inf() {
    ExtendedReal r;
    r.neg_inf_ = true;
    return r;
  }

  constexpr bool is_neg_inf() const noexcept { return neg_inf_; }
  constexpr bool is_finite() const noexcept { return !neg_inf_; }

  /// Finite value; 0 for the sentinel.
  constexpr double value() const noexcept { return neg_inf_ ? 0.0 : value_; }
  constexpr double value_or(double floor) const noexcept { return neg_inf_ ? floor : value_; }
  /// IEEE view, for reporting only.
  double to_double() const noexcept { return neg_inf_ ? -std::numeric_limits<double>::infinity() : value_; }

  constexpr ExtendedReal& operator+=(const ExtendedReal& o) noexcept {
    if (o.neg_inf_) neg_inf_ = true;
    if (!neg_inf_) value_ += o.value_;
    return *this;
  }
  friend constexpr ExtendedReal operator+(ExtendedReal a, const ExtendedReal& b) noexcept { return a += b; }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.neg_inf_ && b.neg_inf_) return std::partial_ordering::equivalent;
    if (a.neg_inf_) return std::partial_ordering::less;
    if (b.neg_inf_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
  bool neg_inf_ = false;
};

}  // namespace mfpose
