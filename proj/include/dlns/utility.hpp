#pragma once

#include <cmath>
#include <cstdio>
#include <compare>
#include <cstddef>
#include <ostream>
#include <string>

namespace dlns {

/// Extended utility: a finite real or the hard-constraint value NEG_INF.
///
/// NEG_INF is a flag, not a floating-point infinity, so it survives
/// serialization unchanged and its absorption rules are explicit:
/// NEG_INF + u = NEG_INF and max(NEG_INF, u) = u.
class Utility {
public:
  constexpr Utility() noexcept = default;
  constexpr Utility(double v) noexcept : value_(v) {}  // NOLINT: implicit by intent

  static constexpr Utility neg_inf() noexcept {
    Utility u;
    u.neg_inf_ = true;
    return u;
  }

  constexpr bool is_neg_inf() const noexcept { return neg_inf_; }
  constexpr bool is_finite() const noexcept { return !neg_inf_; }

  // Only meaningful when finite.
  constexpr double value() const noexcept { return value_; }

  constexpr Utility& operator+=(Utility rhs) noexcept {
    if (neg_inf_ || rhs.neg_inf_) {
      *this = neg_inf();
    } else {
      value_ += rhs.value_;
    }
    return *this;
  }

  friend constexpr Utility operator+(Utility a, Utility b) noexcept { return a += b; }

  // Division of a finite utility by a positive count; NEG_INF stays NEG_INF.
  friend constexpr Utility operator/(Utility a, std::size_t n) noexcept {
    return a.neg_inf_ ? a : Utility(a.value_ / static_cast<double>(n));
  }

  friend constexpr bool operator==(Utility a, Utility b) noexcept {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }

  friend constexpr std::partial_ordering operator<=>(Utility a, Utility b) noexcept {
    if (a.neg_inf_ && b.neg_inf_) return std::partial_ordering::equivalent;
    if (a.neg_inf_) return std::partial_ordering::less;
    if (b.neg_inf_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

private:
  double value_ = 0.0;
  bool neg_inf_ = false;
};

inline constexpr Utility kNegInf = Utility::neg_inf();

constexpr Utility max(Utility a, Utility b) noexcept { return a < b ? b : a; }

// |a - b| <= tol, with NEG_INF equal only to itself.
inline bool near(Utility a, Utility b, double tol = 1e-9) {
  if (a.is_neg_inf() || b.is_neg_inf()) return a.is_neg_inf() && b.is_neg_inf();
  return std::abs(a.value() - b.value()) <= tol;
}

// "-inf" for NEG_INF; integral values print without a fractional part.
inline std::string to_string(Utility u) {
  if (u.is_neg_inf()) return "-inf";
  double v = u.value();
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ostream& operator<<(std::ostream& os, Utility u) { return os << to_string(u); }

}  // namespace dlns
