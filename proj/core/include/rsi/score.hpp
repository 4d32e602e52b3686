#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>

namespace rsi {

/// Index of a program; programs are numbered 0..n-1.
using ProgramIndex = std::uint32_t;

/// Extended nonnegative real: a finite value or +infinity.
///
/// Infinity is a distinct state rather than an IEEE inf so that a/b updates
/// never produce NaN. Two infinite scores compare equal, so `inf < inf` is
/// false, which is what the strict-improvement move rule needs.
class Score {
 public:
  constexpr Score() = default;

  static constexpr Score infinity() { return Score{}; }
  static Score finite(double value);

  [[nodiscard]] constexpr bool is_finite() const { return finite_; }
  [[nodiscard]] constexpr bool is_infinite() const { return !finite_; }

  /// Finite value; throws std::logic_error when infinite.
  [[nodiscard]] double value() const;

  /// Finite value, or std::numeric_limits<double>::infinity().
  [[nodiscard]] constexpr double as_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend constexpr bool operator==(Score lhs, Score rhs) {
    if (lhs.finite_ != rhs.finite_) return false;
    return !lhs.finite_ || lhs.value_ == rhs.value_;
  }

  friend constexpr std::weak_ordering operator<=>(Score lhs, Score rhs) {
    if (!lhs.finite_ || !rhs.finite_) {
      return rhs.finite_ <=> lhs.finite_;
    }
    if (lhs.value_ < rhs.value_) return std::weak_ordering::less;
    if (rhs.value_ < lhs.value_) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }

 private:
  constexpr explicit Score(double value, bool) : value_(value), finite_(true) {}

  double value_ = 0.0;
  bool finite_ = false;
};

/// Renders a score as a 17-significant-digit decimal, or "inf".
std::string to_string(Score score);

/// Shortest decimal that parses back to the same double.
std::string shortest_decimal(double x);

std::ostream& operator<<(std::ostream& os, Score score);

}  // namespace rsi
