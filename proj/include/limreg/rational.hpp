#ifndef LIMREG_RATIONAL_HPP
#define LIMREG_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace limreg {

/// Thrown when an exact operation would overflow 64-bit storage.
class RationalOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Exact fraction num/den held in lowest terms with den > 0.
///
/// Intermediate products use 128-bit integers; a result whose reduced form
/// does not fit in 64 bits raises RationalOverflow rather than rounding.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit from integer
  Rational(std::int64_t n, std::int64_t d);

  /// Parses "p/q", "p" or "-p/q". Decimal points are rejected.
  static Rational parse(std::string_view text);

  [[nodiscard]] constexpr std::int64_t num() const { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const { return den_; }

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  /// "p/q", or "p" when the denominator is 1.
  [[nodiscard]] std::string str() const;
  /// Exact long division truncated (not rounded) to `digits` places.
  [[nodiscard]] std::string decimal(int digits = 10) const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational::raw(-a.num_, a.den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

 private:
  static Rational raw(std::int64_t n, std::int64_t d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
  }
  static Rational reduce(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace limreg

#endif  // LIMREG_RATIONAL_HPP
