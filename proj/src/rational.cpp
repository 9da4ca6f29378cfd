#include "limreg/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>

namespace limreg {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  constexpr __int128 kU64 = static_cast<__int128>(std::numeric_limits<std::uint64_t>::max());
  if (a <= kU64 && b <= kU64) {
    return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  }
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("not an exact rational: \"" + std::string(whole) + "\"");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  *this = reduce(n, d);
}

Rational Rational::reduce(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n == 0) d = 1;
  if (!fits64(n) || !fits64(d)) throw RationalOverflow("rational arithmetic overflow");
  return raw(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

namespace {

// Plain decimals like "0.375" convert to "3/8"; anything else gets a generic example.
std::string fraction_hint(std::string_view s) {
  const auto dot = s.find('.');
  const bool negative = !s.empty() && s.front() == '-';
  const std::size_t start = negative ? 1 : 0;
  if (dot == std::string_view::npos || s.size() - dot - 1 > 15 || dot - start > 3) return "1/4";
  std::int64_t num = 0;
  std::int64_t den = 1;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (i == dot) continue;
    if (s[i] < '0' || s[i] > '9') return "1/4";
    num = num * 10 + (s[i] - '0');
    if (i > dot) den *= 10;
  }
  return Rational(negative ? -num : num, den).str();
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const auto s = trim(text);
  if (s.find('.') != std::string_view::npos || s.find('e') != std::string_view::npos ||
      s.find('E') != std::string_view::npos) {
    throw std::invalid_argument("decimal input \"" + std::string(text) +
                                "\" is not exact; write it as a fraction such as \"" + fraction_hint(s) + "\"");
  }
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(s, text));
  const auto n = parse_int(trim(s.substr(0, slash)), text);
  const auto d = parse_int(trim(s.substr(slash + 1)), text);
  if (d == 0) throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
  return Rational(n, d);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::decimal(int digits) const {
  __int128 n = num_;
  std::string out;
  if (n < 0) {
    out.push_back('-');
    n = -n;
  }
  const __int128 whole = n / den_;
  __int128 rem = n % den_;
  out += std::to_string(static_cast<long long>(whole));
  if (digits > 0) {
    out.push_back('.');
    for (int i = 0; i < digits; ++i) {
      rem *= 10;
      out.push_back(static_cast<char>('0' + static_cast<int>(rem / den_)));
      rem %= den_;
    }
  }
  return out;
}

Rational& Rational::operator+=(const Rational& o) {
  if (den_ == o.den_) {
    *this = reduce(static_cast<__int128>(num_) + o.num_, den_);
  } else {
    *this = reduce(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
  }
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  *this = reduce(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  *this = reduce(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  return *this;
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace limreg
