#ifndef TROPICA_RATIONAL_HPP
#define TROPICA_RATIONAL_HPP

#include <cstdint>
#include <limits>
#include <string>

#include "tropica/errors.hpp"

namespace tropica {

using int128 = __int128;
using uint128 = unsigned __int128;

namespace detail {

inline int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw CapacityError("128-bit add overflow");
  return r;
}

inline int128 checked_sub(int128 a, int128 b) {
  int128 r;
  if (__builtin_sub_overflow(a, b, &r)) throw CapacityError("128-bit sub overflow");
  return r;
}

inline int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("128-bit mul overflow");
  return r;
}

inline int128 checked_neg(int128 a) { return checked_sub(0, a); }

inline uint128 gcd128(uint128 a, uint128 b) {
  while (b != 0) {
    uint128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline uint128 abs128(int128 a) {
  return a < 0 ? uint128(0) - uint128(a) : uint128(a);
}

inline std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  uint128 u = abs128(v);
  std::string s;
  while (u != 0) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

inline int128 int128_from_digits(const std::string& digits) {
  int128 v = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw ParseError("expected digit in integer literal");
    v = checked_add(checked_mul(v, 10), c - '0');
  }
  return v;
}

}  // namespace detail

// Exact rational with two points at infinity.  Invariant: gcd(|num|,den) = 1
// and den > 0 for finite values; den = 0 and num = +-1 encode +-infinity.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(int v) : num_(v), den_(1) {}
  Rat(long long v) : num_(v), den_(1) {}
  Rat(int128 n, int128 d) { assign(n, d); }

  static Rat pos_inf() { return Rat(raw_tag{}, 1, 0); }
  static Rat neg_inf() { return Rat(raw_tag{}, -1, 0); }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  bool is_finite() const { return den_ != 0; }
  bool is_pos_inf() const { return den_ == 0 && num_ > 0; }
  bool is_neg_inf() const { return den_ == 0 && num_ < 0; }
  bool is_zero() const { return num_ == 0 && den_ != 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

  friend bool operator<(const Rat& a, const Rat& b) {
    if (a.den_ == 0 || b.den_ == 0) {
      // At least one side is infinite; order by sign with finite in between.
      int sa = a.is_pos_inf() ? 2 : (a.is_neg_inf() ? -2 : 0);
      int sb = b.is_pos_inf() ? 2 : (b.is_neg_inf() ? -2 : 0);
      return sa < sb;
    }
    return detail::checked_mul(a.num_, b.den_) < detail::checked_mul(b.num_, a.den_);
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  Rat operator-() const {
    if (den_ == 0) return Rat(raw_tag{}, -num_, 0);
    return Rat(raw_tag{}, detail::checked_neg(num_), den_);
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    if (a.den_ == 0 || b.den_ == 0) {
      if (a.is_finite()) return b;
      if (b.is_finite()) return a;
      if (a.num_ == b.num_) return a;
      throw InvariantViolation("Rat: indeterminate inf + (-inf)");
    }
    return Rat(detail::checked_add(detail::checked_mul(a.num_, b.den_),
                                   detail::checked_mul(b.num_, a.den_)),
               detail::checked_mul(a.den_, b.den_));
  }

  friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }

  friend Rat operator*(const Rat& a, const Rat& b) {
    if (a.den_ == 0 || b.den_ == 0) {
      if (a.is_zero() || b.is_zero())
        throw InvariantViolation("Rat: indeterminate 0 * inf");
      int s = a.sign() * b.sign();
      return s > 0 ? pos_inf() : neg_inf();
    }
    return Rat(detail::checked_mul(a.num_, b.num_),
               detail::checked_mul(a.den_, b.den_));
  }

  // 1/0 = +inf and 1/(+-inf) = 0 so that x -> (1 + 1/x)^{-1} is total on
  // [0, +inf]; 0/0 stays an error.
  Rat inverse() const {
    if (den_ == 0) return Rat(0);
    if (num_ == 0) return pos_inf();
    return Rat(den_, num_);
  }

  friend Rat operator/(const Rat& a, const Rat& b) {
    if (a.is_zero() && b.is_zero())
      throw InvariantViolation("Rat: indeterminate 0 / 0");
    return a * b.inverse();
  }

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  double to_double() const {
    if (is_pos_inf()) return std::numeric_limits<double>::infinity();
    if (is_neg_inf()) return -std::numeric_limits<double>::infinity();
    return double(static_cast<long double>(num_) / static_cast<long double>(den_));
  }

  // "num" for integers, "num/den" otherwise, "inf"/"-inf" at the ends.
  std::string to_string() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    std::string s = detail::int128_to_string(num_);
    if (den_ != 1) s += "/" + detail::int128_to_string(den_);
    return s;
  }

  // Accepts "inf", "-inf", "a", "a/b" and decimal literals like "-1.25".
  static Rat parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    if (text == "inf" || text == "+inf") return pos_inf();
    if (text == "-inf") return neg_inf();
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
      neg = text[pos] == '-';
      ++pos;
    }
    std::size_t slash = text.find('/', pos);
    std::size_t dot = text.find('.', pos);
    Rat r;
    if (slash != std::string::npos) {
      if (dot != std::string::npos) throw ParseError("mixed '/' and '.' in rational literal");
      r = Rat(detail::int128_from_digits(text.substr(pos, slash - pos)),
              detail::int128_from_digits(text.substr(slash + 1)));
    } else if (dot != std::string::npos) {
      std::string ip = text.substr(pos, dot - pos);
      std::string fp = text.substr(dot + 1);
      if (fp.empty()) throw ParseError("trailing '.' in rational literal");
      int128 scale = 1;
      for (std::size_t i = 0; i < fp.size(); ++i) scale = detail::checked_mul(scale, 10);
      r = Rat(detail::checked_add(detail::checked_mul(detail::int128_from_digits(ip), scale),
                                  detail::int128_from_digits(fp)),
              scale);
    } else {
      r = Rat(detail::int128_from_digits(text.substr(pos)), 1);
    }
    return neg ? -r : r;
  }

 private:
  struct raw_tag {};
  Rat(raw_tag, int128 n, int128 d) : num_(n), den_(d) {}

  void assign(int128 n, int128 d) {
    if (d == 0) {
      if (n == 0) throw InvariantViolation("Rat: 0/0 is not a value");
      num_ = n > 0 ? 1 : -1;
      den_ = 0;
      return;
    }
    if (d < 0) {
      n = detail::checked_neg(n);
      d = detail::checked_neg(d);
    }
    uint128 g = detail::gcd128(detail::abs128(n), detail::abs128(d));
    if (g > 1) {
      n = n / int128(g);
      d = d / int128(g);
    }
    num_ = n;
    den_ = d;
  }

  int128 num_;
  int128 den_;
};

inline Rat pow(Rat base, long long e) {
  if (e < 0) return pow(base.inverse(), -e);
  Rat acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    if ((e >>= 1) != 0) base *= base;
  }
  return acc;
}

inline Rat abs(const Rat& r) { return r.abs(); }

inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace tropica

#endif
