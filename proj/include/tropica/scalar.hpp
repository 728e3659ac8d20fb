#ifndef TROPICA_SCALAR_HPP
#define TROPICA_SCALAR_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <string>

#include "tropica/rational.hpp"

namespace tropica {

// Fixed 17-significant-digit formatting keeps float output byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Scalar abstraction shared by the float (double) and exact (Rat) paths.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static double pos_inf() { return std::numeric_limits<double>::infinity(); }
  static double neg_inf() { return -std::numeric_limits<double>::infinity(); }
  static bool is_pos_inf(double v) { return std::isinf(v) && v > 0; }
  static bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }
  static bool is_finite(double v) { return std::isfinite(v); }
  static double from_int(long long v) { return double(v); }
  static double abs(double v) { return std::fabs(v); }
  static double to_double(double v) { return v; }
  static std::string format(double v) { return format_double(v); }
  static double parse(const std::string& s) {
    if (s == "inf" || s == "+inf") return pos_inf();
    if (s == "-inf") return neg_inf();
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in number: " + s);
    return v;
  }
  static double default_tie_tol() { return 1e-9; }
};

template <>
struct ScalarOps<Rat> {
  static constexpr bool exact = true;
  static Rat pos_inf() { return Rat::pos_inf(); }
  static Rat neg_inf() { return Rat::neg_inf(); }
  static bool is_pos_inf(const Rat& v) { return v.is_pos_inf(); }
  static bool is_neg_inf(const Rat& v) { return v.is_neg_inf(); }
  static bool is_finite(const Rat& v) { return v.is_finite(); }
  static Rat from_int(long long v) { return Rat(v); }
  static Rat abs(const Rat& v) { return v.abs(); }
  static double to_double(const Rat& v) { return v.to_double(); }
  static std::string format(const Rat& v) { return v.to_string(); }
  static Rat parse(const std::string& s) { return Rat::parse(s); }
  static Rat default_tie_tol() { return Rat(0); }
};

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace tropica

namespace Eigen {

template <>
struct NumTraits<tropica::Rat> {
  using Real = tropica::Rat;
  using NonInteger = tropica::Rat;
  using Literal = tropica::Rat;
  using Nested = tropica::Rat;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 20,
    MulCost = 20,
  };
  static tropica::Rat epsilon() { return tropica::Rat(0); }
  static tropica::Rat dummy_precision() { return tropica::Rat(0); }
  static tropica::Rat highest() { return tropica::Rat::pos_inf(); }
  static tropica::Rat lowest() { return tropica::Rat::neg_inf(); }
  static int digits10() { return 38; }
};

}  // namespace Eigen

#endif
