#ifndef TROPICA_TROPICAL_HPP
#define TROPICA_TROPICAL_HPP

#include <algorithm>
#include <cmath>

#include "tropica/scalar.hpp"

namespace tropica {

// MAX carriers live in R ∪ {-inf} with neutral -inf; MIN carriers dually.
enum class Mode { Max, Min };

template <class S>
S neutral_of(Mode m) {
  return m == Mode::Max ? ScalarOps<S>::neg_inf() : ScalarOps<S>::pos_inf();
}

// Scalar-generic two-argument min and max; the Rat overloads in
// rational.hpp are preferred for that type by ordinary overload ranking.
template <class S>
const S& min(const S& a, const S& b) {
  return b < a ? b : a;
}
template <class S>
const S& max(const S& a, const S& b) {
  return a < b ? b : a;
}

template <class S>
S oplus(const S& a, const S& b, Mode m) {
  if (m == Mode::Max) return a < b ? b : a;
  return b < a ? b : a;
}

// eps * ln(e^{x/eps} + e^{y/eps}), evaluated as max + eps*log1p(e^{-|x-y|/eps})
// so finite inputs never overflow.  Sentinels behave as the max-mode limit.
inline double oplus_eps(double x, double y, double eps) {
  if (eps <= 0) throw NegativeInput("oplus_eps requires eps > 0");
  double m = std::max(x, y);
  double d = std::abs(x - y);
  if (d == 0 && std::isfinite(m)) return m + eps * std::log(2.0);
  if (!std::isfinite(m) || !std::isfinite(d)) return m;
  return m + eps * std::log1p(std::exp(-d / eps));
}

}  // namespace tropica

#endif
