#ifndef TROPICA_POLYNOMIAL_HPP
#define TROPICA_POLYNOMIAL_HPP

#include <vector>

#include "tropica/tropical.hpp"

namespace tropica {

// One term a_I ⊙ X^{⊙I}: tropical product = addition, powers = integer scaling.
template <class S>
struct Monomial {
  S coeff;
  std::vector<int> powers;
};

template <class S>
struct TropicalPolynomial {
  Mode mode = Mode::Max;
  int nvars = 0;
  std::vector<Monomial<S>> monomials;
};

namespace detail {

// Tropical multiplication with the semiring zero (the mode's neutral)
// absorbing, so -inf ⊙ x = -inf in max mode regardless of x.
template <class S>
S mul_absorbing(const S& a, const S& b, Mode mode) {
  const S neutral = neutral_of<S>(mode);
  if (a == neutral || b == neutral) return neutral;
  return a + b;
}

// p·x on extended values: sign flips the sentinel, p = 0 is the tropical one.
template <class S>
S scale_extended(int p, const S& x, Mode mode) {
  if (p == 0) return ScalarOps<S>::from_int(0);
  if (ScalarOps<S>::is_pos_inf(x)) return p > 0 ? x : ScalarOps<S>::neg_inf();
  if (ScalarOps<S>::is_neg_inf(x)) return p > 0 ? x : ScalarOps<S>::pos_inf();
  (void)mode;
  return ScalarOps<S>::from_int(p) * x;
}

}  // namespace detail

// ⊕ over monomials of a_I + I·x.  The empty polynomial is the mode's neutral.
template <class S>
S eval_polynomial(const TropicalPolynomial<S>& p, const std::vector<S>& x) {
  if (int(x.size()) != p.nvars) throw DimensionMismatch("input vector length does not match the variable count");
  S acc = neutral_of<S>(p.mode);
  for (const Monomial<S>& m : p.monomials) {
    if (int(m.powers.size()) != p.nvars)
      throw DimensionMismatch("monomial exponent vector length does not match the variable count");
    S term = m.coeff;
    for (int k = 0; k < p.nvars; ++k) {
      if (m.powers[std::size_t(k)] == 0) continue;
      term = detail::mul_absorbing(term, detail::scale_extended(m.powers[std::size_t(k)], x[std::size_t(k)], p.mode), p.mode);
    }
    acc = oplus(acc, term, p.mode);
  }
  return acc;
}

}  // namespace tropica

#endif
