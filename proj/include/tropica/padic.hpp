#ifndef TROPICA_PADIC_HPP
#define TROPICA_PADIC_HPP

#include <vector>

#include "tropica/rational.hpp"
#include "tropica/ultrametric.hpp"

namespace tropica {

// Trial division; sufficient for the supported range p < 2^31.
inline bool is_prime(long long p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (long long q = 3; q * q <= p; q += 2)
    if (p % q == 0) return false;
  return true;
}

inline void require_prime(long long p) {
  if (p > (1LL << 31)) throw TooLarge("primality checking is capped at 2^31");
  if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
}

// Valuation v with q = p^v * (a/b), p dividing neither a nor b. q must be
// nonzero and finite.
inline long long padic_valuation(const Rat& q, long long p) {
  require_prime(p);
  if (!q.is_finite() || q == Rat(0))
    throw DomainMismatch("valuation needs a finite nonzero rational");
  long long v = 0;
  int128 num = q.num() < 0 ? -q.num() : q.num();
  int128 den = q.den();
  while (num % p == 0) {
    num /= p;
    ++v;
  }
  while (den % p == 0) {
    den /= p;
    --v;
  }
  return v;
}

// p^{-v(q)} exactly, with the zero convention |0| = 0. Large valuations can
// exceed the 128-bit rational range and surface as CapacityError.
inline Rat padic_norm(const Rat& q, long long p) {
  require_prime(p);
  if (!q.is_finite()) throw DomainMismatch("the norm needs a finite rational");
  if (q == Rat(0)) return Rat(0);
  return pow(Rat(p), -padic_valuation(q, p));
}

// Finite sample of the p-adic line: d(x,y) = |x - y|_p, max-form.
inline UltrametricMatrix<Rat> padic_sample_matrix(const std::vector<Rat>& pts, long long p) {
  require_prime(p);
  const int n = int(pts.size());
  UltrametricMatrix<Rat> out;
  out.form = Mode::Max;
  out.d = Mat<Rat>::Constant(n, n, Rat(0));
  out.points.reserve(pts.size());
  for (const Rat& x : pts) out.points.push_back(x.to_string());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (pts[std::size_t(i)] == pts[std::size_t(j)])
        throw DomainMismatch("sample points must be distinct");
      Rat d = padic_norm(pts[std::size_t(i)] - pts[std::size_t(j)], p);
      out.d(i, j) = d;
      out.d(j, i) = d;
    }
  return out;
}

}  // namespace tropica

#endif
