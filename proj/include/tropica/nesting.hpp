#ifndef TROPICA_NESTING_HPP
#define TROPICA_NESTING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tropica/padic.hpp"
#include "tropica/rational.hpp"
#include "tropica/scalar.hpp"

namespace tropica {

// Level decomposition of a finite spectrum: type A strips repeated maxima
// (level values strictly decreasing), type B strips repeated minima (values
// strictly increasing). At tie tolerance zero the two are reversals of each
// other.
enum class NestType { A, B };

template <class S>
struct NestLevel {
  std::vector<int> indices;  // 1-based positions in the spectrum
  S mu = ScalarOps<S>::from_int(0);
  long long nu = 0;  // multiplicity, equals indices.size()
};

template <class S>
struct NestingForm {
  NestType type = NestType::A;
  int n = 0;
  std::vector<NestLevel<S>> levels;
};

template <class S>
void require_spectrum(const std::vector<S>& s) {
  if (s.empty()) throw EmptySpectrum("spectrum needs at least one value");
  for (const S& v : s)
    if (!ScalarOps<S>::is_finite(v)) throw DomainMismatch("spectrum values must be finite");
}

template <class S>
NestingForm<S> nest(const std::vector<S>& s, NestType type, const S& tie_tol) {
  require_spectrum(s);
  if (tie_tol < ScalarOps<S>::from_int(0)) throw NegativeInput("tie tolerance must be nonnegative");
  const int n = int(s.size());
  std::vector<char> used(s.size(), 0);
  NestingForm<S> nf{type, n, {}};
  int remaining = n;
  while (remaining > 0) {
    int lead = -1;
    for (int i = 0; i < n; ++i) {
      if (used[std::size_t(i)]) continue;
      if (lead < 0 || (type == NestType::A ? s[std::size_t(lead)] < s[std::size_t(i)]
                                           : s[std::size_t(i)] < s[std::size_t(lead)]))
        lead = i;
    }
    NestLevel<S> lvl;
    lvl.mu = s[std::size_t(lead)];
    for (int i = 0; i < n; ++i) {
      if (used[std::size_t(i)]) continue;
      if (!(tie_tol < ScalarOps<S>::abs(s[std::size_t(i)] - lvl.mu))) {
        lvl.indices.push_back(i + 1);
        used[std::size_t(i)] = 1;
        --remaining;
      }
    }
    lvl.nu = (long long)lvl.indices.size();
    nf.levels.push_back(std::move(lvl));
  }
  return nf;
}

template <class S>
NestingForm<S> nest(const std::vector<S>& s, NestType type) {
  return nest(s, type, ScalarOps<S>::default_tie_tol());
}

template <class S>
void validate_nesting(const NestingForm<S>& nf) {
  if (nf.n < 1 || nf.levels.empty()) throw EmptySpectrum("nesting form has no levels");
  std::vector<char> seen(std::size_t(nf.n), 0);
  long long total = 0;
  for (const NestLevel<S>& lvl : nf.levels) {
    if (lvl.nu <= 0 || lvl.nu != (long long)lvl.indices.size())
      throw DomainMismatch("level multiplicity disagrees with its index set");
    for (int idx : lvl.indices) {
      if (idx < 1 || idx > nf.n || seen[std::size_t(idx - 1)])
        throw DomainMismatch("levels must partition the index set");
      seen[std::size_t(idx - 1)] = 1;
    }
    total += lvl.nu;
  }
  if (total != nf.n) throw DomainMismatch("levels must cover the index set");
  for (std::size_t l = 1; l < nf.levels.size(); ++l) {
    const bool ok = nf.type == NestType::A ? nf.levels[l].mu < nf.levels[l - 1].mu
                                           : nf.levels[l - 1].mu < nf.levels[l].mu;
    if (!ok) throw DomainMismatch("level values must be strictly monotone");
  }
}

template <class S>
NestingForm<S> reverse_nesting(const NestingForm<S>& nf) {
  NestingForm<S> out = nf;
  out.type = nf.type == NestType::A ? NestType::B : NestType::A;
  std::reverse(out.levels.begin(), out.levels.end());
  return out;
}

// Nested product evaluation e^{mu_0} (nu_0 + e^{mu_1 - mu_0} (nu_1 + ...)),
// algebraically equal to the plain sum of e^{f_alpha}.
inline double reconstruct(const NestingForm<double>& nf) {
  validate_nesting(nf);
  const auto& L = nf.levels;
  double acc = double(L.back().nu);
  for (std::size_t l = L.size() - 1; l > 0; --l)
    acc = double(L[l - 1].nu) + std::exp(L[l].mu - L[l - 1].mu) * acc;
  return std::exp(L[0].mu) * acc;
}

// Same nested product with the transcendental base replaced by an exact
// rational base > 1; level values must be integers. The nesting identity is
// base-independent, so this gives a bit-exact reconstruction check.
inline Rat reconstruct_exact(const NestingForm<Rat>& nf, const Rat& base) {
  validate_nesting(nf);
  if (!(Rat(1) < base)) throw DomainMismatch("exact reconstruction needs base > 1");
  auto as_exponent = [](const Rat& mu) {
    if (!mu.is_finite() || mu.den() != 1)
      throw DomainMismatch("exact reconstruction needs integer level values");
    if (mu.num() > (int128(1) << 62) || mu.num() < -(int128(1) << 62))
      throw CapacityError("level value too large for an exponent");
    return (long long)mu.num();
  };
  const auto& L = nf.levels;
  Rat acc(L.back().nu);
  for (std::size_t l = L.size() - 1; l > 0; --l)
    acc = Rat(L[l - 1].nu) + pow(base, as_exponent(L[l].mu) - as_exponent(L[l - 1].mu)) * acc;
  return pow(base, as_exponent(L[0].mu)) * acc;
}

// Digit series: type A sums nu_l p^{-l} (a real base-p expansion), type B
// sums nu_l p^{+l} (an integer coherent modulo p^{L+1} across truncations).
inline Rat padic_series(const std::vector<long long>& digits, long long p, NestType type,
                        long long truncation) {
  require_prime(p);
  if (truncation < 0) throw DomainMismatch("truncation must be nonnegative");
  for (std::size_t l = 0; l < digits.size(); ++l)
    if (digits[l] < 0 || digits[l] >= p)
      throw DigitRange("digit " + std::to_string(digits[l]) + " at position " + std::to_string(l) +
                       " is outside [0, " + std::to_string(p) + ")");
  Rat acc(0);
  for (std::size_t l = 0; l < digits.size() && (long long)l <= truncation; ++l)
    acc += Rat(digits[l]) * pow(Rat(p), type == NestType::A ? -(long long)l : (long long)l);
  return acc;
}

// Minimum statistics of a float spectrum: bottom value, its multiplicity,
// and the gap to the next level (pos_inf when there is none).
struct MinSplit {
  double kappa0 = 0;
  long long lambda0 = 0;
  double gap = 0;
  int n = 0;
};

inline MinSplit min_split(const std::vector<double>& s) {
  require_spectrum(s);
  MinSplit m;
  m.n = int(s.size());
  m.kappa0 = s[0];
  for (double v : s) m.kappa0 = std::min(m.kappa0, v);
  m.gap = std::numeric_limits<double>::infinity();
  for (double v : s) {
    if (v == m.kappa0)
      ++m.lambda0;
    else
      m.gap = std::min(m.gap, v - m.kappa0);
  }
  return m;
}

// F(k) - kappa_0 + k ln lambda_0 = -k log1p(sum_{a outside the bottom level}
// e^{(kappa_0 - f_a)/k} / lambda_0), evaluated directly so its tiny value
// carries full relative precision instead of cancellation noise.
inline double free_energy_remainder(const std::vector<double>& s, double k) {
  if (!(k > 0)) throw NonpositiveInput("free energy needs k > 0");
  MinSplit m = min_split(s);
  double r = 0;
  for (double v : s)
    if (v != m.kappa0) r += std::exp((m.kappa0 - v) / k);
  return -k * std::log1p(r / double(m.lambda0));
}

// -k ln sum_a e^{-f_a/k} in the shifted form kappa_0 - k ln(lambda_0 +
// sum e^{(kappa_0 - f_a)/k}); every exponent is nonpositive, so the
// evaluation never overflows.
inline double free_energy(const std::vector<double>& s, double k) {
  if (!(k > 0)) throw NonpositiveInput("free energy needs k > 0");
  MinSplit m = min_split(s);
  return m.kappa0 - k * std::log(double(m.lambda0)) + free_energy_remainder(s, k);
}

}  // namespace tropica

#endif
