#ifndef TROPICA_SUBSET_HPP
#define TROPICA_SUBSET_HPP

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "tropica/errors.hpp"

namespace tropica {

// Subset of a ground set {1..n}, n <= 64, as a characteristic mask.
// Bit i-1 holds membership of element i.
struct Subset {
  std::uint64_t bits = 0;
  int n = 0;

  bool contains(int i) const { return i >= 1 && i <= n && (bits >> (i - 1)) & 1u; }
  int card() const { return std::popcount(bits); }
  bool empty() const { return bits == 0; }

  friend bool operator==(const Subset&, const Subset&) = default;
};

inline std::uint64_t ground_mask(int n) {
  return n >= 64 ? ~std::uint64_t(0) : ((std::uint64_t(1) << n) - 1);
}

inline void require_ground(int n) {
  if (n < 0) throw ShapeError("ground set size must be nonnegative");
  if (n > 64) throw TooLarge("ground set size " + std::to_string(n) + " exceeds the 64-element mask representation");
}

namespace detail {

inline std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  out.reserve(std::size_t(n));
  for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace detail

inline Subset subset_of(int n, std::uint64_t bits) {
  require_ground(n);
  if (bits & ~ground_mask(n)) throw DomainMismatch("subset mask has bits outside the ground set");
  return Subset{bits, n};
}

inline Subset empty_subset(int n) { return subset_of(n, 0); }
inline Subset full_subset(int n) { return subset_of(n, ground_mask(n)); }

inline Subset subset_from_indices(int n, const std::vector<int>& one_based) {
  require_ground(n);
  std::uint64_t bits = 0;
  for (int i : one_based) {
    if (i < 1 || i > n)
      throw DomainMismatch("index " + std::to_string(i) + " outside ground set [" + std::to_string(n) + "]");
    bits |= std::uint64_t(1) << (i - 1);
  }
  return Subset{bits, n};
}

inline std::vector<int> indices_of(const Subset& s) {
  std::vector<int> out;
  out.reserve(std::size_t(s.card()));
  for (int i = 1; i <= s.n; ++i)
    if (s.contains(i)) out.push_back(i);
  return out;
}

inline void require_same_ground(const Subset& a, const Subset& b) {
  if (a.n != b.n) throw DomainMismatch("subsets live on different ground sets");
}

inline Subset set_union(const Subset& a, const Subset& b) {
  require_same_ground(a, b);
  return Subset{a.bits | b.bits, a.n};
}

inline Subset set_intersect(const Subset& a, const Subset& b) {
  require_same_ground(a, b);
  return Subset{a.bits & b.bits, a.n};
}

inline Subset set_diff(const Subset& a, const Subset& b) {
  require_same_ground(a, b);
  return Subset{a.bits & ~b.bits, a.n};
}

inline Subset set_complement(const Subset& a) {
  return Subset{~a.bits & ground_mask(a.n), a.n};
}

inline bool is_subset(const Subset& a, const Subset& b) {
  require_same_ground(a, b);
  return (a.bits & ~b.bits) == 0;
}

inline std::string to_string(const Subset& s) {
  std::string out = "{";
  bool first = true;
  for (int i : indices_of(s)) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

// Visits every k-element mask over n bits in increasing mask order.
template <class Fn>
void for_each_k_subset(int n, int k, Fn&& fn) {
  require_ground(n);
  if (k < 0 || k > n) return;
  if (k == 0) {
    fn(std::uint64_t(0));
    return;
  }
  std::uint64_t v = (std::uint64_t(1) << k) - 1;
  const std::uint64_t limit = ground_mask(n);
  while (v <= limit) {
    fn(v);
    std::uint64_t t = v | (v - 1);
    if (t == ~std::uint64_t(0)) break;
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
  return r;
}

}  // namespace tropica

#endif
