#ifndef TROPICA_MONOID_HPP
#define TROPICA_MONOID_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tropica/errors.hpp"
#include "tropica/subset.hpp"
#include "tropica/tropical.hpp"

namespace tropica {

// Idempotent commutative monoid on an explicit finite carrier.
// table is row-major: op(a,b) = table[a*size+b].
struct FiniteMonoid {
  std::vector<std::string> names;
  int neutral = 0;
  std::vector<std::uint16_t> table;

  int size() const { return int(names.size()); }
  int op(int a, int b) const { return table[std::size_t(a) * std::size_t(size()) + std::size_t(b)]; }
};

inline bool is_idempotent(const FiniteMonoid& m) {
  for (int a = 0; a < m.size(); ++a)
    if (m.op(a, a) != a) return false;
  return true;
}

// Validates closure, neutrality, commutativity, associativity, idempotence.
// Laws are checked exhaustively up to `cap` elements, by seeded random triples
// beyond that (associativity scan is cubic).
inline FiniteMonoid make_monoid(std::vector<std::string> names, int neutral,
                                std::vector<std::uint16_t> table, int cap = 8,
                                std::uint64_t spot_seed = 0) {
  FiniteMonoid m{std::move(names), neutral, std::move(table)};
  const int n = m.size();
  if (n == 0) throw DomainMismatch("monoid carrier is empty");
  if (n > 65535) throw TooLarge("carrier too large for a 16-bit table");
  if (m.table.size() != std::size_t(n) * std::size_t(n))
    throw DomainMismatch("addition table size does not match carrier");
  if (neutral < 0 || neutral >= n) throw DomainMismatch("neutral element outside carrier");
  for (auto v : m.table)
    if (v >= n) throw DomainMismatch("addition table entry outside carrier");
  for (int a = 0; a < n; ++a) {
    if (m.op(m.neutral, a) != a || m.op(a, m.neutral) != a)
      throw DomainMismatch("neutral element fails neutrality");
    if (m.op(a, a) != a) throw NotIdempotent("a+a != a at element " + m.names[std::size_t(a)]);
  }
  auto check_triple = [&](int a, int b, int c) {
    if (m.op(a, b) != m.op(b, a))
      throw DomainMismatch("addition not commutative at (" + m.names[std::size_t(a)] + "," + m.names[std::size_t(b)] + ")");
    if (m.op(m.op(a, b), c) != m.op(a, m.op(b, c)))
      throw DomainMismatch("addition not associative at (" + m.names[std::size_t(a)] + "," +
                           m.names[std::size_t(b)] + "," + m.names[std::size_t(c)] + ")");
  };
  if (n <= cap) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) check_triple(a, b, c);
  } else {
    std::mt19937_64 rng(spot_seed);
    for (int t = 0; t < 4096; ++t)
      check_triple(int(rng() % std::uint64_t(n)), int(rng() % std::uint64_t(n)), int(rng() % std::uint64_t(n)));
  }
  return m;
}

// 0 < 1 < ... < k-1 under max; element 0 is the neutral.
inline FiniteMonoid chain_monoid(int k, const std::vector<std::string>& names = {}) {
  if (k <= 0) throw DomainMismatch("chain needs at least one element");
  std::vector<std::string> nm = names;
  if (nm.empty())
    for (int i = 0; i < k; ++i) nm.push_back("c" + std::to_string(i));
  if (int(nm.size()) != k) throw DomainMismatch("chain label count mismatch");
  std::vector<std::uint16_t> t(std::size_t(k) * std::size_t(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) t[std::size_t(a) * std::size_t(k) + std::size_t(b)] = std::uint16_t(std::max(a, b));
  return make_monoid(std::move(nm), 0, std::move(t), k);
}

// (P([ground]), ∪, ∅) or (P([ground]), ∩, Ω) as explicit 2^ground carriers.
inline FiniteMonoid powerset_monoid(int ground, Mode mode) {
  if (ground < 0 || ground > 12) throw TooLarge("explicit power-set carrier capped at ground size 12");
  const int n = 1 << ground;
  std::vector<std::string> nm;
  nm.reserve(std::size_t(n));
  for (int mask = 0; mask < n; ++mask) nm.push_back(to_string(Subset{std::uint64_t(mask), ground}));
  std::vector<std::uint16_t> t(std::size_t(n) * std::size_t(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      t[std::size_t(a) * std::size_t(n) + std::size_t(b)] = std::uint16_t(mode == Mode::Max ? (a | b) : (a & b));
  return make_monoid(std::move(nm), mode == Mode::Max ? 0 : n - 1, std::move(t), /*cap=*/4);
}

inline FiniteMonoid powerset_union_monoid(int ground) { return powerset_monoid(ground, Mode::Max); }
inline FiniteMonoid powerset_intersection_monoid(int ground) { return powerset_monoid(ground, Mode::Min); }

// Bottom, two incomparable middles, top: the smallest non-total lattice.
inline FiniteMonoid diamond_monoid() {
  return make_monoid({"bot", "a", "b", "top"}, 0,
                     {0, 1, 2, 3,
                      1, 1, 3, 3,
                      2, 3, 2, 3,
                      3, 3, 3, 3});
}

// Infinite carriers cannot be scanned; known structure lives in a registry.
enum class SymbolicCarrier { MaxPlus, MinPlus, NatMax, PowersetUnion, PowersetIntersection, Custom };

struct SymbolicFacts {
  bool grounded = false;
  bool totally_ordered = false;
  std::optional<std::string> erasing;
};

inline SymbolicFacts symbolic_facts(SymbolicCarrier c, int ground_size = 0) {
  switch (c) {
    case SymbolicCarrier::MaxPlus:
      return {true, true, std::nullopt};
    case SymbolicCarrier::MinPlus:
      return {true, true, std::nullopt};
    case SymbolicCarrier::NatMax:
      return {true, true, std::nullopt};
    case SymbolicCarrier::PowersetUnion:
      return {false, ground_size <= 1, std::string("Omega")};
    case SymbolicCarrier::PowersetIntersection:
      return {false, ground_size <= 1, std::string("{}")};
    case SymbolicCarrier::Custom:
      break;
  }
  throw Unsupported("no registered structural facts for this symbolic carrier");
}

inline std::optional<std::string> erasing_element(SymbolicCarrier c, int ground_size = 0) {
  return symbolic_facts(c, ground_size).erasing;
}

// x ⪯ y iff x ⊕ y = y.  relation is row-major over carrier indices.
struct InducedOrder {
  int n = 0;
  std::vector<char> rel;
  bool total = false;

  bool leq(int a, int b) const { return rel[std::size_t(a) * std::size_t(n) + std::size_t(b)] != 0; }
  bool lt(int a, int b) const { return a != b && leq(a, b); }
};

inline InducedOrder induced_order(const FiniteMonoid& m) {
  const int n = m.size();
  for (int a = 0; a < n; ++a)
    if (m.op(a, a) != a) throw NotIdempotent("a+a != a at element " + m.names[std::size_t(a)]);
  InducedOrder o;
  o.n = n;
  o.rel.assign(std::size_t(n) * std::size_t(n), 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) o.rel[std::size_t(a) * std::size_t(n) + std::size_t(b)] = char(m.op(a, b) == b);
  for (int a = 0; a < n; ++a) {
    if (!o.leq(a, a)) throw InvariantViolation("induced order is not reflexive");
    if (!o.leq(m.neutral, a)) throw InvariantViolation("neutral element is not the minimum");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a != b && o.leq(a, b) && o.leq(b, a)) throw InvariantViolation("induced order is not antisymmetric");
      for (int c = 0; c < n; ++c)
        if (o.leq(a, b) && o.leq(b, c) && !o.leq(a, c)) throw InvariantViolation("induced order is not transitive");
    }
  o.total = true;
  for (int a = 0; a < n && o.total; ++a)
    for (int b = 0; b < n && o.total; ++b)
      if (!o.leq(a, b) && !o.leq(b, a)) o.total = false;
  return o;
}

// a ⊕ b is the least upper bound of {a,b} in the induced order.
inline bool oplus_is_sup(const FiniteMonoid& m) {
  InducedOrder o = induced_order(m);
  const int n = m.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int s = m.op(a, b);
      if (!o.leq(a, s) || !o.leq(b, s)) return false;
      for (int c = 0; c < n; ++c)
        if (o.leq(a, c) && o.leq(b, c) && !o.leq(s, c)) return false;
    }
  return true;
}

// The erasing element absorbs everything; its absence means grounded.
inline std::optional<int> erasing_element(const FiniteMonoid& m) {
  for (int t = 0; t < m.size(); ++t) {
    bool erases = true;
    for (int a = 0; a < m.size() && erases; ++a) erases = m.op(a, t) == t;
    if (erases) return t;
  }
  return std::nullopt;
}

inline bool is_grounded(const FiniteMonoid& m) { return !erasing_element(m).has_value(); }

struct HomReport {
  bool ok = false;
  bool neutral_ok = false;
  std::optional<std::pair<int, int>> witness;  // violating pair in m1, if any
};

// psi respects the neutral and psi(x +1 y) = psi(x) +2 psi(y).
inline HomReport check_homomorphism(const std::vector<int>& map, const FiniteMonoid& m1,
                                    const FiniteMonoid& m2) {
  if (int(map.size()) != m1.size()) throw DomainMismatch("map is not defined on all of the source carrier");
  for (int v : map)
    if (v < 0 || v >= m2.size()) throw DomainMismatch("map hits elements outside the target carrier");
  HomReport r;
  r.neutral_ok = map[std::size_t(m1.neutral)] == m2.neutral;
  r.ok = r.neutral_ok;
  for (int a = 0; a < m1.size() && r.ok; ++a)
    for (int b = 0; b < m1.size(); ++b)
      if (map[std::size_t(m1.op(a, b))] != m2.op(map[std::size_t(a)], map[std::size_t(b)])) {
        r.ok = false;
        r.witness = {a, b};
        break;
      }
  return r;
}

inline void require_mask_carrier(const FiniteMonoid& m) {
  if (m.size() > 64) throw TooLarge("carrier subsets need a carrier of at most 64 elements");
}

// Strict down-set {x : x ≺ y} as a mask over carrier indices (bit i = element i).
inline Subset iota_map(const FiniteMonoid& m, int y) {
  require_mask_carrier(m);
  InducedOrder o = induced_order(m);
  std::uint64_t bits = 0;
  for (int x = 0; x < m.size(); ++x)
    if (o.lt(x, y)) bits |= std::uint64_t(1) << x;
  return Subset{bits, m.size()};
}

// Up-set {x : y ⪯ x}.
inline Subset phi_map(const FiniteMonoid& m, int y) {
  require_mask_carrier(m);
  InducedOrder o = induced_order(m);
  std::uint64_t bits = 0;
  for (int x = 0; x < m.size(); ++x)
    if (o.leq(y, x)) bits |= std::uint64_t(1) << x;
  return Subset{bits, m.size()};
}

struct SetHomReport {
  bool ok = false;
  std::optional<std::pair<int, int>> witness;
};

// ι into (I_Λ, ∪, ∅): a homomorphism exactly when the order is total.
inline SetHomReport iota_is_homomorphism(const FiniteMonoid& m) {
  require_mask_carrier(m);
  std::vector<Subset> iota;
  for (int y = 0; y < m.size(); ++y) iota.push_back(iota_map(m, y));
  SetHomReport r;
  r.ok = iota[std::size_t(m.neutral)].empty();
  for (int a = 0; a < m.size() && r.ok; ++a)
    for (int b = 0; b < m.size(); ++b)
      if (iota[std::size_t(m.op(a, b))] != set_union(iota[std::size_t(a)], iota[std::size_t(b)])) {
        r.ok = false;
        r.witness = {a, b};
        break;
      }
  return r;
}

// φ into (F_Λ, ∩, Λ): always a homomorphism.
inline SetHomReport phi_is_homomorphism(const FiniteMonoid& m) {
  require_mask_carrier(m);
  std::vector<Subset> phi;
  for (int y = 0; y < m.size(); ++y) phi.push_back(phi_map(m, y));
  SetHomReport r;
  r.ok = phi[std::size_t(m.neutral)] == full_subset(m.size());
  for (int a = 0; a < m.size() && r.ok; ++a)
    for (int b = 0; b < m.size(); ++b)
      if (phi[std::size_t(m.op(a, b))] != set_intersect(phi[std::size_t(a)], phi[std::size_t(b)])) {
        r.ok = false;
        r.witness = {a, b};
        break;
      }
  return r;
}

// A poset with a fresh top has all joins iff every subset with an upper bound
// has a least one.  leq is a callable (int,int)->bool on 0..n-1.
template <class Leq>
bool poset_almost_complete(int n, Leq&& leq) {
  if (n > 16) throw TooLarge("almost-completeness scan capped at 16 elements");
  for (std::uint64_t s = 1; s < (std::uint64_t(1) << n); ++s) {
    std::vector<int> ub;
    for (int u = 0; u < n; ++u) {
      bool upper = true;
      for (int x = 0; x < n && upper; ++x)
        if ((s >> x) & 1u) upper = leq(x, u);
      if (upper) ub.push_back(u);
    }
    if (ub.empty()) continue;  // sup is the fresh top
    bool has_min = false;
    for (int u0 : ub) {
      bool least = true;
      for (int u : ub)
        if (!leq(u0, u)) { least = false; break; }
      if (least) { has_min = true; break; }
    }
    if (!has_min) return false;
  }
  return true;
}

inline bool is_almost_complete(const FiniteMonoid& m, int cap = 8) {
  if (m.size() > cap) throw TooLarge("carrier exceeds the exhaustive-check cap; raise the cap to scan it");
  InducedOrder o = induced_order(m);
  return poset_almost_complete(m.size(), [&](int a, int b) { return o.leq(a, b); });
}

// Both sides of the equivalence: Λ almost complete iff every ι(y) is.
struct AlmostCompleteEquivalence {
  bool whole = false;
  bool all_iota = false;
  bool agree() const { return whole == all_iota; }
};

inline AlmostCompleteEquivalence almost_complete_equivalence(const FiniteMonoid& m, int cap = 8) {
  AlmostCompleteEquivalence r;
  r.whole = is_almost_complete(m, cap);
  InducedOrder o = induced_order(m);
  r.all_iota = true;
  for (int y = 0; y < m.size() && r.all_iota; ++y) {
    std::vector<int> elems = indices_of(iota_map(m, y));
    const int k = int(elems.size());
    r.all_iota = poset_almost_complete(
        k, [&](int a, int b) { return o.leq(elems[std::size_t(a)] - 1, elems[std::size_t(b)] - 1); });
  }
  return r;
}

struct ChainHom {
  Subset delta0;            // elements of Δ whose sup lands inside Λ (all, on finite Λ)
  std::vector<int> theta;   // Δ index -> Λ index
  bool covering_ok = false; // ψ(a) ⊆ ι(θ(a)) ∪ {θ(a)}
  bool theta_is_hom = false;
};

// θ(a) = sup ψ(a) in the top-extension of Λ.  ψ must be a monoid homomorphism
// into the union power-set monoid; both conventional neutrals ({} and
// {neutral}) are accepted.
inline ChainHom extract_chain_hom(const std::vector<Subset>& psi, const FiniteMonoid& delta,
                                  const FiniteMonoid& lambda) {
  require_mask_carrier(lambda);
  if (int(psi.size()) != delta.size()) throw DomainMismatch("psi is not defined on all of the chain");
  for (const Subset& s : psi)
    if (s.n != lambda.size()) throw DomainMismatch("psi values are not subsets of the target carrier");
  if (!induced_order(delta).total) throw NotTotallyOrdered("the source monoid is not a chain");
  const Subset neutral_image = psi[std::size_t(delta.neutral)];
  if (!neutral_image.empty() && neutral_image != subset_of(lambda.size(), std::uint64_t(1) << lambda.neutral))
    throw NotHomomorphism("psi(neutral) must be {} or {neutral}");
  for (int a = 0; a < delta.size(); ++a)
    for (int b = 0; b < delta.size(); ++b)
      if (psi[std::size_t(delta.op(a, b))] != set_union(psi[std::size_t(a)], psi[std::size_t(b)]))
        throw NotHomomorphism("psi(a+b) != psi(a) ∪ psi(b) at (" + delta.names[std::size_t(a)] + "," +
                              delta.names[std::size_t(b)] + ")");

  ChainHom out;
  out.delta0 = full_subset(delta.size());  // finite Λ has all internal sups
  out.theta.assign(std::size_t(delta.size()), lambda.neutral);
  for (int a = 0; a < delta.size(); ++a) {
    int sup = lambda.neutral;
    for (int x : indices_of(psi[std::size_t(a)])) sup = lambda.op(sup, x - 1);
    out.theta[std::size_t(a)] = sup;
  }
  InducedOrder lo = induced_order(lambda);
  out.covering_ok = true;
  for (int a = 0; a < delta.size() && out.covering_ok; ++a)
    for (int x : indices_of(psi[std::size_t(a)]))
      if (!lo.leq(x - 1, out.theta[std::size_t(a)])) { out.covering_ok = false; break; }
  out.theta_is_hom = check_homomorphism(out.theta, delta, lambda).ok;
  return out;
}

struct IotaThetaReport {
  bool union_law = false;        // ι(ϑ(a⊕b)) = ι(ϑ(a)) ∪ ι(ϑ(b))
  bool vacuum_preserved = false; // ϑ(neutral) = neutral
  bool is_hom = false;           // homomorphism into (I_Λ, ∪, ∅)
};

// ι_ϑ = ι ∘ ϑ for a monotone ϑ from a chain.  The union law needs only weak
// monotonicity; being a homomorphism additionally needs the vacuum condition.
inline IotaThetaReport iota_theta_check(const FiniteMonoid& delta, const FiniteMonoid& lambda,
                                        const std::vector<int>& theta) {
  require_mask_carrier(lambda);
  if (int(theta.size()) != delta.size()) throw DomainMismatch("theta is not defined on all of the chain");
  for (int v : theta)
    if (v < 0 || v >= lambda.size()) throw DomainMismatch("theta hits elements outside the target carrier");
  InducedOrder od = induced_order(delta);
  if (!od.total) throw NotTotallyOrdered("the source monoid is not a chain");
  InducedOrder ol = induced_order(lambda);
  for (int a = 0; a < delta.size(); ++a)
    for (int b = 0; b < delta.size(); ++b)
      if (od.leq(a, b) && !ol.leq(theta[std::size_t(a)], theta[std::size_t(b)]))
        throw DomainMismatch("theta is not monotone");

  std::vector<Subset> it;
  for (int a = 0; a < delta.size(); ++a) it.push_back(iota_map(lambda, theta[std::size_t(a)]));
  IotaThetaReport r;
  r.union_law = true;
  for (int a = 0; a < delta.size() && r.union_law; ++a)
    for (int b = 0; b < delta.size(); ++b)
      if (it[std::size_t(delta.op(a, b))] != set_union(it[std::size_t(a)], it[std::size_t(b)])) {
        r.union_law = false;
        break;
      }
  r.vacuum_preserved = theta[std::size_t(delta.neutral)] == lambda.neutral;
  r.is_hom = r.union_law && it[std::size_t(delta.neutral)].empty();
  return r;
}

// Every labeled join-semilattice with bottom on n elements, as a monoid.
// Enumerates the 3^{n(n-1)/2} pair-state assignments and keeps the partial
// orders that are transitive, have a minimum, and have all pairwise joins.
inline std::vector<FiniteMonoid> enumerate_semilattice_monoids(int n) {
  if (n < 1 || n > 5) throw TooLarge("semilattice enumeration supported for 1..5 elements");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::vector<FiniteMonoid> out;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) total *= 3;
  std::vector<char> leq(std::size_t(n) * std::size_t(n));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::fill(leq.begin(), leq.end(), 0);
    for (int i = 0; i < n; ++i) leq[std::size_t(i) * std::size_t(n) + std::size_t(i)] = 1;
    std::uint64_t c = code;
    for (auto [i, j] : pairs) {
      int state = int(c % 3);
      c /= 3;
      if (state == 1) leq[std::size_t(i) * std::size_t(n) + std::size_t(j)] = 1;
      if (state == 2) leq[std::size_t(j) * std::size_t(n) + std::size_t(i)] = 1;
    }
    auto le = [&](int a, int b) { return leq[std::size_t(a) * std::size_t(n) + std::size_t(b)] != 0; };
    bool transitive = true;
    for (int a = 0; a < n && transitive; ++a)
      for (int b = 0; b < n && transitive; ++b)
        for (int cx = 0; cx < n; ++cx)
          if (le(a, b) && le(b, cx) && !le(a, cx)) { transitive = false; break; }
    if (!transitive) continue;
    int bottom = -1;
    for (int m0 = 0; m0 < n && bottom < 0; ++m0) {
      bool mn = true;
      for (int a = 0; a < n && mn; ++a) mn = le(m0, a);
      if (mn) bottom = m0;
    }
    if (bottom < 0) continue;
    std::vector<std::uint16_t> table(std::size_t(n) * std::size_t(n));
    bool all_joins = true;
    for (int a = 0; a < n && all_joins; ++a)
      for (int b = 0; b < n && all_joins; ++b) {
        int join = -1;
        for (int u = 0; u < n; ++u) {
          if (!le(a, u) || !le(b, u)) continue;
          bool least = true;
          for (int v = 0; v < n && least; ++v)
            if (le(a, v) && le(b, v)) least = le(u, v);
          if (least) { join = u; break; }
        }
        if (join < 0) { all_joins = false; break; }
        table[std::size_t(a) * std::size_t(n) + std::size_t(b)] = std::uint16_t(join);
      }
    if (!all_joins) continue;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("e" + std::to_string(i));
    out.push_back(make_monoid(std::move(names), bottom, std::move(table), n));
  }
  return out;
}

}  // namespace tropica

#endif
