#ifndef TROPICA_FILTERS_HPP
#define TROPICA_FILTERS_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tropica/subset.hpp"

namespace tropica {

// Deduplicated family of subsets of [ground], masks kept sorted for lookup.
struct SubsetFamily {
  int ground = 0;
  std::vector<std::uint64_t> members;

  bool contains(std::uint64_t mask) const {
    return std::binary_search(members.begin(), members.end(), mask);
  }
  bool contains(const Subset& s) const { return s.n == ground && contains(s.bits); }
  std::size_t size() const { return members.size(); }

  friend bool operator==(const SubsetFamily&, const SubsetFamily&) = default;
};

inline SubsetFamily make_family(int ground, std::vector<std::uint64_t> masks) {
  require_ground(ground);
  for (std::uint64_t m : masks)
    if (m & ~ground_mask(ground)) throw DomainMismatch("family member has bits outside the ground set");
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  return SubsetFamily{ground, std::move(masks)};
}

inline SubsetFamily make_family(int ground, const std::vector<Subset>& sets) {
  std::vector<std::uint64_t> masks;
  masks.reserve(sets.size());
  for (const Subset& s : sets) {
    if (s.n != ground) throw DomainMismatch("family member lives on a different ground set");
    masks.push_back(s.bits);
  }
  return make_family(ground, std::move(masks));
}

enum class FamilyKind { Filter, Ultrafilter, Ideal, Neither };

struct FilterCertificate {
  FamilyKind kind = FamilyKind::Neither;
  bool proper = false;
  std::optional<Subset> principal_generator;  // ζ, present for (ultra)filters
};

namespace detail {

// On finite ground sets, upward closure reduces to one-element extensions.
inline bool upward_closed(const SubsetFamily& f) {
  const std::uint64_t omega = ground_mask(f.ground);
  for (std::uint64_t a : f.members) {
    std::uint64_t missing = omega & ~a;
    while (missing) {
      std::uint64_t bit = missing & (~missing + 1);
      if (!f.contains(a | bit)) return false;
      missing ^= bit;
    }
  }
  return true;
}

inline bool downward_closed(const SubsetFamily& f) {
  for (std::uint64_t a : f.members) {
    std::uint64_t present = a;
    while (present) {
      std::uint64_t bit = present & (~present + 1);
      if (!f.contains(a & ~bit)) return false;
      present ^= bit;
    }
  }
  return true;
}

inline std::uint64_t intersection_of_members(const SubsetFamily& f) {
  std::uint64_t z = ground_mask(f.ground);
  for (std::uint64_t a : f.members) z &= a;
  return z;
}

inline std::uint64_t union_of_members(const SubsetFamily& f) {
  std::uint64_t u = 0;
  for (std::uint64_t a : f.members) u |= a;
  return u;
}

}  // namespace detail

// Kind detection from the definitions.  For an upward-closed family,
// downward directedness is equivalent to containing the intersection of all
// members (directed + closed gives x ∩ y ∈ F pairwise, then by induction the
// full intersection; conversely that intersection is a common lower bound).
// The dual argument covers ideals.  Filter takes priority over Ideal for the
// full power set, which is both.
inline FilterCertificate classify(const SubsetFamily& f) {
  if (f.members.empty()) throw EmptyFamily("a filter or ideal is nonempty by definition");
  FilterCertificate cert;
  if (detail::upward_closed(f) && f.contains(detail::intersection_of_members(f))) {
    Subset zeta{detail::intersection_of_members(f), f.ground};
    cert.proper = !f.contains(std::uint64_t(0));
    cert.kind = (cert.proper && zeta.card() == 1) ? FamilyKind::Ultrafilter : FamilyKind::Filter;
    cert.principal_generator = zeta;
    return cert;
  }
  if (detail::downward_closed(f) && f.contains(detail::union_of_members(f))) {
    cert.kind = FamilyKind::Ideal;
    cert.proper = !f.contains(ground_mask(f.ground));
    return cert;
  }
  return cert;
}

inline SubsetFamily dual(const SubsetFamily& f) {
  std::vector<std::uint64_t> masks;
  masks.reserve(f.members.size());
  const std::uint64_t omega = ground_mask(f.ground);
  for (std::uint64_t a : f.members) masks.push_back(omega & ~a);
  return make_family(f.ground, std::move(masks));
}

namespace detail {

inline void require_family_budget(int free_bits) {
  if (free_bits > 22)
    throw TooLarge("materializing this family would exceed the 2^22-member budget");
}

}  // namespace detail

// Up-set of x in the inclusion order: all supersets within the ground set.
inline SubsetFamily principal_filter(int ground, const Subset& x) {
  require_ground(ground);
  if (x.n != ground) throw DomainMismatch("generator lives on a different ground set");
  const std::uint64_t comp = ground_mask(ground) & ~x.bits;
  detail::require_family_budget(std::popcount(comp));
  std::vector<std::uint64_t> masks;
  std::uint64_t s = comp;
  while (true) {
    masks.push_back(x.bits | s);
    if (s == 0) break;
    s = (s - 1) & comp;
  }
  return make_family(ground, std::move(masks));
}

// Down-set of y: all subsets of y.
inline SubsetFamily principal_ideal(int ground, const Subset& y) {
  require_ground(ground);
  if (y.n != ground) throw DomainMismatch("generator lives on a different ground set");
  detail::require_family_budget(y.card());
  std::vector<std::uint64_t> masks;
  std::uint64_t s = y.bits;
  while (true) {
    masks.push_back(s);
    if (s == 0) break;
    s = (s - 1) & y.bits;
  }
  return make_family(ground, std::move(masks));
}

enum class BaseKind { Filter, Ideal };

// Smallest filter (resp. ideal) containing the base.  Directedness is
// checked in the verbatim existential form, not via lattice meets.
inline SubsetFamily extend_base(const SubsetFamily& base, BaseKind kind) {
  if (base.members.empty()) throw EmptyFamily("a base is nonempty by definition");
  if (base.ground > 20) throw TooLarge("base extension materializes up to 2^n members; ground capped at 20");
  for (std::uint64_t x : base.members)
    for (std::uint64_t y : base.members) {
      bool ok = false;
      for (std::uint64_t z : base.members) {
        if (kind == BaseKind::Filter ? ((z & ~(x & y)) == 0) : ((~z & (x | y)) == 0)) {
          ok = true;
          break;
        }
      }
      if (!ok)
        throw NotABase("no member " + std::string(kind == BaseKind::Filter ? "below" : "above") + " both " +
                       to_string(Subset{x, base.ground}) + " and " + to_string(Subset{y, base.ground}));
    }
  std::vector<char> seen(std::size_t(1) << base.ground, 0);
  const std::uint64_t omega = ground_mask(base.ground);
  for (std::uint64_t a : base.members) {
    const std::uint64_t free_bits = kind == BaseKind::Filter ? (omega & ~a) : a;
    std::uint64_t s = free_bits;
    while (true) {
      seen[std::size_t(kind == BaseKind::Filter ? (a | s) : s)] = 1;
      if (s == 0) break;
      s = (s - 1) & free_bits;
    }
  }
  std::vector<std::uint64_t> masks;
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << base.ground); ++m)
    if (seen[std::size_t(m)]) masks.push_back(m);
  return make_family(base.ground, std::move(masks));
}

enum class Tri { Zero, One, Undefined };

// τ(X) = 1 iff X ∈ F, 0 iff X^c ∈ F, undefined otherwise.
inline Tri filter_measure(const SubsetFamily& f, const Subset& X) {
  FilterCertificate cert = classify(f);
  if ((cert.kind != FamilyKind::Filter && cert.kind != FamilyKind::Ultrafilter) || !cert.proper)
    throw NotAProperFilter("filter_measure needs a proper filter");
  if (X.n != f.ground) throw DomainMismatch("subset lives on a different ground set");
  if (f.contains(X.bits)) return Tri::One;
  if (f.contains(ground_mask(f.ground) & ~X.bits)) return Tri::Zero;
  return Tri::Undefined;
}

}  // namespace tropica

#endif
