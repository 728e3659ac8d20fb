#ifndef TROPICA_DEQUANTIFY_HPP
#define TROPICA_DEQUANTIFY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tropica/nesting.hpp"
#include "tropica/subset.hpp"
#include "tropica/thermo.hpp"

namespace tropica {

// Copy-indexed index space [N] x {1,2,...}: the successor map sends a copy
// (alpha, n) to (alpha, n+1). A T-closed set is a union of upward tails, so
// it is stored losslessly as per-base minimal copy numbers plus a flag; the
// canonical empty set is finite, making equality denotational.

struct CopyIndex {
  int alpha = 1;    // 1-based base index
  long long n = 1;  // copy number, starts at 1
  friend bool operator==(const CopyIndex&, const CopyIndex&) = default;
  friend bool operator<(const CopyIndex& a, const CopyIndex& b) {
    return a.alpha != b.alpha ? a.alpha < b.alpha : a.n < b.n;
  }
};

struct CopySet {
  int ground = 0;                  // base indices range over [1, ground]
  bool closed = false;             // members are tail starts (alpha, minimal copy)
  std::vector<CopyIndex> members;  // sorted, unique
  long long closure_bound = 0;     // largest explicitly tracked copy number
  friend bool operator==(const CopySet&, const CopySet&) = default;
};

inline CopySet make_copy_set(int ground, std::vector<CopyIndex> members, bool closed = false) {
  if (ground < 0) throw ShapeError("ground set size must be nonnegative");
  for (const CopyIndex& c : members) {
    if (c.alpha < 1 || c.alpha > ground)
      throw DomainMismatch("base index " + std::to_string(c.alpha) + " outside ground set [" +
                           std::to_string(ground) + "]");
    if (c.n < 1) throw DomainMismatch("copy numbers start at 1");
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (closed) {
    // keep only the minimal copy per base index: it denotes the whole tail
    std::vector<CopyIndex> mins;
    for (const CopyIndex& c : members)
      if (mins.empty() || mins.back().alpha != c.alpha) mins.push_back(c);
    members = std::move(mins);
  }
  CopySet out{ground, members.empty() ? false : closed, std::move(members), 0};
  for (const CopyIndex& c : out.members) out.closure_bound = std::max(out.closure_bound, c.n);
  return out;
}

inline bool copy_contains(const CopySet& s, const CopyIndex& c) {
  if (!s.closed) return std::binary_search(s.members.begin(), s.members.end(), c);
  for (const CopyIndex& m : s.members)
    if (m.alpha == c.alpha) return m.n <= c.n;
  return false;
}

inline bool copy_subseteq(const CopySet& a, const CopySet& b) {
  if (a.ground != b.ground) throw DomainMismatch("copy sets live on different ground sets");
  if (a.closed && !b.closed) return a.members.empty();
  for (const CopyIndex& c : a.members)
    if (!copy_contains(b, c)) return false;
  return true;
}

// T(X) = X with every member's successor added; T-closed sets are exactly
// its fixed points.
inline CopySet t_map(const CopySet& x) {
  if (x.closed) return x;
  std::vector<CopyIndex> grown = x.members;
  for (const CopyIndex& c : x.members) grown.push_back({c.alpha, c.n + 1});
  return make_copy_set(x.ground, std::move(grown));
}

// Smallest T-closed superset: the union of tails starting at each base
// index's minimal copy number.
inline CopySet t_closure(const CopySet& x) {
  if (x.closed) return x;
  return make_copy_set(x.ground, x.members, /*closed=*/true);
}

inline CopySet copy_intersect(const CopySet& a, const CopySet& b) {
  if (a.ground != b.ground) throw DomainMismatch("copy sets live on different ground sets");
  if (a.closed && b.closed) {
    // common bases, later tail start wins
    std::vector<CopyIndex> out;
    for (const CopyIndex& ca : a.members)
      for (const CopyIndex& cb : b.members)
        if (ca.alpha == cb.alpha) out.push_back({ca.alpha, std::max(ca.n, cb.n)});
    return make_copy_set(a.ground, std::move(out), /*closed=*/true);
  }
  const CopySet& finite = a.closed ? b : a;
  const CopySet& other = a.closed ? a : b;
  std::vector<CopyIndex> out;
  for (const CopyIndex& c : finite.members)
    if (copy_contains(other, c)) out.push_back(c);
  return make_copy_set(a.ground, std::move(out));
}

// Copy counts for the dequantification limit, paired with the rule
// k_B = 1 / copies.
struct CopySchedule {
  std::vector<long long> n_list;
};

inline CopySchedule make_schedule(std::vector<long long> n_list) {
  if (n_list.empty()) throw BadSchedule("schedule needs at least one copy count");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw BadSchedule("copy counts start at 1");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw BadSchedule("copy counts must increase strictly");
  }
  return {std::move(n_list)};
}

inline CopySchedule pow2_schedule(int levels) {
  if (levels < 1 || levels > 62) throw BadSchedule("pow2 schedule needs 1 to 62 levels");
  std::vector<long long> n;
  for (int i = 1; i <= levels; ++i) n.push_back(1LL << i);
  return {std::move(n)};
}

// w_a = e^{-f_a/k_B} / sum_b e^{-f_b/k_B}, shifted by the spectrum bottom so
// every exponent is nonpositive.
inline std::vector<double> gibbs_weights(const std::vector<double>& f, double k_B) {
  require_spectrum(f);
  if (!(k_B > 0)) throw NonpositiveInput("Gibbs weights need k_B > 0");
  const double bottom = *std::min_element(f.begin(), f.end());
  std::vector<double> w;
  w.reserve(f.size());
  double z = 0;
  for (double v : f) {
    w.push_back(std::exp((bottom - v) / k_B));
    z += w.back();
  }
  for (double& x : w) x /= z;
  return w;
}

// Weight of a state after it is replicated into `copies` identical copies,
// at k_B = 1/copies:
// copies * e^{-copies f_a} / ((copies-1) e^{-copies f_a} + sum_b e^{-copies f_b}).
inline double gibbs_with_copies(const std::vector<double>& f, int alpha, long long copies) {
  require_spectrum(f);
  if (alpha < 1 || alpha > int(f.size()))
    throw DomainMismatch("state index " + std::to_string(alpha) + " outside the spectrum");
  if (copies < 1) throw NonpositiveInput("copy count must be at least 1");
  const double bottom = *std::min_element(f.begin(), f.end());
  const double nn = double(copies);
  const double ea = std::exp(nn * (bottom - f[std::size_t(alpha - 1)]));
  double z = 0;
  for (double v : f) z += std::exp(nn * (bottom - v));
  return nn * ea / ((nn - 1) * ea + z);
}

struct DequantifyRow {
  long long copies = 0;
  double k_B = 0;
  double w = 0;
  double gap = 0;  // |w - limit|
};

struct DequantifyReport {
  double limit = 0;    // indicator of membership in the minimizer set
  bool dominant = false;
  bool converged = false;
  bool rate_defined = false;
  double fitted_rate = 0;  // least-squares slope of ln gap against ln copies
  std::vector<DequantifyRow> table;
};

// Follows gibbs_with_copies along the schedule. Convergence is declared when
// the last three gaps are nonincreasing and the final gap clears the
// regime's provable rate: 1e-6 for dominant states (O(1/copies) decay needs
// large schedules to get tighter) and 1e-30 for non-dominant ones
// (exponential decay reaches it quickly).
inline DequantifyReport dequantified_weight(const std::vector<double>& f, int alpha,
                                            const CopySchedule& schedule) {
  require_spectrum(f);
  if (alpha < 1 || alpha > int(f.size()))
    throw DomainMismatch("state index " + std::to_string(alpha) + " outside the spectrum");
  if (schedule.n_list.empty()) throw BadSchedule("schedule needs at least one copy count");
  for (std::size_t i = 1; i < schedule.n_list.size(); ++i)
    if (schedule.n_list[i] <= schedule.n_list[i - 1])
      throw BadSchedule("copy counts must increase strictly");

  const std::vector<int> m0 = detail::tie_set_min(f, ScalarOps<double>::default_tie_tol());
  DequantifyReport rep;
  rep.dominant = std::find(m0.begin(), m0.end(), alpha) != m0.end();
  rep.limit = rep.dominant ? 1.0 : 0.0;

  for (long long n : schedule.n_list) {
    DequantifyRow row;
    row.copies = n;
    row.k_B = 1.0 / double(n);
    row.w = gibbs_with_copies(f, alpha, n);
    row.gap = std::abs(row.w - rep.limit);
    rep.table.push_back(row);
  }

  const std::size_t k = rep.table.size();
  if (k >= 3) {
    const bool settling = rep.table[k - 1].gap <= rep.table[k - 2].gap &&
                          rep.table[k - 2].gap <= rep.table[k - 3].gap;
    rep.converged = settling && rep.table[k - 1].gap <= (rep.dominant ? 1e-6 : 1e-30);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long long pts = 0;
  for (const DequantifyRow& row : rep.table) {
    if (!(row.gap > 0)) continue;
    const double x = std::log(double(row.copies));
    const double y = std::log(row.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++pts;
  }
  if (pts >= 2) {
    const double denom = double(pts) * sxx - sx * sx;
    if (denom > 0) {
      rep.fitted_rate = (double(pts) * sxy - sx * sy) / denom;
      rep.rate_defined = true;
    }
  }
  return rep;
}

struct PossibilityReport {
  std::vector<int> w0;  // 0/1 possibility per part
  int union_w0 = 0;
  bool tropical_additive = false;  // union value equals the max over parts
  bool real_additive = false;      // union value equals the plain sum
  long long minimizer_count = 0;
};

// w_0(X) = 1 iff X meets the minimizer set. Always tropically additive;
// real additivity survives only when at most one part meets the minimizers.
template <class S>
PossibilityReport possibility_check(const std::vector<S>& f, const std::vector<Subset>& partition,
                                    const S& tie_tol) {
  require_spectrum(f);
  const int n = int(f.size());
  require_ground(n);
  std::uint64_t seen = 0;
  for (const Subset& part : partition) {
    if (part.n != n) throw DomainMismatch("partition lives on a different index set");
    if (part.bits & seen) throw NotDisjoint("partition parts overlap");
    seen |= part.bits;
  }
  std::uint64_t m0_mask = 0;
  for (int i : detail::tie_set_min(f, tie_tol)) m0_mask |= std::uint64_t(1) << (i - 1);

  PossibilityReport rep;
  rep.minimizer_count = std::popcount(m0_mask);
  std::uint64_t all = 0;
  int top = 0;
  long long sum = 0;
  for (const Subset& part : partition) {
    const int v = (part.bits & m0_mask) ? 1 : 0;
    rep.w0.push_back(v);
    top = std::max(top, v);
    sum += v;
    all |= part.bits;
  }
  rep.union_w0 = (all & m0_mask) ? 1 : 0;
  rep.tropical_additive = rep.union_w0 == top;
  rep.real_additive = rep.union_w0 == sum;
  return rep;
}

template <class S>
PossibilityReport possibility_check(const std::vector<S>& f, const std::vector<Subset>& partition) {
  return possibility_check(f, partition, ScalarOps<S>::default_tie_tol());
}

}  // namespace tropica

#endif
