#ifndef TROPICA_AMOEBA_HPP
#define TROPICA_AMOEBA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tropica/filters.hpp"
#include "tropica/parallel.hpp"

namespace tropica {

// Signed subset weight over a tabulated parameter grid:
// Z_k(I; x) = -sum_{a in I} e^{f_a(x)} + sum_{b not in I} e^{f_b(x)}.
// Grid points carry one f value per system; point indices count from zero.

struct AmoebaModel {
  int n = 0;  // system count
  int k = 1;  // subset size, constrained by 2k < n + 1
  std::vector<std::vector<double>> grid;  // per point: n tabulated f values
};

inline AmoebaModel make_amoeba_model(int n, int k, std::vector<std::vector<double>> grid,
                                     bool unguarded = false) {
  if (n < 1) throw ShapeError("system count must be positive");
  require_ground(n);
  if (k < 1 || 2 * k >= n + 1)
    throw DomainMismatch("subset size must satisfy 1 <= k and 2k < n + 1");
  if (!unguarded && (n > 24 || k > 6))
    throw TooLarge("enumeration guard: n <= 24 and k <= 6 unless explicitly lifted");
  for (const std::vector<double>& row : grid) {
    if (int(row.size()) != n)
      throw SizeMismatch("grid row carries " + std::to_string(row.size()) + " values, expected " +
                         std::to_string(n));
    for (double v : row)
      if (!std::isfinite(v)) throw DomainMismatch("tabulated values must be finite");
  }
  return AmoebaModel{n, k, std::move(grid)};
}

namespace detail {

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 acc = 1;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return (long long)acc;
}

// exponent shift plus the signed factor: Z = e^{shift} * gap, with the sign
// settled on the well-scaled gap before the positive factor is applied
struct SignedWeight {
  double shift = 0;
  double gap = 0;
};

inline SignedWeight signed_weight(const AmoebaModel& model, std::uint64_t mask, int x) {
  const std::vector<double>& f = model.grid[std::size_t(x)];
  const double shift = *std::max_element(f.begin(), f.end());
  double gap = 0;
  for (int i = 0; i < model.n; ++i) {
    const double e = std::exp(f[std::size_t(i)] - shift);
    gap += (mask >> i) & 1u ? -e : e;
  }
  return {shift, gap};
}

inline void require_point(const AmoebaModel& model, int x) {
  if (x < 0 || x >= int(model.grid.size()))
    throw DomainMismatch("grid point " + std::to_string(x) + " outside the tabulated grid");
}

}  // namespace detail

inline double amoeba_weight(const AmoebaModel& model, const Subset& I, int x) {
  if (I.n != model.n) throw DomainMismatch("subset lives on a different index set");
  if (I.card() != model.k)
    throw SizeMismatch("subset has " + std::to_string(I.card()) + " elements, expected " +
                       std::to_string(model.k));
  detail::require_point(model, x);
  const detail::SignedWeight w = detail::signed_weight(model, I.bits, x);
  return std::exp(w.shift) * w.gap;
}

// All k-subsets with negative weight at the point, enumerated exactly in
// increasing mask order.
inline SubsetFamily negative_family(const AmoebaModel& model, int x) {
  detail::require_point(model, x);
  const std::uint64_t top = ground_mask(model.n) ^ ground_mask(model.n - model.k);
  std::vector<std::uint64_t> members;
  std::uint64_t mask = ground_mask(model.k);
  while (true) {
    if (detail::signed_weight(model, mask, x).gap < 0) members.push_back(mask);
    if (mask == top) break;
    const std::uint64_t u = mask & (~mask + 1);
    const std::uint64_t v = mask + u;
    mask = v | (((mask ^ v) / u) >> 2);
  }
  return SubsetFamily{model.n, std::move(members)};
}

struct ScanRow {
  int point = 0;
  long long family_size = 0;      // #N_k at the point
  long long max_cardinality = 0;  // C(n-1, k-1)
  bool flagged = false;           // family_size == max_cardinality
  std::optional<int> alpha;       // unique strict maximizer of f, when it exists
  bool trace_ok = true;           // flagged points: N_k = {k-subsets containing alpha}
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<int> trace_failures;  // flagged points breaking the trace identity
};

// Per grid point: the negative family, the instability flag, and on flagged
// points the check that N_k is exactly the trace of the principal
// ultrafilter at the dominant index. A flagged point failing that identity
// contradicts the characterization of the instability domain, so it is
// surfaced in trace_failures for the caller to escalate.
inline ScanResult instability_scan(const AmoebaModel& model) {
  if (model.grid.empty()) throw ShapeError("scan needs at least one grid point");
  ScanResult out;
  out.rows.resize(model.grid.size());
  parallel_for(model.grid.size(), [&](std::size_t p) {
    ScanRow row;
    row.point = int(p);
    const SubsetFamily family = negative_family(model, int(p));
    row.family_size = (long long)family.size();
    row.max_cardinality = detail::binom(model.n - 1, model.k - 1);
    row.flagged = row.family_size == row.max_cardinality;

    const std::vector<double>& f = model.grid[p];
    int best = 0;
    bool unique = true;
    for (int i = 1; i < model.n; ++i) {
      if (f[std::size_t(i)] > f[std::size_t(best)]) {
        best = i;
        unique = true;
      } else if (f[std::size_t(i)] == f[std::size_t(best)]) {
        unique = false;
      }
    }
    if (unique) row.alpha = best + 1;

    if (row.flagged) {
      bool ok = row.alpha.has_value();
      if (ok) {
        const std::uint64_t bit = std::uint64_t(1) << (*row.alpha - 1);
        std::size_t hits = 0;
        for (std::uint64_t m : family.members)
          if (m & bit) ++hits;
        ok = hits == family.members.size() &&
             (long long)hits == detail::binom(model.n - 1, model.k - 1);
      }
      row.trace_ok = ok;
    }
    out.rows[p] = std::move(row);
  });
  for (const ScanRow& row : out.rows)
    if (row.flagged && !row.trace_ok) out.trace_failures.push_back(row.point);
  return out;
}

}  // namespace tropica

#endif
