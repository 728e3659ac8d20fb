#ifndef TROPICA_ULTRAMETRIC_HPP
#define TROPICA_ULTRAMETRIC_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tropica/filters.hpp"
#include "tropica/parallel.hpp"
#include "tropica/scalar.hpp"
#include "tropica/tropical.hpp"

namespace tropica {

// Finite labeled point set with a symmetric nonnegative distance matrix.
// Mode::Max carries d(x,y) <= max{d(x,z), d(z,y)}; Mode::Min carries the
// conjugate min{d(x,z), d(z,y)} <= d(x,y). Entries may be pos_inf.
template <class S>
struct UltrametricMatrix {
  std::vector<std::string> points;
  Mat<S> d;
  Mode form = Mode::Max;

  int size() const { return int(points.size()); }
};

template <class S>
void validate_distance_structure(const UltrametricMatrix<S>& m) {
  const int n = m.size();
  if (m.d.rows() != n || m.d.cols() != n)
    throw ShapeError("distance matrix is " + std::to_string(m.d.rows()) + "x" +
                     std::to_string(m.d.cols()) + " but there are " + std::to_string(n) +
                     " points");
  const S zero = ScalarOps<S>::from_int(0);
  for (int i = 0; i < n; ++i) {
    if (!(m.d(i, i) == zero)) throw ShapeError("nonzero diagonal at point " + m.points[std::size_t(i)]);
    for (int j = 0; j < n; ++j) {
      if (m.d(i, j) < zero)
        throw NegativeDistance("d(" + m.points[std::size_t(i)] + "," + m.points[std::size_t(j)] + ") < 0");
      if (!(m.d(i, j) == m.d(j, i)))
        throw ShapeError("asymmetric entry at (" + m.points[std::size_t(i)] + "," +
                         m.points[std::size_t(j)] + ")");
    }
  }
}

template <class S>
UltrametricMatrix<S> make_ultrametric(std::vector<std::string> points, Mat<S> d, Mode form) {
  UltrametricMatrix<S> m{std::move(points), std::move(d), form};
  validate_distance_structure(m);
  return m;
}

template <class S>
int point_index(const UltrametricMatrix<S>& m, const std::string& label) {
  for (int i = 0; i < m.size(); ++i)
    if (m.points[std::size_t(i)] == label) return i;
  throw UnknownPoint("no point labeled " + label);
}

// Ordered triple (x, y, z): the checked inequality compares d(x,y) against
// the pair d(x,z), d(z,y) through the pivot z.
struct WorstTriple {
  int x = 0, y = 0, z = 0;
  friend bool operator==(const WorstTriple&, const WorstTriple&) = default;
};

template <class S>
struct VerifyReport {
  bool valid = false;         // triangle_ok && positivity_ok
  bool triangle_ok = false;   // the form's triangle inequality on all triples
  bool reduction_ok = false;  // a (+) b (+) c = a (+) c with the form's (+)
  bool checks_agree = false;  // the two routes returned the same verdict
  bool positivity_ok = false; // off-diagonal entries strictly positive
  std::optional<WorstTriple> worst;  // maximal violation, lexicographic tie-break
  S worst_violation = ScalarOps<S>::from_int(0);
};

// Two independent verification routes over all ordered triples of distinct
// points: the form's triangle inequality, and the idempotent-sum reduction
// d(x,z) (+) d(z,y) (+) d(x,y) = d(x,z) (+) d(x,y), which folds the same
// inequality into one equation. Both are exact comparisons in either scalar
// mode because the idempotent sum returns one of its arguments unchanged.
template <class S>
VerifyReport<S> verify_ultrametric(const UltrametricMatrix<S>& m) {
  validate_distance_structure(m);
  const int n = m.size();
  const S zero = ScalarOps<S>::from_int(0);

  VerifyReport<S> rep;
  rep.positivity_ok = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(zero < m.d(i, j))) rep.positivity_ok = false;

  struct Best {
    bool has = false;
    S v = ScalarOps<S>::from_int(0);
    WorstTriple t;
    bool reduction_ok = true;
  };
  auto lex_less = [](const WorstTriple& a, const WorstTriple& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  };
  auto combine = [&](Best a, const Best& b) {
    a.reduction_ok = a.reduction_ok && b.reduction_ok;
    if (b.has && (!a.has || a.v < b.v || (!(b.v < a.v) && lex_less(b.t, a.t)))) {
      a.has = b.has;
      a.v = b.v;
      a.t = b.t;
    }
    return a;
  };
  const std::size_t total = n >= 3 ? std::size_t(n) * std::size_t(n) * std::size_t(n) : 0;
  Best best = parallel_map_reduce(
      total, Best{},
      [&](std::size_t idx) {
        const int z = int(idx % std::size_t(n));
        const int y = int((idx / std::size_t(n)) % std::size_t(n));
        const int x = int(idx / (std::size_t(n) * std::size_t(n)));
        Best out;
        if (x == y || y == z || x == z) return out;
        const S& dxy = m.d(x, y);
        const S& dxz = m.d(x, z);
        const S& dzy = m.d(z, y);
        S bound = m.form == Mode::Max ? max(dxz, dzy) : min(dxz, dzy);
        // Violation amount: positive exactly when the inequality fails.
        if (m.form == Mode::Max ? bound < dxy : dxy < bound) {
          out.has = true;
          out.v = m.form == Mode::Max ? dxy - bound : bound - dxy;
          out.t = WorstTriple{x, y, z};
        }
        S lhs = oplus(oplus(dxz, dzy, m.form), dxy, m.form);
        S rhs = oplus(dxz, dxy, m.form);
        out.reduction_ok = lhs == rhs;
        return out;
      },
      combine);
  rep.triangle_ok = !best.has;
  rep.reduction_ok = best.reduction_ok;
  rep.checks_agree = rep.triangle_ok == rep.reduction_ok;
  if (best.has) {
    rep.worst = best.t;
    rep.worst_violation = best.v;
  }
  rep.valid = rep.triangle_ok && rep.positivity_ok;
  return rep;
}

// Closed ball around a point. In a valid max-form matrix every member of the
// ball is an equivalent center for the same radius.
template <class S>
Subset ball(const UltrametricMatrix<S>& m, int center, const S& radius) {
  const int n = m.size();
  require_ground(n);
  if (center < 0 || center >= n)
    throw UnknownPoint("center index " + std::to_string(center) + " out of range");
  std::uint64_t bits = 0;
  for (int y = 0; y < n; ++y)
    if (!(radius < m.d(center, y))) bits |= std::uint64_t(1) << y;
  return Subset{bits, n};
}

template <class S>
Subset ball(const UltrametricMatrix<S>& m, const std::string& center, const S& radius) {
  return ball(m, point_index(m, center), radius);
}

struct BallFamilyReport {
  SubsetFamily base;
  // A proper ideal needs the pairwise-distance supremum to be unattained;
  // a finite point set always attains it, so the flag is constantly false
  // here and the generated ideal is the full power set.
  bool proper = false;
};

// Family of all balls with attained radii r = d(x0, y). It is directed
// upward (the attained-max ball around any center is the whole set), so it
// is a base for an ideal.
template <class S>
BallFamilyReport ball_ideal_base(const UltrametricMatrix<S>& m) {
  if (m.form != Mode::Max) throw NotUltrametric("ball families need a max-form matrix");
  VerifyReport<S> rep = verify_ultrametric(m);
  if (!rep.valid) throw NotUltrametric("matrix fails max-form verification");
  const int n = m.size();
  require_ground(n);
  std::vector<std::uint64_t> masks;
  for (int x0 = 0; x0 < n; ++x0)
    for (int y = 0; y < n; ++y) masks.push_back(ball(m, x0, m.d(x0, y)).bits);
  return BallFamilyReport{make_family(n, std::move(masks)), false};
}

// sup{ d(x,y) : x, y outside G }, with sup over nothing defined as 0.
template <class S>
S ultradiameter(const UltrametricMatrix<S>& m, const Subset& G) {
  if (G.n != m.size()) throw DomainMismatch("subset lives on a different point set");
  S best = ScalarOps<S>::from_int(0);
  for (int x = 0; x < m.size(); ++x) {
    if (G.contains(x + 1)) continue;
    for (int y = x + 1; y < m.size(); ++y) {
      if (G.contains(y + 1)) continue;
      if (best < m.d(x, y)) best = m.d(x, y);
    }
  }
  return best;
}

enum class Monotonicity { Increasing, Decreasing };

// Strictly positive set function on a family, with a declared monotonicity
// direction that construction verifies against inclusion.
template <class S>
struct DiameterFunction {
  SubsetFamily domain;
  std::vector<S> values;  // parallel to domain.members
  Monotonicity declared = Monotonicity::Decreasing;

  const S& at(std::uint64_t mask) const {
    auto it = std::lower_bound(domain.members.begin(), domain.members.end(), mask);
    if (it == domain.members.end() || *it != mask)
      throw DomainMismatch("set is outside the diameter function's domain");
    return values[std::size_t(it - domain.members.begin())];
  }
};

// allow_zero admits the boundary value 0 for the degeneration fixture; the
// conversion operations still refuse to emit a zero distance.
template <class S>
DiameterFunction<S> make_diameter(SubsetFamily domain, std::vector<S> values, Monotonicity declared,
                                  bool allow_zero = false) {
  if (domain.members.size() != values.size())
    throw SizeMismatch("need one value per domain member");
  const S zero = ScalarOps<S>::from_int(0);
  for (const S& v : values) {
    if (v < zero || (!allow_zero && v == zero))
      throw NonpositiveInput("diameter values must be strictly positive");
  }
  const std::size_t k = domain.members.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if ((domain.members[i] & ~domain.members[j]) != 0) continue;  // need A subset of B
      const bool ok = declared == Monotonicity::Increasing ? !(values[j] < values[i])
                                                           : !(values[i] < values[j]);
      if (!ok)
        throw MonotonicityError("declared direction fails on " +
                                to_string(Subset{domain.members[i], domain.ground}) + " inside " +
                                to_string(Subset{domain.members[j], domain.ground}));
    }
  return DiameterFunction<S>{std::move(domain), std::move(values), declared};
}

namespace detail {

// Structural family checks, independent of the labeling priority used by
// classify (the full power set is simultaneously a filter and an ideal).
inline bool is_ideal_family(const SubsetFamily& f) {
  return !f.members.empty() && downward_closed(f) && f.contains(union_of_members(f));
}

inline bool is_filter_family(const SubsetFamily& f) {
  return !f.members.empty() && upward_closed(f) && f.contains(intersection_of_members(f));
}

template <class S>
void require_diameter_covers(const DiameterFunction<S>& diam, const SubsetFamily& fam) {
  if (diam.domain.ground != fam.ground)
    throw DomainMismatch("diameter function lives on a different ground set");
  for (std::uint64_t m : fam.members) (void)diam.at(m);
}

}  // namespace detail

// d(x,y) = inf{ diam(A) : A in the ideal, {x,y} inside A } for the max form,
// sup of the same candidate set for the min form. inf of nothing is pos_inf,
// sup of nothing is 0 (which then trips the degeneracy check).
template <class S>
UltrametricMatrix<S> ideal_to_ultrametric(const SubsetFamily& ideal, const DiameterFunction<S>& diam,
                                          Mode form, bool relax_preconditions = false) {
  if (!detail::is_ideal_family(ideal)) throw NotAnIdeal("input family is not an ideal");
  detail::require_diameter_covers(diam, ideal);
  const int n = ideal.ground;
  if (detail::union_of_members(ideal) != ground_mask(n))
    throw CoverageError("ideal does not cover the ground set");
  if (!relax_preconditions) {
    const Monotonicity need = form == Mode::Max ? Monotonicity::Decreasing : Monotonicity::Increasing;
    if (diam.declared != need)
      throw MonotonicityError(form == Mode::Max ? "max form needs a decreasing diameter"
                                                : "min form needs an increasing diameter");
    const S zero = ScalarOps<S>::from_int(0);
    for (const S& v : diam.values)
      if (!(zero < v)) throw MonotonicityError("diameter infimum must be positive");
  }
  UltrametricMatrix<S> out;
  out.points = detail::default_labels(n);
  out.form = form;
  out.d = Mat<S>::Constant(n, n, ScalarOps<S>::from_int(0));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const std::uint64_t need = (std::uint64_t(1) << x) | (std::uint64_t(1) << y);
      std::optional<S> acc;
      for (std::size_t i = 0; i < ideal.members.size(); ++i) {
        const std::uint64_t a = ideal.members[i];
        if ((need & ~a) != 0) continue;
        const S& v = diam.at(a);
        if (!acc)
          acc = v;
        else
          acc = form == Mode::Max ? min(*acc, v) : max(*acc, v);
      }
      S dist = acc ? *acc
                   : (form == Mode::Max ? ScalarOps<S>::pos_inf() : ScalarOps<S>::from_int(0));
      if (!(ScalarOps<S>::from_int(0) < dist))
        throw DegenerateDistance("computed d(" + std::to_string(x + 1) + "," +
                                 std::to_string(y + 1) + ") is not positive");
      out.d(x, y) = dist;
      out.d(y, x) = dist;
    }
  if (!relax_preconditions) {
    VerifyReport<S> rep = verify_ultrametric(out);
    if (!rep.valid)
      throw InvariantViolation("ideal_to_ultrametric output failed verification despite preconditions");
  }
  return out;
}

// D(x,y) = inf{ diam(G) : G in the filter, G disjoint from {x,y} }, with
// inf of nothing equal to pos_inf (the members around a principal core are
// never disjoint from pairs meeting that core).
template <class S>
UltrametricMatrix<S> filter_to_ultrametric(const SubsetFamily& filter,
                                           const DiameterFunction<S>& diam,
                                           bool relax_preconditions = false) {
  if (!detail::is_filter_family(filter)) throw NotAFilter("input family is not a filter");
  detail::require_diameter_covers(diam, filter);
  if (!relax_preconditions) {
    if (diam.declared != Monotonicity::Increasing)
      throw MonotonicityError("filter conversion needs an increasing diameter");
    const S zero = ScalarOps<S>::from_int(0);
    for (const S& v : diam.values)
      if (!(zero < v)) throw MonotonicityError("diameter infimum must be positive");
  }
  const int n = filter.ground;
  UltrametricMatrix<S> out;
  out.points = detail::default_labels(n);
  out.form = Mode::Max;
  out.d = Mat<S>::Constant(n, n, ScalarOps<S>::from_int(0));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const std::uint64_t pair = (std::uint64_t(1) << x) | (std::uint64_t(1) << y);
      std::optional<S> acc;
      for (std::uint64_t g : filter.members) {
        if ((g & pair) != 0) continue;
        const S& v = diam.at(g);
        if (!acc || v < *acc) acc = v;
      }
      S dist = acc ? *acc : ScalarOps<S>::pos_inf();
      if (!(ScalarOps<S>::from_int(0) < dist))
        throw DegenerateDistance("computed D(" + std::to_string(x + 1) + "," +
                                 std::to_string(y + 1) + ") is not positive");
      out.d(x, y) = dist;
      out.d(y, x) = dist;
    }
  if (!relax_preconditions) {
    VerifyReport<S> rep = verify_ultrametric(out);
    if (!rep.valid)
      throw InvariantViolation("filter_to_ultrametric output failed verification despite preconditions");
  }
  return out;
}

template <class S>
struct RoundtripReport {
  bool equal = false;
  S max_deviation = ScalarOps<S>::from_int(0);
};

// Seed -> attained-radius balls -> generated ideal -> dual filter -> back to
// a distance via the ultradiameter. The reconstructed D equals the seed: the
// largest member disjoint from {x,y} is the complement of {x,y}, and the
// ultradiameter there is exactly d(x,y).
template <class S>
RoundtripReport<S> roundtrip_check(const UltrametricMatrix<S>& seed) {
  BallFamilyReport balls = ball_ideal_base(seed);
  SubsetFamily ideal = extend_base(balls.base, BaseKind::Ideal);
  SubsetFamily filt = dual(ideal);
  std::vector<S> vals;
  vals.reserve(filt.members.size());
  for (std::uint64_t g : filt.members)
    vals.push_back(ultradiameter(seed, Subset{g, seed.size()}));
  // The induced diameter decreases as the set grows, so the increasing
  // precondition is deliberately relaxed; degeneracy checks stay active.
  DiameterFunction<S> diam{filt, std::move(vals), Monotonicity::Decreasing};
  UltrametricMatrix<S> back = filter_to_ultrametric(filt, diam, /*relax_preconditions=*/true);
  RoundtripReport<S> rep;
  rep.equal = true;
  for (int x = 0; x < seed.size(); ++x)
    for (int y = 0; y < seed.size(); ++y) {
      S dev = ScalarOps<S>::abs(back.d(x, y) - seed.d(x, y));
      if (rep.max_deviation < dev) rep.max_deviation = dev;
    }
  if constexpr (ScalarOps<S>::exact)
    rep.equal = rep.max_deviation == ScalarOps<S>::from_int(0);
  else
    rep.equal = !(1e-12 < rep.max_deviation);
  return rep;
}

// g(x) = (1 + 1/x)^{-1} = x / (1 + x): strictly increasing on (0, inf),
// g(pos_inf) = 1, range inside (0, 1]. Monotone maps preserve both
// triangle forms, so deinfinitating a matrix keeps it ultrametric.
template <class S>
S deinfinitate(const S& x) {
  if (!(ScalarOps<S>::from_int(0) < x)) throw NonpositiveInput("deinfinitate needs x > 0");
  if (ScalarOps<S>::is_pos_inf(x)) return ScalarOps<S>::from_int(1);
  return x / (ScalarOps<S>::from_int(1) + x);
}

template <class S>
UltrametricMatrix<S> deinfinitate(const UltrametricMatrix<S>& m) {
  UltrametricMatrix<S> out = m;
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (i != j) out.d(i, j) = deinfinitate(m.d(i, j));
  return out;
}

// Random ultrametrics from random merge trees: clusters fuse at strictly
// increasing heights and d(x,y) is the height at which x and y first share
// a cluster. Every finite ultrametric arises from such a tree, which makes
// the generator an independent oracle for the verification routines.
template <class S>
UltrametricMatrix<S> random_tree_ultrametric(int n, std::uint64_t seed) {
  if (n < 1) throw ShapeError("need at least one point");
  std::mt19937_64 g(seed);
  UltrametricMatrix<S> out;
  out.points = detail::default_labels(n);
  out.form = Mode::Max;
  out.d = Mat<S>::Constant(n, n, ScalarOps<S>::from_int(0));
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});
  S height = ScalarOps<S>::from_int(0);
  while (clusters.size() > 1) {
    const std::size_t i = std::size_t(g() % clusters.size());
    std::size_t j = std::size_t(g() % (clusters.size() - 1));
    if (j >= i) ++j;
    const std::size_t a = std::min(i, j), b = std::max(i, j);
    height = height + ScalarOps<S>::from_int(1 + static_cast<long long>(g() % 8)) /
                          ScalarOps<S>::from_int(1 + static_cast<long long>(g() % 4));
    for (int x : clusters[a])
      for (int y : clusters[b]) {
        out.d(x, y) = height;
        out.d(y, x) = height;
      }
    clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
    clusters.erase(clusters.begin() + std::ptrdiff_t(b));
  }
  return out;
}

// Open segment (0, 3) of the line with |x - y|: the two unit balls around 1
// and 2 cover the whole segment, but every attained radius at a center c is
// strictly below max(c, 3 - c), the least radius whose ball would cover.
// So the attained-radius ball family fails the directedness that holds for
// ultrametrics. All endpoints are exact rationals.
struct SegmentFixtureReport {
  bool union_covers_segment = false;
  bool covering_attained_ball_exists = false;
  std::vector<Rat> centers_checked;
};

inline SegmentFixtureReport euclidean_segment_fixture() {
  SegmentFixtureReport rep;
  const Rat lo(0), hi(3);
  // S(1,1) reaches (0, 2], S(2,1) reaches [1, 3): together they cover iff
  // the left ball touches the left end, the right ball the right end, and
  // the two overlap in the middle.
  const Rat c1(1), c2(2), r(1);
  rep.union_covers_segment =
      (c1 - r) <= lo && (c2 + r) >= hi && (c2 - r) <= (c1 + r);
  bool some_cover = false;
  for (int k = 1; k <= 23; ++k) {
    Rat c(k, 8);
    rep.centers_checked.push_back(c);
    // Radii attained at c form [0, max(c, 3-c)) with an open right end,
    // because the segment itself excludes 0 and 3. Covering the segment
    // needs r >= max(c, 3-c), which that half-open set never reaches.
    Rat needed = max(c - lo, hi - c);
    Rat attained_sup = max(c - lo, hi - c);
    bool sup_attained = false;  // endpoints are outside the open segment
    if (sup_attained || attained_sup > needed) some_cover = true;
  }
  rep.covering_attained_ball_exists = some_cover;
  return rep;
}

}  // namespace tropica

#endif
