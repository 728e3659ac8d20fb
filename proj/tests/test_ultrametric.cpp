#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tropica/padic.hpp"
#include "tropica/ultrametric.hpp"

using namespace tropica;

namespace {

template <class S>
UltrametricMatrix<S> triple_matrix(S a, S b, S c, Mode form) {
  Mat<S> d = Mat<S>::Constant(3, 3, ScalarOps<S>::from_int(0));
  d(0, 1) = d(1, 0) = a;  // d(1,2)
  d(0, 2) = d(2, 0) = b;  // d(1,3)
  d(1, 2) = d(2, 1) = c;  // d(2,3)
  return UltrametricMatrix<S>{{"1", "2", "3"}, d, form};
}

SubsetFamily power_set_family(int n) {
  std::vector<std::uint64_t> all;
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m) all.push_back(m);
  return make_family(n, std::move(all));
}

// Every triple of a valid matrix is isoceles: max form equalizes the two
// largest distances, min form the two smallest. Independent oracle.
template <class S>
bool isoceles_everywhere(const UltrametricMatrix<S>& m) {
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j)
      for (int k = j + 1; k < m.size(); ++k) {
        std::vector<S> v{m.d(i, j), m.d(i, k), m.d(j, k)};
        std::sort(v.begin(), v.end());
        if (m.form == Mode::Max ? !(v[1] == v[2]) : !(v[0] == v[1])) return false;
      }
  return true;
}

}  // namespace

TEST_CASE("verification of explicit matrices") {
  SUBCASE("equilateral is valid in both forms") {
    for (Mode form : {Mode::Max, Mode::Min}) {
      auto m = triple_matrix<double>(1, 1, 1, form);
      VerifyReport<double> r = verify_ultrametric(m);
      CHECK(r.valid);
      CHECK(r.triangle_ok);
      CHECK(r.reduction_ok);
      CHECK(r.checks_agree);
      CHECK(!r.worst.has_value());
    }
  }

  SUBCASE("isoceles with long legs is valid max-form only") {
    auto m = triple_matrix<double>(1, 2, 2, Mode::Max);
    CHECK(verify_ultrametric(m).valid);
    m.form = Mode::Min;
    VerifyReport<double> r = verify_ultrametric(m);
    CHECK(!r.valid);  // the two smallest distances differ
    CHECK(r.checks_agree);
  }

  SUBCASE("a long side is reported with the worst triple") {
    auto m = triple_matrix<double>(1, 2, 4, Mode::Max);
    VerifyReport<double> r = verify_ultrametric(m);
    CHECK(!r.valid);
    CHECK(!r.triangle_ok);
    CHECK(!r.reduction_ok);
    CHECK(r.checks_agree);
    REQUIRE(r.worst.has_value());
    CHECK(*r.worst == WorstTriple{1, 2, 0});  // d(2,3)=4 against pivot 1
    CHECK(r.worst_violation == 2.0);
  }

  SUBCASE("structural errors") {
    auto m = triple_matrix<double>(1, 1, 1, Mode::Max);
    m.d(0, 1) = 2;
    CHECK_THROWS_AS(verify_ultrametric(m), ShapeError);  // asymmetric
    m.d(0, 1) = -1;
    m.d(1, 0) = -1;
    CHECK_THROWS_AS(verify_ultrametric(m), NegativeDistance);
    m = triple_matrix<double>(1, 1, 1, Mode::Max);
    m.d(2, 2) = 1;
    CHECK_THROWS_AS(verify_ultrametric(m), ShapeError);
    UltrametricMatrix<double> bad{{"a", "b"}, Mat<double>::Constant(3, 3, 0.0), Mode::Max};
    CHECK_THROWS_AS(verify_ultrametric(bad), ShapeError);
  }

  SUBCASE("zero off-diagonal fails positivity but not the triangle") {
    auto m = triple_matrix<double>(0, 1, 1, Mode::Max);
    VerifyReport<double> r = verify_ultrametric(m);
    CHECK(!r.valid);
    CHECK(r.triangle_ok);
    CHECK(!r.positivity_ok);
  }
}

TEST_CASE("triangle and reduction routes agree on random and perturbed input") {
  oracles::TestRng rng(401);
  int invalid_seen = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 3 + int(rng.uniform_int(0, 5));
    auto m = random_tree_ultrametric<double>(n, 9000 + std::uint64_t(trial));
    if (trial % 2 == 1) {
      int i = int(rng.uniform_int(0, n - 1));
      int j = int(rng.uniform_int(0, n - 2));
      if (j >= i) ++j;
      double bump = rng.uniform01() < 0.5 ? m.d(i, j) * 3 + 1 : m.d(i, j) / 3;
      m.d(i, j) = bump;
      m.d(j, i) = bump;
    }
    VerifyReport<double> r = verify_ultrametric(m);
    CHECK(r.checks_agree);
    if (!r.triangle_ok) {
      ++invalid_seen;
      REQUIRE(r.worst.has_value());
      // Reported triple really violates, by the amount claimed.
      double bound = std::max(m.d(r.worst->x, r.worst->z), m.d(r.worst->z, r.worst->y));
      CHECK(m.d(r.worst->x, r.worst->y) > bound);
      CHECK(m.d(r.worst->x, r.worst->y) - bound == r.worst_violation);
    } else {
      CHECK(isoceles_everywhere(m));
    }
  }
  CHECK(invalid_seen > 100);
}

TEST_CASE("tree-generated matrices are valid and isoceles in both scalar modes") {
  for (int trial = 0; trial < 30; ++trial) {
    auto mf = random_tree_ultrametric<double>(2 + trial % 9, 100 + std::uint64_t(trial));
    CHECK(verify_ultrametric(mf).valid);
    CHECK(isoceles_everywhere(mf));
    auto me = random_tree_ultrametric<Rat>(2 + trial % 9, 100 + std::uint64_t(trial));
    CHECK(verify_ultrametric(me).valid);
    CHECK(isoceles_everywhere(me));
    // The min form holds after reflecting distances below a ceiling.
    Rat ceiling(1000);
    UltrametricMatrix<Rat> mm = me;
    mm.form = Mode::Min;
    for (int i = 0; i < mm.size(); ++i)
      for (int j = 0; j < mm.size(); ++j)
        if (i != j) mm.d(i, j) = ceiling - me.d(i, j);
    CHECK(verify_ultrametric(mm).valid);
    CHECK(isoceles_everywhere(mm));
  }
}

TEST_CASE("balls") {
  auto m = triple_matrix<double>(1, 2, 2, Mode::Max);
  CHECK(ball(m, 0, 0.0) == subset_of(3, 0b001));
  CHECK(ball(m, 0, 2.0) == full_subset(3));
  CHECK(ball(m, 0, 1.0) == subset_of(3, 0b011));
  CHECK(ball(m, "2", 1.0) == subset_of(3, 0b011));
  CHECK_THROWS_AS(ball(m, 7, 1.0), UnknownPoint);
  CHECK_THROWS_AS(ball(m, "zz", 1.0), UnknownPoint);

  SUBCASE("every member of a ball is a center of it") {
    for (int trial = 0; trial < 40; ++trial) {
      auto t = random_tree_ultrametric<double>(3 + trial % 10, 500 + std::uint64_t(trial));
      for (int c = 0; c < t.size(); ++c)
        for (int y = 0; y < t.size(); ++y) {
          double r = t.d(c, y);
          Subset b = ball(t, c, r);
          for (int z = 0; z < t.size(); ++z)
            if (b.contains(z + 1)) CHECK(ball(t, z, r) == b);
        }
    }
  }
}

TEST_CASE("attained-radius ball family") {
  SUBCASE("generates the full power set on finite input") {
    auto m = random_tree_ultrametric<double>(4, 77);
    BallFamilyReport rep = ball_ideal_base(m);
    CHECK(!rep.proper);
    SubsetFamily ideal = extend_base(rep.base, BaseKind::Ideal);
    CHECK(ideal.size() == 16);  // the trivial ideal
    CHECK(rep.base.contains(full_subset(4)));
  }

  SUBCASE("union of two balls sits inside a ball of the family") {
    for (int trial = 0; trial < 100; ++trial) {
      auto m = random_tree_ultrametric<double>(2 + trial % 11, 1300 + std::uint64_t(trial));
      BallFamilyReport rep = ball_ideal_base(m);
      oracles::TestRng rng(40 + std::uint64_t(trial));
      for (int k = 0; k < 10; ++k) {
        std::uint64_t u =
            rep.base.members[std::size_t(rng.uniform_int(0, (long long)rep.base.size() - 1))] |
            rep.base.members[std::size_t(rng.uniform_int(0, (long long)rep.base.size() - 1))];
        bool contained = false;
        for (std::uint64_t b : rep.base.members) contained = contained || (u & ~b) == 0;
        CHECK(contained);
      }
    }
  }

  SUBCASE("rejects invalid or min-form input") {
    auto bad = triple_matrix<double>(1, 2, 4, Mode::Max);
    CHECK_THROWS_AS(ball_ideal_base(bad), NotUltrametric);
    auto mn = triple_matrix<double>(1, 1, 1, Mode::Min);
    CHECK_THROWS_AS(ball_ideal_base(mn), NotUltrametric);
  }

  SUBCASE("the euclidean segment has no attained covering ball") {
    SegmentFixtureReport rep = euclidean_segment_fixture();
    CHECK(rep.union_covers_segment);
    CHECK(!rep.covering_attained_ball_exists);
    CHECK(rep.centers_checked.size() == 23);
  }
}

TEST_CASE("ideal to ultrametric") {
  SUBCASE("count-based diameter on the trivial ideal") {
    SubsetFamily ideal = power_set_family(3);
    std::vector<Rat> vals;
    for (std::uint64_t m : ideal.members) vals.push_back(Rat(4 - std::popcount(m)));
    auto diam = make_diameter(ideal, vals, Monotonicity::Decreasing);
    auto out = ideal_to_ultrametric(ideal, diam, Mode::Max);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(out.d(i, j) == (i == j ? Rat(0) : Rat(1)));
    CHECK(verify_ultrametric(out).valid);
  }

  SUBCASE("increasing diameter gives the min form") {
    SubsetFamily ideal = power_set_family(3);
    std::vector<Rat> vals;
    for (std::uint64_t m : ideal.members) vals.push_back(Rat(1 + std::popcount(m)));
    auto diam = make_diameter(ideal, vals, Monotonicity::Increasing);
    auto out = ideal_to_ultrametric(ideal, diam, Mode::Min);
    CHECK(out.d(0, 1) == Rat(4));  // sup over supersets reaches the full set
    CHECK(verify_ultrametric(out).valid);
    CHECK_THROWS_AS(ideal_to_ultrametric(ideal, diam, Mode::Max), MonotonicityError);
  }

  SUBCASE("random decreasing diameters give exactly valid matrices") {
    oracles::TestRng rng(601);
    for (int trial = 0; trial < 50; ++trial) {
      int n = 2 + trial % 4;
      SubsetFamily ideal = power_set_family(n);
      // Weight-sum diameters are strictly decreasing and strictly positive.
      std::vector<Rat> w;
      Rat total(1);
      for (int i = 0; i < n; ++i) {
        w.push_back(Rat(rng.uniform_int(1, 20), rng.uniform_int(1, 5)));
        total += w.back();
      }
      std::vector<Rat> vals;
      for (std::uint64_t m : ideal.members) {
        Rat s(0);
        for (int i = 0; i < n; ++i)
          if (m & (std::uint64_t(1) << i)) s += w[std::size_t(i)];
        vals.push_back(total - s);
      }
      auto diam = make_diameter(ideal, vals, Monotonicity::Decreasing);
      auto out = ideal_to_ultrametric(ideal, diam, Mode::Max);
      VerifyReport<Rat> r = verify_ultrametric(out);
      CHECK(r.valid);
      CHECK(r.reduction_ok);
    }
  }

  SUBCASE("degeneration chain and the flagged limit") {
    // Diameter 1 - sum 2^-a over the members: the distance between points 1
    // and 2 equals the value on the full set and halves with each added
    // point.
    for (int n = 2; n <= 10; ++n) {
      SubsetFamily ideal = power_set_family(n);
      std::vector<Rat> vals;
      for (std::uint64_t m : ideal.members) {
        Rat s(0);
        for (int a = 1; a <= n; ++a)
          if (m & (std::uint64_t(1) << (a - 1))) s += Rat(1, int128(1) << a);
        vals.push_back(Rat(1) - s);
      }
      auto diam = make_diameter(ideal, vals, Monotonicity::Decreasing);
      auto out = ideal_to_ultrametric(ideal, diam, Mode::Max);
      CHECK(out.d(0, 1) == Rat(1, int128(1) << n));
    }
    // At the limit the full-set value reaches 0 and conversion must refuse.
    {
      const int n = 4;
      SubsetFamily ideal = power_set_family(n);
      Rat floor(1, int128(1) << n);
      std::vector<Rat> vals;
      for (std::uint64_t m : ideal.members) {
        Rat s(0);
        for (int a = 1; a <= n; ++a)
          if (m & (std::uint64_t(1) << (a - 1))) s += Rat(1, int128(1) << a);
        vals.push_back(Rat(1) - s - floor < Rat(0) ? Rat(0) : Rat(1) - s - floor);
      }
      auto diam = make_diameter(ideal, vals, Monotonicity::Decreasing, /*allow_zero=*/true);
      CHECK_THROWS_AS(ideal_to_ultrametric(ideal, diam, Mode::Max, /*relax=*/true),
                      DegenerateDistance);
    }
  }

  SUBCASE("errors") {
    SubsetFamily notcover = principal_ideal(3, subset_from_indices(3, {1, 2}));
    std::vector<Rat> vals(notcover.size(), Rat(1));
    auto diam = make_diameter(notcover, vals, Monotonicity::Decreasing);
    CHECK_THROWS_AS(ideal_to_ultrametric(notcover, diam, Mode::Max), CoverageError);
    SubsetFamily filt = principal_filter(3, subset_from_indices(3, {1}));
    std::vector<Rat> fv(filt.size(), Rat(1));
    DiameterFunction<Rat> fd{filt, fv, Monotonicity::Decreasing};
    CHECK_THROWS_AS(ideal_to_ultrametric(filt, fd, Mode::Max), NotAnIdeal);
    CHECK_THROWS_AS(make_diameter(notcover, std::vector<Rat>{Rat(1)}, Monotonicity::Decreasing),
                    SizeMismatch);
    CHECK_THROWS_AS(
        make_diameter(notcover, std::vector<Rat>(notcover.size(), Rat(0)), Monotonicity::Decreasing),
        NonpositiveInput);
  }
}

TEST_CASE("filter to ultrametric") {
  SUBCASE("principal core pairs get infinite distance, deinfinitated to 1") {
    SubsetFamily filt = principal_filter(3, subset_from_indices(3, {1}));
    std::vector<Rat> vals;
    for (std::uint64_t m : filt.members) vals.push_back(Rat(std::popcount(m)));
    auto diam = make_diameter(filt, vals, Monotonicity::Increasing);
    auto out = filter_to_ultrametric(filt, diam);
    CHECK(out.d(0, 1) == Rat::pos_inf());
    CHECK(out.d(0, 2) == Rat::pos_inf());
    CHECK(out.d(1, 2) == Rat(1));  // the member {1} is disjoint from {2,3}
    CHECK(verify_ultrametric(out).valid);
    auto g = deinfinitate(out);
    CHECK(g.d(0, 1) == Rat(1));
    CHECK(g.d(1, 2) == Rat(1, 2));
    CHECK(verify_ultrametric(g).valid);
  }

  SUBCASE("non-monotone split diameter breaks the triangle, and that is asserted") {
    SubsetFamily filt = power_set_family(3);
    std::vector<Rat> vals;
    for (std::uint64_t m : filt.members) vals.push_back((m & 0b011) == 0 ? Rat(3) : Rat(1));
    // This function is decreasing on the power set, so construction accepts
    // it; the filter conversion wants increasing and must be relaxed.
    auto diam = make_diameter(filt, vals, Monotonicity::Decreasing);
    CHECK_THROWS_AS(filter_to_ultrametric(filt, diam), MonotonicityError);
    auto out = filter_to_ultrametric(filt, diam, /*relax_preconditions=*/true);
    CHECK(out.d(0, 1) == Rat(3));
    CHECK(out.d(0, 2) == Rat(1));
    CHECK(out.d(1, 2) == Rat(1));
    VerifyReport<Rat> r = verify_ultrametric(out);
    CHECK(!r.valid);
    CHECK(!r.triangle_ok);
    CHECK(r.checks_agree);
    REQUIRE(r.worst.has_value());
    CHECK(*r.worst == WorstTriple{0, 1, 2});
  }

  SUBCASE("rejects non-filters") {
    SubsetFamily ideal = principal_ideal(3, subset_from_indices(3, {1}));
    std::vector<Rat> vals(ideal.size(), Rat(1));
    DiameterFunction<Rat> diam{ideal, vals, Monotonicity::Increasing};
    CHECK_THROWS_AS(filter_to_ultrametric(ideal, diam), NotAFilter);
  }
}

TEST_CASE("ultradiameter") {
  auto m = triple_matrix<double>(1, 2, 2, Mode::Max);
  CHECK(ultradiameter(m, full_subset(3)) == 0.0);
  CHECK(ultradiameter(m, empty_subset(3)) == 2.0);
  CHECK(ultradiameter(m, subset_from_indices(3, {3})) == 1.0);
  CHECK(ultradiameter(m, subset_from_indices(3, {1, 3})) == 0.0);

  SUBCASE("monotone decreasing under inclusion") {
    for (int trial = 0; trial < 20; ++trial) {
      auto t = random_tree_ultrametric<double>(6, 2200 + std::uint64_t(trial));
      for (std::uint64_t g1 = 0; g1 < 64; ++g1)
        for (std::uint64_t g2 = g1;; g2 = (g2 + 1) | g1) {
          if (g2 >= 64) break;
          CHECK(ultradiameter(t, subset_of(6, g1)) >= ultradiameter(t, subset_of(6, g2)));
        }
    }
  }
}

TEST_CASE("roundtrip through balls, ideal, dual filter, and ultradiameter") {
  SUBCASE("two points with seed distance five") {
    Mat<double> d = Mat<double>::Constant(2, 2, 0.0);
    d(0, 1) = d(1, 0) = 5;
    auto m = make_ultrametric<double>({"1", "2"}, d, Mode::Max);
    RoundtripReport<double> r = roundtrip_check(m);
    CHECK(r.equal);
    CHECK(r.max_deviation == 0.0);
  }

  SUBCASE("equilateral") {
    auto m = triple_matrix<Rat>(Rat(1), Rat(1), Rat(1), Mode::Max);
    CHECK(roundtrip_check(m).equal);
  }

  SUBCASE("random trees, float and exact") {
    for (int trial = 0; trial < 40; ++trial) {
      int n = 1 + trial % 12;
      auto mf = random_tree_ultrametric<double>(n, 3100 + std::uint64_t(trial));
      RoundtripReport<double> rf = roundtrip_check(mf);
      CHECK(rf.equal);
      CHECK(rf.max_deviation == 0.0);
      auto me = random_tree_ultrametric<Rat>(n, 3100 + std::uint64_t(trial));
      RoundtripReport<Rat> re = roundtrip_check(me);
      CHECK(re.equal);
      CHECK(re.max_deviation == Rat(0));
    }
  }

  SUBCASE("p-adic sample") {
    const long long p = 3;
    std::vector<Rat> pts{Rat(0), Rat(1), Rat(p), Rat(p * p), Rat(1, p)};
    auto m = padic_sample_matrix(pts, p);
    CHECK(verify_ultrametric(m).valid);
    RoundtripReport<Rat> r = roundtrip_check(m);
    CHECK(r.equal);
  }
}

TEST_CASE("deinfinitation") {
  CHECK(deinfinitate(Rat(1)) == Rat(1, 2));
  CHECK(deinfinitate(Rat::pos_inf()) == Rat(1));
  CHECK(deinfinitate(1.0) == 0.5);
  CHECK(deinfinitate(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(deinfinitate(0.0), NonpositiveInput);
  CHECK_THROWS_AS(deinfinitate(Rat(-1)), NonpositiveInput);
  oracles::TestRng rng(701);
  double prev_x = 0, prev_g = 0;
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(std::exp(rng.uniform(-8, 8)));
  std::sort(grid.begin(), grid.end());
  for (double x : grid) {
    double g = deinfinitate(x);
    CHECK(g > 0);
    CHECK(g < 1);
    if (prev_x > 0 && x > prev_x) CHECK(g > prev_g);
    prev_x = x;
    prev_g = g;
  }
}

TEST_CASE("p-adic norms") {
  CHECK(padic_norm(Rat(1, 8), 2) == Rat(8));
  CHECK(padic_norm(Rat(0), 2) == Rat(0));
  CHECK(padic_norm(Rat(9, 2), 3) == Rat(1, 9));
  for (long long p : {2LL, 3LL, 5LL, 7LL})
    for (int n = -10; n <= 10; ++n) {
      Rat q = pow(Rat(p), n);
      CHECK(padic_norm(q, p) == pow(Rat(p), -n));
    }
  CHECK(padic_valuation(Rat(12), 2) == 2);
  CHECK(padic_valuation(Rat(5, 27), 3) == -3);
  CHECK_THROWS_AS(padic_norm(Rat(1), 6), NotPrime);
  CHECK_THROWS_AS(padic_norm(Rat(1), 1), NotPrime);
  CHECK_THROWS_AS(padic_norm(Rat(1), (1LL << 31) + 3), TooLarge);
  CHECK_THROWS_AS(padic_valuation(Rat(0), 2), DomainMismatch);
  CHECK(is_prime(2147483647));

  SUBCASE("finite samples are valid max-form ultrametrics") {
    for (long long p : {2LL, 3LL, 5LL}) {
      std::vector<Rat> pts;
      for (int k = -3; k <= 3; ++k) pts.push_back(pow(Rat(p), k));
      pts.push_back(Rat(0));
      pts.push_back(Rat(1 + p));
      auto m = padic_sample_matrix(pts, p);
      CHECK(verify_ultrametric(m).valid);
      CHECK(isoceles_everywhere(m));
    }
    CHECK_THROWS_AS(padic_sample_matrix({Rat(1), Rat(1)}, 2), DomainMismatch);
  }

  SUBCASE("capacity limits propagate") {
    Rat big(int128(1) << 126, 1);
    CHECK_THROWS_AS(padic_sample_matrix({big, -big, Rat(0)}, 2), CapacityError);
  }
}
