#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tropica/thermo.hpp"
#include "tropica/tropical.hpp"

using namespace tropica;
using oracles::TestRng;

namespace {

Ensemble<double> random_ensemble(TestRng& rng, int max_n) {
  const int n = int(rng.uniform_int(1, max_n));
  std::vector<MicroSystem<double>> sys;
  for (int i = 0; i < n; ++i) {
    double t = 0;
    while (std::abs(t) < 1e-3) t = rng.uniform(-5.0, 5.0);
    sys.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), t});
  }
  return make_ensemble(std::move(sys));
}

Ensemble<Rat> random_exact_ensemble(TestRng& rng, int max_n) {
  const int n = int(rng.uniform_int(1, max_n));
  std::vector<MicroSystem<Rat>> sys;
  for (int i = 0; i < n; ++i) {
    Rat t(0);
    while (t == Rat(0)) t = Rat(int128(rng.uniform_int(-20, 20)), int128(rng.uniform_int(1, 4)));
    sys.push_back({Rat(int128(rng.uniform_int(-20, 20)), int128(rng.uniform_int(1, 4))),
                   Rat(int128(rng.uniform_int(-20, 20)), int128(rng.uniform_int(1, 4))), t});
  }
  return make_ensemble(std::move(sys));
}

}  // namespace

TEST_CASE("micro_free_energy is E minus T times S") {
  CHECK(micro_free_energy(MicroSystem<double>{1, 0, 2}) == 1.0);
  CHECK(micro_free_energy(MicroSystem<double>{1, 1, 1}) == 0.0);
  CHECK(micro_free_energy(MicroSystem<double>{3, 2, 0.5}) == 2.0);
  CHECK(micro_free_energy(MicroSystem<Rat>{Rat(3), Rat(2), Rat(1, 2)}) == Rat(2));
}

TEST_CASE("ensemble construction validates shape and temperatures") {
  CHECK_THROWS_AS(make_ensemble(std::vector<MicroSystem<double>>{}), EmptySpectrum);
  CHECK_THROWS_AS(make_ensemble(std::vector<MicroSystem<double>>{{1, 1, 1}}, {"a", "b"}),
                  SizeMismatch);
  CHECK_THROWS_AS(make_ensemble(std::vector<MicroSystem<double>>{{1, 1, 0}}), ZeroTemperature);
  CHECK_THROWS_AS(
      make_ensemble(std::vector<MicroSystem<double>>{{std::nan(""), 0, 1}}),
      DomainMismatch);
  const Ensemble<double> e = make_ensemble(std::vector<MicroSystem<double>>{{1, 1, 1}, {2, 0, 1}});
  CHECK(e.labels == std::vector<std::string>{"1", "2"});
}

TEST_CASE("tropical_free_energy_B minimizes F over T with its tie set") {
  const auto equilibrium = make_ensemble(std::vector<MicroSystem<double>>{{0, 0, 1}, {1, 0, 1}});
  const TropicalValueB<double> r = tropical_free_energy_B(equilibrium);
  CHECK(r.value == 0.0);
  CHECK(r.argmin == std::vector<int>{1});

  // A negative local temperature flips the sign of the objective.
  const auto signs = make_ensemble(std::vector<MicroSystem<double>>{{1, 0, 1}, {1, 0, -1}});
  const TropicalValueB<double> rs = tropical_free_energy_B(signs);
  CHECK(rs.value == -1.0);
  CHECK(rs.argmin == std::vector<int>{2});

  const auto single = make_ensemble(std::vector<MicroSystem<double>>{{3, 1, 2}});
  CHECK(tropical_free_energy_B(single).value == 0.5);

  const auto tied = make_ensemble(std::vector<MicroSystem<double>>{{2, 1, 1}, {1, 0, 1}, {5, 0, 1}});
  CHECK(tropical_free_energy_B(tied).argmin == std::vector<int>{1, 2});
}

TEST_CASE("tropical objectives feed the min monoid") {
  TestRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Ensemble<double> e = random_ensemble(rng, 12);
    const std::vector<double> obj = tropical_objectives(e);
    double folded = obj.front();
    for (double v : obj) folded = oplus(folded, v, Mode::Min);
    CHECK(folded == tropical_free_energy_B(e).value);
  }
}

TEST_CASE("ab_dual swaps energy with entropy and inverts temperature") {
  const auto e = make_ensemble(std::vector<MicroSystem<double>>{{2, 3, 4}}, {"x"});
  const Ensemble<double> d = ab_dual(e);
  CHECK(d.systems[0].energy == 3.0);
  CHECK(d.systems[0].entropy == 2.0);
  CHECK(d.systems[0].temperature == 0.25);
  CHECK(d.labels == std::vector<std::string>{"x"});

  // Fixed points: self-dual systems have E = S and T = +-1.
  const auto fixed = make_ensemble(std::vector<MicroSystem<double>>{{2, 2, 1}, {3, 3, -1}});
  const Ensemble<double> fd = ab_dual(fixed);
  for (std::size_t i = 0; i < fixed.systems.size(); ++i) {
    CHECK(fd.systems[i].energy == fixed.systems[i].energy);
    CHECK(fd.systems[i].entropy == fixed.systems[i].entropy);
    CHECK(fd.systems[i].temperature == fixed.systems[i].temperature);
  }
}

TEST_CASE("ab_dual is an involution") {
  TestRng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const Ensemble<Rat> e = random_exact_ensemble(rng, 10);
    const Ensemble<Rat> dd = ab_dual(ab_dual(e));
    for (std::size_t i = 0; i < e.systems.size(); ++i) {
      CHECK(dd.systems[i].energy == e.systems[i].energy);
      CHECK(dd.systems[i].entropy == e.systems[i].entropy);
      CHECK(dd.systems[i].temperature == e.systems[i].temperature);
    }
  }
}

TEST_CASE("duality identity holds on random float ensembles") {
  TestRng rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const Ensemble<double> e = random_ensemble(rng, 20);
    const DualityReport<double> rep = duality_identity(e);
    CHECK(rep.equal);
    CHECK(rep.argmin == rep.argmax);
  }
}

TEST_CASE("duality identity is exact in exact arithmetic") {
  TestRng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const Ensemble<Rat> e = random_exact_ensemble(rng, 12);
    const DualityReport<Rat> rep = duality_identity(e);
    CHECK(rep.deviation == Rat(0));
    CHECK(rep.equal);
    CHECK(rep.argmin == rep.argmax);
  }
  const auto single = make_ensemble(std::vector<MicroSystem<Rat>>{{Rat(5), Rat(2), Rat(-3)}});
  const DualityReport<Rat> rep = duality_identity(single);
  CHECK(rep.lhs == rep.rhs);
  CHECK(rep.argmin == std::vector<int>{1});
}

TEST_CASE("shift diagnostics on an equilibrium ensemble") {
  TestRng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = int(rng.uniform_int(1, 10));
    double t = 0;
    while (std::abs(t) < 1e-3) t = rng.uniform(0.1, 5.0);
    std::vector<MicroSystem<double>> sys;
    for (int i = 0; i < n; ++i)
      sys.push_back({double(rng.uniform_int(-8, 8)) / 2.0, double(rng.uniform_int(-8, 8)) / 2.0, t});
    const Ensemble<double> e = make_ensemble(std::move(sys));
    const std::vector<double> shifts{-3.0, -0.5, 0.25, 2.0, 7.5};
    const ShiftReport<double> rep = shift_diagnostics(e, shifts);
    CHECK(rep.equilibrium);
    CHECK(!rep.witness.has_value());
    for (const ShiftProbe<double>& p : rep.probes) {
      CHECK(p.f_shift_preserves_argmin);
      CHECK(p.e_shift_argmin == rep.base_argmin);
      CHECK(!p.e_shift_changes_order);
      CHECK(!p.dual_shift_changes_differences);
    }
  }
}

TEST_CASE("a common negative temperature still makes shifts harmless") {
  const auto e = make_ensemble(std::vector<MicroSystem<double>>{{1, 2, -2}, {0, 1, -2}, {3, 0, -2}});
  const ShiftReport<double> rep = shift_diagnostics(e, {1.0, -4.0});
  CHECK(rep.equilibrium);
  for (const ShiftProbe<double>& p : rep.probes) {
    CHECK(p.f_shift_preserves_argmin);
    CHECK(!p.e_shift_changes_order);
  }
}

TEST_CASE("an energy shift reorders a non-equilibrium ensemble") {
  const auto e = make_ensemble(std::vector<MicroSystem<double>>{{0, 0, 1}, {0, 0, 2}});
  const ShiftReport<double> rep = shift_diagnostics(e, {2.0});
  CHECK(!rep.equilibrium);
  REQUIRE(rep.probes.size() == 1);
  // Unshifted objectives tie at 0; the shift 2 makes them 2 and 1.
  CHECK(rep.base_argmin == std::vector<int>{1, 2});
  CHECK(rep.probes[0].e_shift_changes_order);
  CHECK(rep.probes[0].e_shift_argmin == std::vector<int>{2});
  CHECK(!rep.probes[0].dual_shift_changes_differences);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->a == 1);
  CHECK(rep.witness->b == 2);
  const double s = rep.witness->shift;
  CHECK(std::abs(s / 1.0 - s / 2.0) > 1e-9);
}

TEST_CASE("the witness search can come up empty on a well-separated ensemble") {
  const auto e = make_ensemble(std::vector<MicroSystem<double>>{{-100, 0, 1}, {200, 0, 2}});
  const ShiftReport<double> rep = shift_diagnostics(e, {});
  CHECK(!rep.equilibrium);
  CHECK(!rep.witness.has_value());
}

TEST_CASE("the dual A-side objective ignores energy shifts") {
  TestRng rng(66);
  for (int trial = 0; trial < 100; ++trial) {
    const Ensemble<double> e = random_ensemble(rng, 8);
    const ShiftReport<double> rep = shift_diagnostics(e, {-6.0, 1.0, 9.0});
    for (const ShiftProbe<double>& p : rep.probes) CHECK(!p.dual_shift_changes_differences);
  }
}

TEST_CASE("usual_probability counts minimizers exactly") {
  const std::vector<double> unique_min{0.5, 0.0, 2.0};
  CHECK(usual_probability(unique_min, subset_from_indices(3, {2})) == Rat(1));
  CHECK(usual_probability(unique_min, subset_from_indices(3, {1, 3})) == Rat(0));
  CHECK(usual_probability(unique_min, full_subset(3)) == Rat(1));

  const std::vector<double> tied{0.0, 0.0, 1.0};
  CHECK(usual_probability(tied, subset_from_indices(3, {1})) == Rat(1, 2));
  CHECK(usual_probability(tied, empty_subset(3)) == Rat(0));
  CHECK_THROWS_AS(usual_probability(tied, full_subset(4)), DomainMismatch);
  CHECK_THROWS_AS(usual_probability(std::vector<double>{}, full_subset(0)), EmptySpectrum);
}

TEST_CASE("usual_probability is a probability measure") {
  TestRng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = int(rng.uniform_int(1, 5));
    std::vector<Rat> s;
    for (int i = 0; i < n; ++i) s.push_back(Rat(int128(rng.uniform_int(-3, 3)), int128(2)));
    CHECK(usual_probability(s, full_subset(n)) == Rat(1));
    CHECK(usual_probability(s, empty_subset(n)) == Rat(0));
    const std::uint64_t omega = ground_mask(n);
    for (std::uint64_t a = 0; a <= omega; ++a) {
      // enumerate b over subsets of the complement so (a, b) runs over all
      // disjoint pairs
      const std::uint64_t comp = omega & ~a;
      std::uint64_t b = 0;
      while (true) {
        const Rat wa = usual_probability(s, subset_of(n, a));
        const Rat wb = usual_probability(s, subset_of(n, b));
        const Rat wab = usual_probability(s, subset_of(n, a | b));
        REQUIRE(wab == wa + wb);
        if (b == comp) break;
        b = (b + 1 + ~comp) & comp;
      }
      if (a == omega) break;
    }
  }
}

TEST_CASE("tropical weights normalize at the minimizer set") {
  // Unique minimizer: its level weight is zero, everything else negative.
  const std::vector<double> s{0.0, 0.5, 2.0};
  const TropicalWeights<double> tw = tropical_weights(s, 0.0);
  CHECK(tw.m0 == std::vector<int>{1});
  CHECK(tw.W[0] == 0.0);
  CHECK(tw.W[1] < 0.0);
  CHECK(tw.W[2] < 0.0);
  CHECK(tw.w == tw.W);  // spectrum overload carries no entropies

  // Doubly degenerate minimum at k_B > 0: both top weights are -k_B ln 2.
  const std::vector<double> tied{1.0, 1.0, 3.0};
  const TropicalWeights<double> tk = tropical_weights(tied, 0.5);
  CHECK(tk.m0 == std::vector<int>{1, 2});
  CHECK(tk.W[0] == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(tk.W[1] == tk.W[0]);
  CHECK(tk.W[2] < tk.W[0]);
}

TEST_CASE("tropical weights at k_B = 0 are max-normalized for any ensemble") {
  TestRng rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = int(rng.uniform_int(1, 15));
    double t = rng.uniform(0.1, 4.0);
    std::vector<MicroSystem<double>> sys;
    for (int i = 0; i < n; ++i)
      sys.push_back({double(rng.uniform_int(-6, 6)), double(rng.uniform_int(-6, 6)) / 2.0, t});
    const Ensemble<double> e = make_ensemble(std::move(sys));
    const TropicalWeights<double> tw = tropical_weights(e, 0.0);
    double top = tw.W.front();
    for (double v : tw.W) top = std::max(top, v);
    CHECK(top == 0.0);
    for (std::size_t i = 0; i < tw.W.size(); ++i) {
      const bool in_m0 = std::find(tw.m0.begin(), tw.m0.end(), int(i) + 1) != tw.m0.end();
      CHECK((tw.W[i] == 0.0) == in_m0);
      CHECK(tw.w[i] == tw.W[i] - e.systems[i].entropy);
    }
  }
}

TEST_CASE("tropical weights validate their inputs") {
  const std::vector<double> s{0.0, 1.0};
  CHECK_THROWS_AS(tropical_weights(s, -0.1), NegativeInput);
  const auto mixed = make_ensemble(std::vector<MicroSystem<double>>{{0, 0, 1}, {0, 0, 2}});
  CHECK_THROWS_AS(tropical_weights(mixed, 0.0), DomainMismatch);
  const auto cold = make_ensemble(std::vector<MicroSystem<double>>{{0, 0, -1}});
  CHECK_THROWS_AS(tropical_weights(cold, 0.0), NonpositiveTemperature);

  // Exact mode: the degeneracy penalty k_B ln lambda_0 is irrational unless
  // it vanishes.
  const std::vector<Rat> tied{Rat(1), Rat(1)};
  CHECK(tropical_weights(tied, Rat(0)).W == std::vector<Rat>{Rat(0), Rat(0)});
  CHECK_THROWS_AS(tropical_weights(tied, Rat(1)), Unsupported);
  const std::vector<Rat> unique_min{Rat(0), Rat(1)};
  CHECK(tropical_weights(unique_min, Rat(1)).W[0] == Rat(0));
}

TEST_CASE("copy_effect reports the minimizer weight before and after duplication") {
  const std::vector<double> lone{0.0, 1.0};
  const CopyEffect c1 = copy_effect(lone, 1);
  CHECK(c1.before == Rat(1));
  CHECK(c1.after == Rat(1));

  const std::vector<double> twice{0.0, 0.0, 1.0};
  const CopyEffect c2 = copy_effect(twice, 2);
  CHECK(c2.before == Rat(1, 2));
  CHECK(c2.after == Rat(2, 3));

  const std::vector<double> thrice{0.0, 0.0, 0.0};
  const CopyEffect c3 = copy_effect(thrice, 3);
  CHECK(c3.before == Rat(1, 3));
  CHECK(c3.after == Rat(1, 2));

  CHECK_THROWS_AS(copy_effect(twice, 3), NotAMinimizer);
  CHECK_THROWS_AS(copy_effect(twice, 0), DomainMismatch);
  CHECK_THROWS_AS(copy_effect(twice, 4), DomainMismatch);
}

TEST_CASE("copy_effect agrees with recounting on the duplicated spectrum") {
  TestRng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = int(rng.uniform_int(1, 10));
    std::vector<double> s;
    for (int i = 0; i < n; ++i) s.push_back(double(rng.uniform_int(0, 3)));
    const std::vector<int> m0 = tropica::detail::tie_set_min(s, 1e-9);
    const int alpha0 = m0[std::size_t(rng.uniform_int(0, (long long)m0.size() - 1))];
    const CopyEffect c = copy_effect(s, alpha0);
    CHECK(c.before == usual_probability(s, subset_from_indices(n, {alpha0})));
    std::vector<double> dup = s;
    dup.push_back(s[std::size_t(alpha0 - 1)]);
    CHECK(c.after == usual_probability(dup, subset_from_indices(n + 1, {alpha0, n + 1})));
  }
}
