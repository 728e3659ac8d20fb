#include "tropica/selftest.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropica/amoeba.hpp"
#include "tropica/dequantify.hpp"
#include "tropica/filters.hpp"
#include "tropica/monoid.hpp"
#include "tropica/nesting.hpp"
#include "tropica/padic.hpp"
#include "tropica/polynomial.hpp"
#include "tropica/probe.hpp"
#include "tropica/thermo.hpp"
#include "tropica/ultrametric.hpp"

namespace tropica {

namespace {

struct ReplayFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw ReplayFailure(what);
}

template <class E, class Fn>
void expect_throws(Fn&& fn, const std::string& what) {
  try {
    fn();
  } catch (const E&) {
    return;
  }
  throw ReplayFailure(what);
}

SubsetFamily power_set_family(int n) {
  std::vector<std::uint64_t> all;
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m) all.push_back(m);
  return make_family(n, std::move(all));
}

struct Fixture {
  std::string name;
  std::function<void()> run;
};

std::vector<Fixture> reference_fixtures() {
  std::vector<Fixture> fx;

  fx.push_back({"power-set union: the empty set is neutral and the full set erases", [] {
    FiniteMonoid pu = powerset_union_monoid(3);
    InducedOrder o = induced_order(pu);
    for (int a = 0; a < pu.size(); ++a) expect(o.leq(pu.neutral, a), "neutral sits below element " + std::to_string(a));
    auto top = erasing_element(pu);
    expect(top.has_value() && *top == 7, "the full set is the erasing element");
    expect(!is_grounded(pu), "a carrier with an erasing element is not grounded");
    expect(erasing_element(SymbolicCarrier::PowersetUnion, 4) == std::string("Omega"),
           "symbolic union carrier erases at Omega");
  }});

  fx.push_back({"max-plus and nat-max carriers are grounded; intersection erases at the empty set", [] {
    expect(symbolic_facts(SymbolicCarrier::MaxPlus).grounded, "max-plus is grounded");
    expect(!erasing_element(SymbolicCarrier::MaxPlus).has_value(), "max-plus has no erasing element");
    expect(symbolic_facts(SymbolicCarrier::NatMax).grounded, "nat-max is grounded");
    expect(!symbolic_facts(SymbolicCarrier::PowersetIntersection, 3).grounded,
           "intersection carrier is not grounded");
    expect(erasing_element(SymbolicCarrier::PowersetIntersection, 3) == std::string("{}"),
           "intersection erases at the empty set");
  }});

  fx.push_back({"phi embeds every carrier up to four elements; iota exactly the chains", [] {
    for (int n = 1; n <= 4; ++n)
      for (const FiniteMonoid& m : enumerate_semilattice_monoids(n)) {
        expect(phi_is_homomorphism(m).ok, "phi respects sums on a carrier of size " + std::to_string(n));
        expect(iota_is_homomorphism(m).ok == induced_order(m).total,
               "iota respects sums exactly on total orders");
      }
    SetHomReport ir = iota_is_homomorphism(diamond_monoid());
    expect(!ir.ok && ir.witness.has_value(), "the diamond breaks iota with a witness");
    InducedOrder o = induced_order(diamond_monoid());
    auto [x, y] = *ir.witness;
    expect(!o.leq(x, y) && !o.leq(y, x), "the witness pair is incomparable");
  }});

  fx.push_back({"labeled semilattice counts are 1, 2, 6, 36", [] {
    expect(enumerate_semilattice_monoids(1).size() == 1, "one carrier on one element");
    expect(enumerate_semilattice_monoids(2).size() == 2, "two carriers on two elements");
    expect(enumerate_semilattice_monoids(3).size() == 6, "six carriers on three elements");
    expect(enumerate_semilattice_monoids(4).size() == 36, "thirty-six carriers on four elements");
  }});

  fx.push_back({"almost-complete equivalence holds on every carrier up to four elements", [] {
    for (int n = 1; n <= 4; ++n)
      for (const FiniteMonoid& m : enumerate_semilattice_monoids(n)) {
        AlmostCompleteEquivalence eq = almost_complete_equivalence(m);
        expect(eq.agree() && eq.whole, "whole-carrier completeness matches the per-map route");
      }
  }});

  fx.push_back({"a grounded homomorphic image forces a grounded source", [] {
    auto monoids = enumerate_semilattice_monoids(3);
    int homs_seen = 0;
    for (const FiniteMonoid& m1 : monoids)
      for (const FiniteMonoid& m2 : monoids)
        for (int code = 0; code < 27; ++code) {
          std::vector<int> map{code % 3, (code / 3) % 3, (code / 9) % 3};
          if (!check_homomorphism(map, m1, m2).ok) continue;
          ++homs_seen;
          std::vector<int> image;
          for (int v : map)
            if (std::find(image.begin(), image.end(), v) == image.end()) image.push_back(v);
          bool image_grounded = true;
          for (int t : image) {
            bool erases = true;
            for (int a : image) erases = erases && m2.op(a, t) == t;
            if (erases) image_grounded = false;
          }
          if (image_grounded) expect(is_grounded(m1), "source carrier inherits groundedness");
        }
    expect(homs_seen > 100, "the sweep visited a nontrivial set of homomorphisms");
  }});

  fx.push_back({"chain maps extracted from down-set data compose into homomorphisms", [] {
    FiniteMonoid chain = chain_monoid(3);
    std::vector<Subset> psi;
    for (int a = 0; a < 3; ++a) psi.push_back(subset_of(3, (std::uint64_t(1) << (a + 1)) - 1));
    ChainHom ch = extract_chain_hom(psi, chain, chain);
    expect(ch.theta == std::vector<int>{0, 1, 2}, "inclusive down-sets give the identity");
    expect(ch.covering_ok && ch.theta_is_hom, "the extracted map covers and respects sums");
    expect(ch.delta0 == full_subset(3), "the vacuum preimage is the whole chain");
    IotaThetaReport strict = iota_theta_check(chain_monoid(4), diamond_monoid(), {0, 1, 1, 3});
    expect(strict.union_law && strict.vacuum_preserved && strict.is_hom,
           "a vacuum-preserving monotone map satisfies the union law");
    IotaThetaReport ties = iota_theta_check(chain_monoid(4), diamond_monoid(), {1, 1, 1, 1});
    expect(ties.union_law && !ties.vacuum_preserved && !ties.is_hom,
           "moving the vacuum breaks the homomorphism but not the union law");
  }});

  fx.push_back({"appending a duplicate monomial never changes tropical values", [] {
    TropicalPolynomial<double> p{Mode::Max, 1, {{0.0, {0}}, {1.0, {1}}}};
    TropicalPolynomial<double> q = p;
    q.monomials.push_back({1.0, {1}});
    for (int i = 0; i < 100; ++i) {
      const double x = -5.0 + 0.1 * double(i);
      expect(eval_polynomial(p, {x}) == eval_polynomial(q, {x}),
             "values agree at x = " + format_double(x));
    }
  }});

  fx.push_back({"sets containing a fixed point form a principal ultrafilter with a zero-one measure", [] {
    std::vector<std::uint64_t> masks;
    for (std::uint64_t m = 0; m < 8; ++m)
      if (m & 1) masks.push_back(m);
    SubsetFamily fam = make_family(3, std::move(masks));
    FilterCertificate c = classify(fam);
    expect(c.kind == FamilyKind::Ultrafilter && c.proper, "the family is a proper ultrafilter");
    expect(c.principal_generator.has_value() && *c.principal_generator == subset_from_indices(3, {1}),
           "the generator is the singleton {1}");
    expect(filter_measure(fam, subset_from_indices(3, {1, 3})) == Tri::One,
           "sets containing the point measure one");
    expect(filter_measure(fam, subset_from_indices(3, {2, 3})) == Tri::Zero,
           "sets missing the point measure zero");
    expect(dual(dual(fam)) == fam, "duality is an involution");
  }});

  fx.push_back({"finite ball families generate the improper ideal", [] {
    auto m = random_tree_ultrametric<double>(4, 77);
    BallFamilyReport rep = ball_ideal_base(m);
    expect(!rep.proper, "the base is improper on a finite space");
    expect(rep.base.contains(full_subset(4)), "the whole space is an attained ball");
    SubsetFamily ideal = extend_base(rep.base, BaseKind::Ideal);
    expect(ideal.size() == 16, "the generated ideal is the full power set");
  }});

  fx.push_back({"the euclidean segment has no attained covering ball", [] {
    SegmentFixtureReport rep = euclidean_segment_fixture();
    expect(rep.union_covers_segment, "finitely many balls cover the segment");
    expect(!rep.covering_attained_ball_exists, "no single attained ball covers the union");
    expect(rep.centers_checked.size() == 23, "every candidate center was inspected");
  }});

  fx.push_back({"a diameter that vanishes on the full set cannot define distances", [] {
    SubsetFamily ideal = power_set_family(2);
    std::vector<Rat> vals;
    for (std::uint64_t m : ideal.members) vals.push_back(Rat(2 - std::popcount(m)));
    auto diam = make_diameter(ideal, vals, Monotonicity::Decreasing, /*allow_zero=*/true);
    expect_throws<DegenerateDistance>(
        [&] { ideal_to_ultrametric(ideal, diam, Mode::Max, /*relax_preconditions=*/true); },
        "distinct points at distance zero are refused");
  }});

  fx.push_back({"increasing diameters on the trivial ideal give the min form", [] {
    SubsetFamily ideal = power_set_family(3);
    std::vector<Rat> vals;
    for (std::uint64_t m : ideal.members) vals.push_back(Rat(1 + std::popcount(m)));
    auto diam = make_diameter(ideal, vals, Monotonicity::Increasing);
    auto out = ideal_to_ultrametric(ideal, diam, Mode::Min);
    expect(out.d(0, 1) == Rat(4), "the supremum over supersets reaches the full set");
    expect(verify_ultrametric(out).valid, "the min-form matrix verifies");
    expect_throws<MonotonicityError>([&] { ideal_to_ultrametric(ideal, diam, Mode::Max); },
                                     "the max form rejects an increasing diameter");
  }});

  fx.push_back({"filter cores get infinite distance, tamed to one by x/(1+x)", [] {
    SubsetFamily filt = principal_filter(3, subset_from_indices(3, {1}));
    std::vector<Rat> vals;
    for (std::uint64_t m : filt.members) vals.push_back(Rat(std::popcount(m)));
    auto diam = make_diameter(filt, vals, Monotonicity::Increasing);
    auto out = filter_to_ultrametric(filt, diam);
    expect(out.d(0, 1) == Rat::pos_inf() && out.d(0, 2) == Rat::pos_inf(),
           "pairs through the core sit at infinite distance");
    expect(out.d(1, 2) == Rat(1), "pairs avoiding the core stay finite");
    expect(verify_ultrametric(out).valid, "the matrix verifies with infinities");
    auto g = deinfinitate(out);
    expect(g.d(0, 1) == Rat(1) && g.d(1, 2) == Rat(1, 2), "taming maps inf to 1 and 1 to 1/2");
    expect(verify_ultrametric(g).valid, "the tamed matrix still verifies");
  }});

  fx.push_back({"x/(1+x) halves one, sends infinity to one, and rejects zero", [] {
    expect_throws<NonpositiveInput>([] { deinfinitate(Rat(0)); },
                                    "distances are strictly positive, zero is out of domain");
    expect(deinfinitate(Rat(1)) == Rat(1, 2), "one maps to a half");
    expect(deinfinitate(Rat(3)) == Rat(3, 4), "three maps to three quarters");
    expect(deinfinitate(Rat::pos_inf()) == Rat(1), "infinity maps to one");
    expect(deinfinitate(std::numeric_limits<double>::infinity()) == 1.0, "float infinity maps to one");
    expect(deinfinitate(1.0) == 0.5, "float one maps to a half");
  }});

  fx.push_back({"p-adic norms scale reciprocally on prime powers and vanish only at zero", [] {
    for (long long p : {2LL, 3LL, 5LL, 7LL}) {
      for (long long n = -3; n <= 3; ++n)
        expect(padic_norm(pow(Rat(p), n), p) == pow(Rat(p), -n),
               "norm of p^" + std::to_string(n) + " is p^" + std::to_string(-n));
      expect(padic_norm(Rat(0), p) == Rat(0), "zero has norm zero");
    }
    expect(padic_valuation(Rat(12), 2) == 2, "12 carries two factors of 2");
    expect(padic_norm(Rat(1, 4), 2) == Rat(4), "1/4 has 2-adic norm 4");
  }});

  fx.push_back({"p-adic sample matrices are exact max-form ultrametrics", [] {
    std::vector<Rat> pts{Rat(0), Rat(1), Rat(2), Rat(1, 2), Rat(3, 4), Rat(5)};
    for (long long p : {2LL, 3LL}) {
      auto m = padic_sample_matrix(pts, p);
      VerifyReport<Rat> r = verify_ultrametric(m);
      expect(r.valid && r.checks_agree, "the sampled matrix verifies exactly at p = " + std::to_string(p));
    }
  }});

  fx.push_back({"min-strip and max-strip decompositions are reversals of each other", [] {
    std::vector<Rat> s{Rat(3), Rat(1), Rat(3), Rat(0)};
    auto a = nest(s, NestType::A, Rat(0));
    auto b = nest(s, NestType::B, Rat(0));
    expect(a.levels.size() == 3 && a.levels[0].indices == std::vector<int>{1, 3},
           "the top level collects both maxima");
    auto rev = reverse_nesting(a);
    expect(rev.type == NestType::B && b.levels.size() == rev.levels.size(),
           "reversal flips the type and keeps the level count");
    for (std::size_t l = 0; l < b.levels.size(); ++l)
      expect(b.levels[l].indices == rev.levels[l].indices && b.levels[l].mu == rev.levels[l].mu &&
                 b.levels[l].nu == rev.levels[l].nu,
             "level " + std::to_string(l) + " agrees between the two routes");
  }});

  fx.push_back({"the nested product equals the plain exponential sum", [] {
    std::vector<double> f{3, 1, 3, 0};
    double direct = 0;
    for (double v : f) direct += std::exp(v);
    expect(std::abs(reconstruct(nest(f, NestType::A)) - direct) <= 1e-12 * direct,
           "float reconstruction matches the direct sum");
    std::vector<Rat> rf{Rat(3), Rat(1), Rat(3), Rat(0)};
    expect(reconstruct_exact(nest(rf, NestType::A, Rat(0)), Rat(2)) == Rat(19),
           "base-2 reconstruction gives exactly 19");
  }});

  fx.push_back({"digit series converge as real expansions and cohere as integers", [] {
    expect(padic_series({1, 2, 0, 1}, 3, NestType::A, 3) == Rat(46, 27),
           "the real expansion sums to 46/27");
    Rat b3 = padic_series({1, 2, 0, 1}, 3, NestType::B, 3);
    Rat b2 = padic_series({1, 2, 0, 1}, 3, NestType::B, 2);
    expect(b3 == Rat(34) && b2 == Rat(7), "integer truncations are 34 and 7");
    expect(b3 - b2 == Rat(27), "successive truncations differ by a multiple of 27");
  }});

  fx.push_back({"free energy flattens to bottom minus k log multiplicity", [] {
    std::vector<double> s{0, 0, 1};
    expect(std::abs(free_energy(s, 0.01) + 0.01 * std::log(2.0)) <= 1e-12,
           "at small k only the bottom level contributes");
    expect(std::abs(free_energy_remainder(s, 0.01)) <= 1e-40,
           "the remainder is exponentially small in the gap");
  }});

  fx.push_back({"the probe recovers bottom value, multiplicity, and flat higher orders", [] {
    TaylorProbeReport rep = taylor_probe(std::vector<double>{0, 0, 1}, 3);
    expect(rep.kappa0 == 0.0 && rep.lambda0 == 2 && rep.gap == 1.0,
           "the spectrum splits as expected");
    expect(rep.orders.size() == 4, "orders 0 through 3 are reported");
    expect(rep.orders[0].deviation <= 1e-9, "order 0 recovers the bottom value");
    expect(std::abs(rep.orders[1].estimate + std::log(2.0)) <= 1e-6,
           "order 1 recovers minus log multiplicity");
    expect(rep.orders[2].deviation <= 1e-6 && rep.orders[3].deviation <= 1e-6,
           "orders 2 and 3 vanish");
  }});

  fx.push_back({"the B-side minimum is the negated dual A-side maximum", [] {
    auto e = make_ensemble(std::vector<MicroSystem<Rat>>{
        {Rat(3), Rat(1), Rat(3)}, {Rat(0), Rat(2), Rat(-1)}, {Rat(5), Rat(0), Rat(2)}});
    DualityReport<Rat> r = duality_identity(e);
    expect(r.equal && r.lhs == r.rhs, "both sides agree exactly");
    expect(r.lhs == Rat(-2), "the common value is -2");
    expect(r.argmin == std::vector<int>{2} && r.argmax == std::vector<int>{2},
           "the same system is extremal on both sides");
  }});

  fx.push_back({"energy shifts reorder a two-temperature ensemble; the dual objective never moves", [] {
    auto e = make_ensemble(std::vector<MicroSystem<double>>{{0, 0, 1}, {0, 0, 2}});
    ShiftReport<double> rep = shift_diagnostics(e, {2.0});
    expect(!rep.equilibrium, "the temperatures differ");
    expect(rep.base_argmin == std::vector<int>{1, 2}, "the unshifted objectives tie");
    expect(rep.probes.size() == 1 && rep.probes[0].e_shift_changes_order,
           "the shift 2 breaks the tie");
    expect(rep.probes[0].e_shift_argmin == std::vector<int>{2},
           "the hotter system wins after the shift");
    expect(!rep.probes[0].dual_shift_changes_differences,
           "the dual objective ignores the shift");
    expect(rep.witness.has_value() && rep.witness->a == 1 && rep.witness->b == 2,
           "a flipping pair is exhibited");
  }});

  fx.push_back({"minimizer counting splits probability exactly", [] {
    std::vector<double> s{0, 0, 1};
    expect(usual_probability(s, subset_from_indices(3, {1})) == Rat(1, 2),
           "one of two minimizers gives a half");
    expect(usual_probability(s, subset_from_indices(3, {3})) == Rat(0),
           "a non-minimizer carries nothing");
    expect(usual_probability(s, full_subset(3)) == Rat(1), "the whole space is certain");
    std::vector<double> u{0, 1, 1};
    expect(usual_probability(u, subset_from_indices(3, {1, 2})) == Rat(1),
           "a unique minimizer makes the measure zero-one");
    expect(usual_probability(u, subset_from_indices(3, {2, 3})) == Rat(0),
           "sets missing the minimizer measure zero");
  }});

  fx.push_back({"tropical weights pin the top level at zero", [] {
    auto w = tropical_weights(std::vector<Rat>{Rat(0), Rat(0), Rat(1)}, Rat(0));
    expect(w.m0 == std::vector<int>{1, 2}, "two states minimize");
    expect(w.W == (std::vector<Rat>{Rat(0), Rat(0), Rat(-1)}) && w.w == w.W,
           "at k_B = 0 the minimizers carry weight zero");
    auto wf = tropical_weights(std::vector<double>{0, 0, 1}, 0.01);
    expect(wf.W[0] == wf.W[1] && std::abs(wf.W[0] + 0.01 * std::log(2.0)) <= 1e-15,
           "positive k_B charges the degeneracy");
    expect_throws<Unsupported>(
        [] { tropical_weights(std::vector<Rat>{Rat(0), Rat(0), Rat(1)}, Rat(1)); },
        "exact weights refuse an irrational degeneracy penalty");
  }});

  fx.push_back({"duplicating a ground state moves its weight from 1/n to 2/(n+1)", [] {
    CopyEffect ce = copy_effect(std::vector<double>{0, 0, 1}, 1);
    expect(ce.before == Rat(1, 2) && ce.after == Rat(2, 3), "1/2 becomes 2/3");
    expect_throws<NotAMinimizer>([] { copy_effect(std::vector<double>{0, 0, 1}, 3); },
                                 "only minimizers can be duplicated");
  }});

  fx.push_back({"copy pressure drives the dequantified weight to the indicator", [] {
    expect(std::abs(gibbs_with_copies({0.0, 0.0, 1.0}, 1, 100) - 100.0 / 101.0) <= 1e-12,
           "one hundred copies give 100/101");
    expect(std::abs(gibbs_with_copies({0.0, 0.0}, 1, 2) - 2.0 / 3.0) <= 1e-15,
           "two copies of a twofold tie give 2/3");
    DequantifyReport rep = dequantified_weight({0.0, 0.0, 1.0}, 1, pow2_schedule(10));
    expect(rep.dominant && rep.limit == 1.0, "a minimizer heads for weight one");
    expect(rep.table.back().gap <= 1e-3, "a thousand copies close the gap to 1e-3");
    DequantifyReport out = dequantified_weight({0.0, 0.0, 1.0}, 3, pow2_schedule(10));
    expect(!out.dominant && out.limit == 0.0 && out.converged, "a non-minimizer converges to zero");
    expect(out.table.back().gap <= 1e-30, "its gap decays exponentially");
  }});

  fx.push_back({"possibility stays additive where probability fails", [] {
    std::vector<double> f{0, 0, 1};
    std::vector<Subset> parts{subset_from_indices(3, {1}), subset_from_indices(3, {2})};
    PossibilityReport r = possibility_check(f, parts);
    expect(r.w0 == std::vector<int>{1, 1} && r.union_w0 == 1, "both parts are possible");
    expect(r.tropical_additive && !r.real_additive,
           "the max rule holds where the sum rule breaks");
    std::vector<double> u{0, 1, 2};
    PossibilityReport r2 = possibility_check(u, parts);
    expect(r2.tropical_additive && r2.real_additive,
           "a unique minimizer restores both additivity laws");
  }});

  fx.push_back({"a dominant state's negative patterns saturate the counting bound", [] {
    std::vector<std::vector<double>> grid{{std::log(9.0), 0.0, 0.0}, {0.0, 0.0, 0.0}};
    AmoebaModel m = make_amoeba_model(3, 1, grid);
    expect(std::abs(amoeba_weight(m, subset_from_indices(3, {1}), 0) + 7.0) <= 1e-12,
           "the dominant singleton weighs -9 + 2");
    SubsetFamily neg = negative_family(m, 0);
    expect(neg.members == std::vector<std::uint64_t>{0b001}, "only the dominant singleton is negative");
    ScanResult sr = instability_scan(m);
    expect(sr.trace_failures.empty(), "every flagged point traces through its maximizer");
    expect(sr.rows[0].flagged && sr.rows[0].alpha == 1 && sr.rows[0].trace_ok,
           "the dominant point is flagged with the right trace");
    expect(sr.rows[1].family_size == 0 && !sr.rows[1].flagged && !sr.rows[1].alpha.has_value(),
           "the flat point has no negative patterns");
  }});

  return fx;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<Fixture> fixtures = reference_fixtures();
  int failed = 0;
  for (const Fixture& f : fixtures) {
    try {
      f.run();
      out << "ok   " << f.name << "\n";
    } catch (const std::exception& e) {
      ++failed;
      out << "FAIL " << f.name << " (" << e.what() << ")\n";
    }
  }
  out << std::to_string(fixtures.size() - std::size_t(failed)) << "/"
      << std::to_string(fixtures.size()) << " reference fixtures passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace tropica
