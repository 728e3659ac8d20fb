#ifndef TROPICA_THERMO_HPP
#define TROPICA_THERMO_HPP

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropica/rational.hpp"
#include "tropica/scalar.hpp"
#include "tropica/subset.hpp"
#include "tropica/tropical.hpp"

namespace tropica {

// Non-equilibrium micro/macro model: each microsystem carries its own local
// temperature, and the macroscopic tropical free energy minimizes F_a / T_a.
// Temperatures may be negative; only T = 0 is rejected.

template <class S>
struct MicroSystem {
  S energy = ScalarOps<S>::from_int(0);
  S entropy = ScalarOps<S>::from_int(0);
  S temperature = ScalarOps<S>::from_int(1);
};

template <class S>
struct Ensemble {
  std::vector<MicroSystem<S>> systems;
  std::vector<std::string> labels;
};

template <class S>
void validate_ensemble(const Ensemble<S>& e) {
  if (e.systems.empty()) throw EmptySpectrum("ensemble needs at least one system");
  if (e.labels.size() != e.systems.size())
    throw SizeMismatch("ensemble has " + std::to_string(e.labels.size()) + " labels for " +
                       std::to_string(e.systems.size()) + " systems");
  for (const MicroSystem<S>& m : e.systems) {
    if (!ScalarOps<S>::is_finite(m.energy) || !ScalarOps<S>::is_finite(m.entropy) ||
        !ScalarOps<S>::is_finite(m.temperature))
      throw DomainMismatch("microsystem fields must be finite");
    if (m.temperature == ScalarOps<S>::from_int(0))
      throw ZeroTemperature("microsystem temperature must be nonzero");
  }
}

template <class S>
Ensemble<S> make_ensemble(std::vector<MicroSystem<S>> systems,
                          std::vector<std::string> labels = {}) {
  Ensemble<S> e{std::move(systems), std::move(labels)};
  if (e.labels.empty()) e.labels = detail::default_labels(int(e.systems.size()));
  validate_ensemble(e);
  return e;
}

template <class S>
S micro_free_energy(const MicroSystem<S>& m) {
  return m.energy - m.temperature * m.entropy;
}

// The tropicalization embedding: each system contributes F_a / T_a as an
// element of the min-carrier. Folding these with the min monoid is the whole
// content of the beta map; no other computation is attached to it.
template <class S>
std::vector<S> tropical_objectives(const Ensemble<S>& e) {
  validate_ensemble(e);
  std::vector<S> out;
  out.reserve(e.systems.size());
  for (const MicroSystem<S>& m : e.systems) out.push_back(micro_free_energy(m) / m.temperature);
  return out;
}

namespace detail {

template <class S>
std::vector<int> tie_set(const std::vector<S>& v, const S& leader, const S& tie_tol) {
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(tie_tol < ScalarOps<S>::abs(v[i] - leader))) out.push_back(int(i) + 1);
  return out;
}

template <class S>
std::vector<int> tie_set_min(const std::vector<S>& v, const S& tie_tol) {
  S lead = v.front();
  for (const S& x : v) lead = tropica::min(lead, x);
  return tie_set(v, lead, tie_tol);
}

// Pairwise comparison signature: one sign per ordered pair a < b, with ties
// flattened under the tolerance. Two value vectors induce the same order iff
// their signatures agree.
template <class S>
std::vector<int> pair_signs(const std::vector<S>& v, const S& tie_tol) {
  std::vector<int> sig;
  sig.reserve(v.size() * (v.size() - 1) / 2);
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      const S d = v[a] - v[b];
      if (!(tie_tol < ScalarOps<S>::abs(d)))
        sig.push_back(0);
      else
        sig.push_back(d < ScalarOps<S>::from_int(0) ? -1 : 1);
    }
  return sig;
}

}  // namespace detail

template <class S>
struct TropicalValueB {
  S value = ScalarOps<S>::from_int(0);
  std::vector<int> argmin;  // 1-based tie set
};

template <class S>
TropicalValueB<S> tropical_free_energy_B(const Ensemble<S>& e, const S& tie_tol) {
  const std::vector<S> obj = tropical_objectives(e);
  TropicalValueB<S> out;
  out.value = obj.front();
  for (const S& x : obj) out.value = tropica::min(out.value, x);
  out.argmin = detail::tie_set(obj, out.value, tie_tol);
  return out;
}

template <class S>
TropicalValueB<S> tropical_free_energy_B(const Ensemble<S>& e) {
  return tropical_free_energy_B(e, ScalarOps<S>::default_tie_tol());
}

// Projective-like duality: swap energy with entropy and invert temperature.
// Involutive by construction.
template <class S>
Ensemble<S> ab_dual(const Ensemble<S>& e) {
  validate_ensemble(e);
  Ensemble<S> out;
  out.labels = e.labels;
  out.systems.reserve(e.systems.size());
  for (const MicroSystem<S>& m : e.systems)
    out.systems.push_back({m.entropy, m.energy, ScalarOps<S>::from_int(1) / m.temperature});
  return out;
}

// Both sides of the tropical inversion identity: the B-side minimum of
// F_a / T_a against the negated A-side maximum of dual(E) - dual(S) dual(T).
template <class S>
struct DualityReport {
  S lhs = ScalarOps<S>::from_int(0);
  S rhs = ScalarOps<S>::from_int(0);
  std::vector<int> argmin;  // tie set of the B-side objective
  std::vector<int> argmax;  // tie set of the dual A-side objective
  S deviation = ScalarOps<S>::from_int(0);
  bool equal = false;
};

template <class S>
DualityReport<S> duality_identity(const Ensemble<S>& e, const S& tie_tol) {
  DualityReport<S> rep;
  const std::vector<S> obj = tropical_objectives(e);
  rep.lhs = obj.front();
  for (const S& x : obj) rep.lhs = tropica::min(rep.lhs, x);
  rep.argmin = detail::tie_set(obj, rep.lhs, tie_tol);

  const Ensemble<S> dual = ab_dual(e);
  std::vector<S> dual_obj;
  dual_obj.reserve(dual.systems.size());
  for (const MicroSystem<S>& m : dual.systems)
    dual_obj.push_back(m.energy - m.entropy * m.temperature);
  S top = dual_obj.front();
  for (const S& x : dual_obj) top = tropica::max(top, x);
  rep.argmax = detail::tie_set(dual_obj, top, tie_tol);
  rep.rhs = ScalarOps<S>::from_int(0) - top;

  rep.deviation = ScalarOps<S>::abs(rep.lhs - rep.rhs);
  if constexpr (ScalarOps<S>::exact) {
    rep.equal = rep.deviation == ScalarOps<S>::from_int(0);
  } else {
    const S scale = tropica::max(ScalarOps<S>::from_int(1),
                                 tropica::max(ScalarOps<S>::abs(rep.lhs), ScalarOps<S>::abs(rep.rhs)));
    rep.equal = rep.deviation <= 1e-12 * scale;
  }
  return rep;
}

template <class S>
DualityReport<S> duality_identity(const Ensemble<S>& e) {
  return duality_identity(e, ScalarOps<S>::default_tie_tol());
}

// Free-energy shifts (common additive constant on every F_a) versus energy
// shifts (common additive constant on every E_a). The first preserves the
// minimizer set whenever the temperature is shared; the second in general
// reorders a non-equilibrium ensemble, and a witness shift is searched on a
// grid. The dual A-side objective is checked to be shift-insensitive.
template <class S>
struct ShiftProbe {
  S shift = ScalarOps<S>::from_int(0);
  std::vector<int> f_shift_argmin;
  bool f_shift_preserves_argmin = false;
  std::vector<int> e_shift_argmin;
  bool e_shift_changes_order = false;
  bool dual_shift_changes_differences = false;
};

template <class S>
struct ShiftWitness {
  S shift = ScalarOps<S>::from_int(0);
  int a = 0, b = 0;  // 1-based pair whose comparison flips
};

template <class S>
struct ShiftReport {
  bool equilibrium = false;  // all local temperatures equal
  std::vector<int> base_argmin;
  std::vector<ShiftProbe<S>> probes;
  std::optional<ShiftWitness<S>> witness;
};

template <class S>
std::vector<S> default_shift_grid() {
  std::vector<S> g;
  g.reserve(101);
  for (int i = -50; i <= 50; ++i)
    g.push_back(ScalarOps<S>::from_int(i) / ScalarOps<S>::from_int(5));
  return g;
}

template <class S>
ShiftReport<S> shift_diagnostics(const Ensemble<S>& e, const std::vector<S>& shifts,
                                 const S& tie_tol,
                                 const std::vector<S>& grid = default_shift_grid<S>()) {
  validate_ensemble(e);
  const S zero = ScalarOps<S>::from_int(0);

  auto e_shift_obj = [&](const S& shift) {
    std::vector<S> out;
    out.reserve(e.systems.size());
    for (const MicroSystem<S>& m : e.systems)
      out.push_back((m.energy + shift - m.temperature * m.entropy) / m.temperature);
    return out;
  };
  auto f_shift_obj = [&](const S& shift) {
    std::vector<S> out;
    out.reserve(e.systems.size());
    for (const MicroSystem<S>& m : e.systems)
      out.push_back((micro_free_energy(m) + shift) / m.temperature);
    return out;
  };
  const Ensemble<S> dual = ab_dual(e);
  auto dual_obj = [&](const S& shift) {
    std::vector<S> out;
    out.reserve(dual.systems.size());
    for (const MicroSystem<S>& m : dual.systems)
      out.push_back(m.energy + shift - m.entropy * m.temperature);
    return out;
  };

  ShiftReport<S> rep;
  rep.equilibrium = true;
  for (const MicroSystem<S>& m : e.systems)
    if (!(m.temperature == e.systems.front().temperature)) rep.equilibrium = false;

  const std::vector<S> base = e_shift_obj(zero);
  rep.base_argmin = detail::tie_set_min(base, tie_tol);
  const std::vector<int> base_sig = detail::pair_signs(base, tie_tol);
  const std::vector<int> dual_base_sig = detail::pair_signs(dual_obj(zero), tie_tol);

  for (const S& shift : shifts) {
    ShiftProbe<S> probe;
    probe.shift = shift;
    probe.f_shift_argmin = detail::tie_set_min(f_shift_obj(shift), tie_tol);
    probe.f_shift_preserves_argmin = probe.f_shift_argmin == rep.base_argmin;
    const std::vector<S> shifted = e_shift_obj(shift);
    probe.e_shift_argmin = detail::tie_set_min(shifted, tie_tol);
    probe.e_shift_changes_order = detail::pair_signs(shifted, tie_tol) != base_sig;
    probe.dual_shift_changes_differences = detail::pair_signs(dual_obj(shift), tie_tol) != dual_base_sig;
    rep.probes.push_back(std::move(probe));
  }

  if (!rep.equilibrium) {
    for (const S& shift : grid) {
      if (shift == zero) continue;
      const std::vector<int> sig = detail::pair_signs(e_shift_obj(shift), tie_tol);
      if (sig == base_sig) continue;
      std::size_t at = 0;
      ShiftWitness<S> w;
      w.shift = shift;
      for (std::size_t a = 0; a < e.systems.size() && w.a == 0; ++a)
        for (std::size_t b = a + 1; b < e.systems.size(); ++b, ++at)
          if (sig[at] != base_sig[at]) {
            w.a = int(a) + 1;
            w.b = int(b) + 1;
            break;
          }
      rep.witness = w;
      break;
    }
  }
  return rep;
}

// Exact counting measure on the minimizer set: #(X meets m_0) / #m_0.
template <class S>
Rat usual_probability(const std::vector<S>& spectrum, const Subset& X, const S& tie_tol) {
  if (spectrum.empty()) throw EmptySpectrum("spectrum needs at least one value");
  for (const S& v : spectrum)
    if (!ScalarOps<S>::is_finite(v)) throw DomainMismatch("spectrum values must be finite");
  if (X.n != int(spectrum.size()))
    throw DomainMismatch("subset lives on a different index set than the spectrum");
  const std::vector<int> m0 = detail::tie_set_min(spectrum, tie_tol);
  long long hits = 0;
  for (int i : m0)
    if (X.contains(i)) ++hits;
  return Rat(int128(hits), int128(m0.size()));
}

template <class S>
Rat usual_probability(const std::vector<S>& spectrum, const Subset& X) {
  return usual_probability(spectrum, X, ScalarOps<S>::default_tie_tol());
}

template <class S>
struct TropicalWeights {
  std::vector<S> w;  // per-state weights
  std::vector<S> W;  // per-level weights, W = w + entropy
  S k_B = ScalarOps<S>::from_int(0);
  std::vector<int> m0;  // 1-based minimizer set
};

namespace detail {

template <class S>
S degeneracy_penalty(const S& k_B, long long lam0) {
  if constexpr (ScalarOps<S>::exact) {
    if (lam0 == 1 || k_B == ScalarOps<S>::from_int(0)) return ScalarOps<S>::from_int(0);
    throw Unsupported("exact weights need k_B = 0 or a unique minimizer: ln " +
                      std::to_string(lam0) + " is irrational");
  } else {
    return k_B * std::log(double(lam0));
  }
}

template <class S>
TropicalWeights<S> weights_core(const std::vector<S>& free_energies, const std::vector<S>& entropies,
                                const S& temperature, const S& k_B, const S& tie_tol) {
  if (k_B < ScalarOps<S>::from_int(0)) throw NegativeInput("k_B must be nonnegative");
  if (!(ScalarOps<S>::from_int(0) < temperature))
    throw NonpositiveTemperature("weights need a positive evaluation temperature");
  S f_tr = free_energies.front();
  for (const S& f : free_energies) f_tr = tropica::min(f_tr, f);
  TropicalWeights<S> out;
  out.k_B = k_B;
  out.m0 = tie_set(free_energies, f_tr, tie_tol);
  const S penalty = degeneracy_penalty<S>(k_B, (long long)out.m0.size());
  for (std::size_t i = 0; i < free_energies.size(); ++i) {
    const S level = (f_tr - free_energies[i]) / temperature - penalty;
    out.W.push_back(level);
    out.w.push_back(level - entropies[i]);
  }
  return out;
}

}  // namespace detail

// Weight formula at a common positive temperature:
// w_a = -S_a + (F_tr - F_a)/T - k_B ln #m_0 and W_a = w_a + S_a.
template <class S>
TropicalWeights<S> tropical_weights(const Ensemble<S>& e, const S& k_B, const S& tie_tol) {
  validate_ensemble(e);
  const S t = e.systems.front().temperature;
  for (const MicroSystem<S>& m : e.systems)
    if (!(m.temperature == t)) throw DomainMismatch("weights need a common temperature");
  std::vector<S> f, ent;
  for (const MicroSystem<S>& m : e.systems) {
    f.push_back(micro_free_energy(m));
    ent.push_back(m.entropy);
  }
  return detail::weights_core(f, ent, t, k_B, tie_tol);
}

template <class S>
TropicalWeights<S> tropical_weights(const Ensemble<S>& e, const S& k_B) {
  return tropical_weights(e, k_B, ScalarOps<S>::default_tie_tol());
}

// Spectrum overload: values are already F_a / T at a common positive T, so
// entropies drop out and w = W.
template <class S>
TropicalWeights<S> tropical_weights(const std::vector<S>& spectrum, const S& k_B, const S& tie_tol) {
  if (spectrum.empty()) throw EmptySpectrum("spectrum needs at least one value");
  for (const S& v : spectrum)
    if (!ScalarOps<S>::is_finite(v)) throw DomainMismatch("spectrum values must be finite");
  const std::vector<S> zeros(spectrum.size(), ScalarOps<S>::from_int(0));
  return detail::weights_core(spectrum, zeros, ScalarOps<S>::from_int(1), k_B, tie_tol);
}

template <class S>
TropicalWeights<S> tropical_weights(const std::vector<S>& spectrum, const S& k_B) {
  return tropical_weights(spectrum, k_B, ScalarOps<S>::default_tie_tol());
}

struct CopyEffect {
  Rat before;  // 1 / lambda_0
  Rat after;   // 2 / (lambda_0 + 1), the weight once the state is duplicated
};

template <class S>
CopyEffect copy_effect(const std::vector<S>& spectrum, int alpha0, const S& tie_tol) {
  if (spectrum.empty()) throw EmptySpectrum("spectrum needs at least one value");
  if (alpha0 < 1 || alpha0 > int(spectrum.size()))
    throw DomainMismatch("state index " + std::to_string(alpha0) + " outside the spectrum");
  const std::vector<int> m0 = detail::tie_set_min(spectrum, tie_tol);
  bool member = false;
  for (int i : m0) member = member || i == alpha0;
  if (!member) throw NotAMinimizer("state " + std::to_string(alpha0) + " is not a minimizer");
  const long long lam0 = (long long)m0.size();
  return {Rat(int128(1), int128(lam0)), Rat(int128(2), int128(lam0 + 1))};
}

template <class S>
CopyEffect copy_effect(const std::vector<S>& spectrum, int alpha0) {
  return copy_effect(spectrum, alpha0, ScalarOps<S>::default_tie_tol());
}

template <class S>
ShiftReport<S> shift_diagnostics(const Ensemble<S>& e, const std::vector<S>& shifts) {
  return shift_diagnostics(e, shifts, ScalarOps<S>::default_tie_tol());
}

}  // namespace tropica

#endif
