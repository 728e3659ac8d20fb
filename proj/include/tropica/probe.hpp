#ifndef TROPICA_PROBE_HPP
#define TROPICA_PROBE_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tropica/nesting.hpp"

namespace tropica {

// Numerically extracted small-k expansion of F(k) = -k ln sum e^{-f_a/k}.
// The expansion is F(k) = kappa_0 - k ln lambda_0 + O(k e^{-gap/k}): the
// constant term is the bottom of the spectrum, the linear term counts its
// multiplicity, and every higher Taylor order at k = 0+ vanishes.
struct ProbeOrderResult {
  int order = 0;
  double estimate = 0;  // plateau value of the stencil sequence
  double target = 0;    // kappa_0, -ln lambda_0, then zeros
  double deviation = 0; // |estimate - target|
  double residual = 0;  // successive-difference width at the plateau
};

struct TaylorProbeReport {
  double kappa0 = 0;
  long long lambda0 = 0;
  double gap = 0;
  std::vector<ProbeOrderResult> orders;
};

inline std::vector<double> default_probe_grid() {
  std::vector<double> g;
  double k = 1e-1;
  for (int i = 0; i < 9; ++i) {
    g.push_back(k);
    k /= 2;
  }
  return g;
}

namespace detail {

// Plateau of a stencil sequence taken along a decreasing k grid: the pair
// with the smallest successive gap. The sequence first converges (truncation
// decays) and later drifts (roundoff grows), so the tightest gap marks the
// usable estimate. A sequence whose gaps only ever grow never entered the
// asymptotic regime.
inline std::pair<double, double> plateau_pick(const std::vector<double>& est) {
  if (est.size() < 2) throw GridTooCoarse("grid gives too few estimates to detect a plateau");
  std::vector<double> gaps;
  gaps.reserve(est.size() - 1);
  for (std::size_t i = 0; i + 1 < est.size(); ++i) gaps.push_back(std::abs(est[i + 1] - est[i]));
  std::size_t best = 0;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i] < gaps[best]) best = i;
  if (best == 0 && gaps.size() >= 2 && gaps.front() > 1e-13) {
    bool growing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i)
      if (!(gaps[i] > gaps[i - 1])) growing = false;
    if (growing) throw GridTooCoarse("stencil sequence never contracts on this grid");
  }
  return {est[best + 1], gaps[best]};
}

}  // namespace detail

// Richardson-extrapolated finite-difference probe of F at k = 0+. Orders 0
// and 1 difference F itself; orders >= 2 difference the affine-shifted
// remainder, which has the same derivatives there but evaluates without
// cancellation, keeping the stencil noise floor far below the targets.
inline TaylorProbeReport taylor_probe(const std::vector<double>& s, int m_max,
                                      const std::vector<double>& k_grid = default_probe_grid()) {
  if (m_max < 2) throw DomainMismatch("probe needs m_max >= 2");
  if (m_max > 4) throw TooLarge("probe stencils stop at order 4");
  if (k_grid.empty()) throw GridTooCoarse("probe needs a nonempty k grid");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0) || !std::isfinite(k_grid[i]))
      throw DomainMismatch("k grid values must be positive and finite");
    if (i > 0 && !(k_grid[i] < k_grid[i - 1]))
      throw DomainMismatch("k grid must decrease strictly");
  }
  const MinSplit split = min_split(s);

  auto F = [&](double k) { return free_energy(s, k); };
  auto G = [&](double k) { return free_energy_remainder(s, k); };

  TaylorProbeReport rep;
  rep.kappa0 = split.kappa0;
  rep.lambda0 = split.lambda0;
  rep.gap = split.gap;

  // Order 0: linear extrapolation to k = 0 from consecutive grid pairs kills
  // the -k ln lambda_0 term exactly, leaving the exponentially small rest.
  {
    std::vector<double> est;
    for (std::size_t i = 0; i + 1 < k_grid.size(); ++i) {
      const double ka = k_grid[i], kb = k_grid[i + 1];
      est.push_back((ka * F(kb) - kb * F(ka)) / (ka - kb));
    }
    auto [value, res] = detail::plateau_pick(est);
    rep.orders.push_back({0, value, split.kappa0, std::abs(value - split.kappa0), res});
  }

  // Order 1: five-point first-derivative stencil (error h^4) at each grid
  // point with h = k/4, extrapolated twice in h.
  {
    auto stencil = [&](double k, double h) {
      return (F(k - 2 * h) - 8 * F(k - h) + 8 * F(k + h) - F(k + 2 * h)) / (12 * h);
    };
    std::vector<double> est;
    for (double k : k_grid) {
      const double h = k / 4;
      const double d0 = stencil(k, h);
      const double d1 = stencil(k, h / 2);
      const double d2 = stencil(k, h / 4);
      const double r1 = (16 * d1 - d0) / 15;
      const double r2 = (16 * d2 - d1) / 15;
      est.push_back((64 * r2 - r1) / 63);
    }
    auto [value, res] = detail::plateau_pick(est);
    const double target = -std::log(double(split.lambda0));
    rep.orders.push_back({1, value, target, std::abs(value - target), res});
  }

  // Orders 2..m_max: central stencils (error h^2) on the remainder with
  // h = k/8, extrapolated twice in h. Targets are all zero.
  for (int m = 2; m <= m_max; ++m) {
    auto stencil = [&](double k, double h) {
      switch (m) {
        case 2:
          return (G(k - h) - 2 * G(k) + G(k + h)) / (h * h);
        case 3:
          return (-G(k - 2 * h) + 2 * G(k - h) - 2 * G(k + h) + G(k + 2 * h)) / (2 * h * h * h);
        default:
          return (G(k - 2 * h) - 4 * G(k - h) + 6 * G(k) - 4 * G(k + h) + G(k + 2 * h)) /
                 (h * h * h * h);
      }
    };
    std::vector<double> est;
    for (double k : k_grid) {
      const double h = k / 8;
      const double d0 = stencil(k, h);
      const double d1 = stencil(k, h / 2);
      const double d2 = stencil(k, h / 4);
      const double r1 = (4 * d1 - d0) / 3;
      const double r2 = (4 * d2 - d1) / 3;
      est.push_back((16 * r2 - r1) / 15);
    }
    auto [value, res] = detail::plateau_pick(est);
    rep.orders.push_back({m, value, 0.0, std::abs(value), res});
  }
  return rep;
}

}  // namespace tropica

#endif
