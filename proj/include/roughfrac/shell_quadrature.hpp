#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "roughfrac/block_geometry.hpp"
#include "roughfrac/errors.hpp"
#include "roughfrac/rng.hpp"

namespace roughfrac {

enum class ShellRule { midpoint_tensor, monte_carlo };

/// Dyadic shell layout around the block-norm origin. Signed index j covers
/// [2^j * delta, 2^{j+1} * delta): negative j walks into the singularity,
/// nonnegative j walks outward.
struct ShellScheme {
  double delta = 1.0;
  int j_min = -16;
  int j_max = -1;
  int points_per_shell = 64;
  ShellRule rule = ShellRule::midpoint_tensor;
  std::uint64_t seed = 0;
  // Refinement normally extends both ends; callers that already bound the
  // integrand support exactly pin the outer end.
  bool extend_outer = true;
  // Shells entirely below this radius are skipped: the integrand is known to
  // vanish on the block ball of this radius.
  double r_floor = 0.0;
};

inline std::vector<std::pair<double, double>> shell_decomposition(double delta,
                                                                  std::pair<int, int> j_range) {
  if (!(delta > 0.0)) throw DomainError("shell_decomposition: delta > 0");
  if (j_range.first > j_range.second)
    throw DomainError("shell_decomposition: j_min <= j_max");
  std::vector<std::pair<double, double>> shells;
  shells.reserve(static_cast<std::size_t>(j_range.second - j_range.first + 1));
  for (int j = j_range.first; j <= j_range.second; ++j)
    shells.emplace_back(std::ldexp(delta, j), std::ldexp(delta, j + 1));
  return shells;
}

struct IntegrationResult {
  double value = 0.0;
  double err_est = 0.0;
  std::size_t evals = 0;
  bool converged = false;
  bool budget_exceeded = false;
};

struct IntegrationBudget {
  std::size_t max_evals = std::size_t{1} << 24;
};

namespace detail {

// Node budget split for the tensor rule: one radial dimension, m-1 simplex
// dimensions, one angular dimension per factor when n == 2 (n == 1 spheres
// contribute the fixed factor 2^m).
struct TensorCounts {
  int radial = 1;
  int simplex = 1;
  int sphere = 1;
};

inline TensorCounts tensor_counts(int m, int n, int points) {
  TensorCounts tc;
  const double fixed = n == 1 ? std::pow(2.0, m) : 1.0;
  const int dims = 1 + (m - 1) + (n == 2 ? m : 0);
  const double k = std::pow(std::max(1.0, points / fixed), 1.0 / dims);
  tc.radial = std::max(2, static_cast<int>(std::lround(k)));
  tc.simplex = m > 1 ? std::max(2, static_cast<int>(std::lround(k))) : 1;
  tc.sphere = n == 2 ? std::max(4, static_cast<int>(std::lround(k))) : 1;
  return tc;
}

}  // namespace detail

/// Integral of `f` over the block-norm annulus {r_lo <= |ybar| < r_hi}.
/// Radial nodes are placed in the volume coordinate u = r^{mn} (stratified
/// uniformly for Monte Carlo, midpoints for the tensor rule), directions on
/// the block sphere carry the cone measure; the two together reproduce the
/// uniform law on the annulus, so the weight is just the annulus volume.
template <class F>
double annulus_integral(F&& f, int m, int n, double r_lo, double r_hi, int points,
                        ShellRule rule, std::uint64_t seed, std::size_t& evals) {
  if (!(r_hi > r_lo) || !(r_lo >= 0.0)) throw DomainError("annulus_integral: 0 <= r_lo < r_hi");
  const int dim = m * n;
  const double mn = static_cast<double>(m) * n;
  const double u_lo = std::pow(r_lo, mn);
  const double u_hi = std::pow(r_hi, mn);
  const double volume = block_ball_volume(m, n) * (u_hi - u_lo);
  std::vector<double> y(static_cast<std::size_t>(dim));

  if (rule == ShellRule::monte_carlo) {
    Rng rng(seed);
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
      const double u = u_lo + (u_hi - u_lo) * ((i + rng.uniform()) / points);
      const double r = std::pow(u, 1.0 / mn);
      sample_block_direction(rng, m, n, y);
      for (double& c : y) c *= r;
      sum += f(std::span<const double>(y.data(), y.size()));
      ++evals;
    }
    return volume * (sum / points);
  }

  const auto tc = detail::tensor_counts(m, n, points);
  const DirectionSet dirs = make_direction_set(m, n, tc.simplex, tc.sphere);
  double sum = 0.0;
  for (int i = 0; i < tc.radial; ++i) {
    const double u = u_lo + (u_hi - u_lo) * ((i + 0.5) / tc.radial);
    const double r = std::pow(u, 1.0 / mn);
    for (std::size_t d = 0; d < dirs.count(); ++d) {
      const auto dir = dirs.point(d);
      for (int c = 0; c < dim; ++c) y[static_cast<std::size_t>(c)] = r * dir[c];
      sum += dirs.weights[d] * f(std::span<const double>(y.data(), y.size()));
      ++evals;
    }
  }
  return volume * (sum / tc.radial);
}

/// Shell-sum integrator for integrands with a point singularity at the
/// block-norm origin. Sums shell integrals in ascending radius order and
/// refines (doubled points, extended shell range) until the whole sum moves
/// by less than tol relatively, or the evaluation budget runs out (the
/// partial value and its error estimate are still returned, flagged).
template <class F>
IntegrationResult integrate_singular(F&& f, int m, int n, ShellScheme scheme, double tol,
                                     IntegrationBudget budget = {}) {
  if (!(tol > 0.0)) throw DomainError("integrate_singular: tol > 0");
  IntegrationResult res;
  double prev = 0.0;
  bool have_prev = false;
  for (int round = 0;; ++round) {
    double total = 0.0;
    for (int j = scheme.j_min; j <= scheme.j_max; ++j) {
      const double r_lo = std::ldexp(scheme.delta, j);
      const double r_hi = std::ldexp(scheme.delta, j + 1);
      if (r_hi <= scheme.r_floor) continue;
      total += annulus_integral(f, m, n, r_lo, r_hi, scheme.points_per_shell, scheme.rule,
                                mix_seed(scheme.seed, static_cast<std::uint64_t>(round * 4096 + (j - scheme.j_min))),
                                res.evals);
      if (res.evals > budget.max_evals) {
        // Mid-round abort: the last complete pass is the best estimate.
        res.value = have_prev ? prev : total;
        res.err_est = have_prev ? std::fabs(total - prev) : std::fabs(total);
        res.budget_exceeded = true;
        return res;
      }
    }
    if (have_prev) {
      res.err_est = std::fabs(total - prev);
      const double scale = std::max(std::fabs(total), std::fabs(prev));
      if (res.err_est <= tol * scale || (total == 0.0 && prev == 0.0)) {
        res.value = total;
        res.converged = true;
        return res;
      }
    }
    prev = total;
    have_prev = true;
    res.value = total;
    scheme.points_per_shell *= 2;
    scheme.j_min -= 1;
    if (scheme.extend_outer) scheme.j_max += 1;
    if (round >= 40) return res;  // tol unreachable at sane depth; report unconverged
  }
}

}  // namespace roughfrac
