#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "roughfrac/rng.hpp"

namespace roughfrac {

// Block norm on (R^n)^m: sum of the Euclidean norms of the m blocks.
double block_norm(std::span<const double> ybar, int m, int n);

// Lebesgue volume of the unit block ball {block_norm < 1} in R^{m n}.
// Closed form: (2 pi^{n/2} / Gamma(n/2))^m * Gamma(n)^m / Gamma(m n + 1).
double block_ball_volume(int m, int n);

// Draws a direction on the block unit sphere {block_norm == 1} distributed
// by the cone measure, i.e. the pushforward of the uniform law on the block
// ball under x -> x/block_norm(x). Writes m*n coordinates into out.
void sample_block_direction(Rng& rng, int m, int n, std::span<double> out);

/// Deterministic direction rule on the block sphere: tensor of stick-broken
/// simplex midpoints (block radii t_i) with per-factor sphere grids
/// (S^0 = {+-1}, S^1 = equispaced angles). Weights carry the cone-measure
/// density and are normalized to sum 1. Factor dimensions n >= 3 have no
/// tensor rule here; callers fall back to Monte Carlo.
struct DirectionSet {
  int m = 1;
  int n = 1;
  std::vector<double> points;   // node count x (m*n), row-major
  std::vector<double> weights;  // sums to 1
  std::size_t count() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(m) * n,
            static_cast<std::size_t>(m) * n};
  }
};

DirectionSet make_direction_set(int m, int n, int simplex_nodes, int sphere_nodes);

}  // namespace roughfrac
