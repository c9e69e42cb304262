#include <cmath>
#include <span>
#include <vector>

#include "doctest.h"
#include "roughfrac/block_geometry.hpp"
#include "roughfrac/errors.hpp"
#include "roughfrac/rng.hpp"
#include "roughfrac/shell_quadrature.hpp"

using namespace roughfrac;

TEST_CASE("block norm sums the Euclidean norms of the factor blocks") {
  const std::vector<double> a = {1.0, -2.0};
  CHECK(block_norm(a, 2, 1) == 3.0);
  const std::vector<double> b = {3.0, -4.0};
  CHECK(block_norm(b, 1, 2) == 5.0);
  const std::vector<double> c = {3.0, 4.0, 0.0, -1.25};
  CHECK(block_norm(c, 2, 2) == doctest::Approx(6.25).epsilon(1e-15));
}

TEST_CASE("block ball volume matches the closed form in low dimensions") {
  CHECK(block_ball_volume(1, 1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(block_ball_volume(2, 1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(block_ball_volume(3, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(block_ball_volume(1, 2) == doctest::Approx(3.14159265358979323846).epsilon(1e-13));
}

TEST_CASE("direction sets sit on the block sphere with weights summing to one") {
  const DirectionSet d21 = make_direction_set(2, 1, 4, 1);
  CHECK(d21.count() == 16);  // 4 simplex midpoints x 2^2 sign choices
  double wsum = 0.0;
  for (std::size_t i = 0; i < d21.count(); ++i) {
    wsum += d21.weights[i];
    CHECK(block_norm(d21.point(i), 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));

  const DirectionSet d12 = make_direction_set(1, 2, 1, 8);
  CHECK(d12.count() == 8);
  for (std::size_t i = 0; i < d12.count(); ++i)
    CHECK(block_norm(d12.point(i), 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random block directions are unit and reproducible") {
  Rng rng(42);
  std::vector<double> y(4);
  sample_block_direction(rng, 2, 2, y);
  CHECK(block_norm(y, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng2(42);
  std::vector<double> y2(4);
  sample_block_direction(rng2, 2, 2, y2);
  for (int i = 0; i < 4; ++i) CHECK(y[i] == y2[i]);
}

TEST_CASE("shell decomposition lays out dyadic annuli") {
  const auto shells = shell_decomposition(0.5, {-2, 1});
  REQUIRE(shells.size() == 4);
  CHECK(shells[0] == std::pair(0.125, 0.25));
  CHECK(shells[1] == std::pair(0.25, 0.5));
  CHECK(shells[2] == std::pair(0.5, 1.0));
  CHECK(shells[3] == std::pair(1.0, 2.0));
  CHECK_THROWS_AS(shell_decomposition(0.0, {0, 1}), DomainError);
  CHECK_THROWS_AS(shell_decomposition(1.0, {2, 1}), DomainError);
}

TEST_CASE("annulus integral of a constant is the exact annulus volume") {
  auto one = [](std::span<const double>) { return 1.0; };
  std::size_t evals = 0;
  // m = n = 1: the annulus {1 <= |y| < 3} has measure 2 * (3 - 1).
  double v = annulus_integral(one, 1, 1, 1.0, 3.0, 64, ShellRule::midpoint_tensor, 0, evals);
  CHECK(v == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(evals == 64);  // 32 radial midpoints x the two-point sphere

  evals = 0;
  v = annulus_integral(one, 1, 1, 1.0, 3.0, 500, ShellRule::monte_carlo, 11, evals);
  CHECK(v == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(evals == 500);

  // m = 2, n = 1: volume coordinate u = r^2, ball volume factor 2.
  evals = 0;
  v = annulus_integral(one, 2, 1, 1.0, 4.0, 256, ShellRule::midpoint_tensor, 0, evals);
  CHECK(v == doctest::Approx(30.0).epsilon(1e-14));
}

TEST_CASE("annulus integral is exact for integrands linear in the volume coordinate") {
  // f = |ybar|^{mn} is linear in u = r^{mn}; radial midpoints integrate it
  // exactly and the direction average is f itself.
  std::size_t evals = 0;
  auto f1 = [](std::span<const double> y) { return std::fabs(y[0]); };
  double v = annulus_integral(f1, 1, 1, 1.0, 2.0, 64, ShellRule::midpoint_tensor, 0, evals);
  CHECK(v == doctest::Approx(3.0).epsilon(1e-13));

  auto f2 = [](std::span<const double> y) {
    const double r = block_norm(y, 2, 1);
    return r * r;
  };
  v = annulus_integral(f2, 2, 1, 1.0, 2.0, 256, ShellRule::midpoint_tensor, 0, evals);
  CHECK(v == doctest::Approx(15.0).epsilon(1e-12));

  v = annulus_integral(f2, 2, 1, 1.0, 2.0, 4096, ShellRule::monte_carlo, 5, evals);
  CHECK(v == doctest::Approx(15.0).epsilon(0.01));
}

TEST_CASE("annulus integral validates its radii") {
  auto one = [](std::span<const double>) { return 1.0; };
  std::size_t evals = 0;
  CHECK_THROWS_AS(
      annulus_integral(one, 1, 1, -0.5, 1.0, 8, ShellRule::midpoint_tensor, 0, evals),
      DomainError);
  CHECK_THROWS_AS(
      annulus_integral(one, 1, 1, 2.0, 1.0, 8, ShellRule::midpoint_tensor, 0, evals),
      DomainError);
}

TEST_CASE("singular integrator recovers an integrable power at the origin") {
  // integral over {|y| < 1} of |y|^{-1/2} dy = 4.
  auto f = [](std::span<const double> y) {
    const double r = std::fabs(y[0]);
    return r < 1.0 ? 1.0 / std::sqrt(r) : 0.0;
  };
  ShellScheme scheme;
  scheme.extend_outer = false;  // support ends exactly at the outer shell
  const IntegrationResult res = integrate_singular(f, 1, 1, scheme, 1e-4);
  CHECK(res.converged);
  CHECK_FALSE(res.budget_exceeded);
  CHECK(res.value == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("singular integrator handles a two-factor annular window") {
  // integral over {1 <= |ybar| < 4} of |ybar|^{-2} with m = 2, n = 1 equals
  // 2 * log 16 = 8 log 2.
  auto f = [](std::span<const double> y) {
    const double r = block_norm(y, 2, 1);
    return (r >= 1.0 && r < 4.0) ? 1.0 / (r * r) : 0.0;
  };
  ShellScheme scheme;
  scheme.j_min = 0;
  scheme.j_max = 1;
  scheme.extend_outer = false;
  const IntegrationResult res = integrate_singular(f, 2, 1, scheme, 1e-5);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-3));

  // Declaring that the integrand vanishes below radius 2 drops the inner
  // shell and leaves the outer half: 2 * log 4.
  ShellScheme floored = scheme;
  floored.r_floor = 2.0;
  const IntegrationResult half = integrate_singular(f, 2, 1, floored, 1e-5);
  CHECK(half.converged);
  CHECK(half.value == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("singular integrator works under the Monte Carlo rule") {
  auto f = [](std::span<const double> y) {
    const double r = std::fabs(y[0]);
    return r < 1.0 ? 1.0 / std::sqrt(r) : 0.0;
  };
  ShellScheme scheme;
  scheme.rule = ShellRule::monte_carlo;
  scheme.points_per_shell = 512;
  scheme.seed = 7;
  scheme.extend_outer = false;
  const IntegrationResult res = integrate_singular(f, 1, 1, scheme, 2e-2);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("singular integrator reports budget exhaustion instead of spinning") {
  auto f = [](std::span<const double> y) {
    const double r = std::fabs(y[0]);
    return r < 1.0 ? 1.0 / std::sqrt(r) : 0.0;
  };
  ShellScheme scheme;
  scheme.extend_outer = false;
  IntegrationBudget budget;
  budget.max_evals = 100;
  const IntegrationResult res = integrate_singular(f, 1, 1, scheme, 1e-6, budget);
  CHECK(res.budget_exceeded);
  CHECK_FALSE(res.converged);
  CHECK(res.evals <= 200);  // stops right after the shell that crossed the cap
}

TEST_CASE("singular integrator rejects a nonpositive tolerance") {
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK_THROWS_AS(integrate_singular(one, 1, 1, ShellScheme{}, 0.0), DomainError);
}
