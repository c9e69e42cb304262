#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "roughfrac/errors.hpp"
#include "roughfrac/kernel.hpp"

using namespace roughfrac;

namespace {

std::vector<double> pt(std::initializer_list<double> xs) { return std::vector<double>(xs); }

}  // namespace

TEST_CASE("constant kernel returns its value everywhere") {
  const KernelSpec k = KernelSpec::constant(2, 1, 3.5);
  CHECK(k.eval(pt({1.0, 2.0})) == 3.5);
  CHECK(k.eval(pt({-0.1, 0.0})) == 3.5);
  CHECK(k.is_constant());
  CHECK(k.constant_value() == 3.5);
  CHECK(k.ambient_dim() == 2);
}

TEST_CASE("first-coordinate power kernel is homogeneous of degree zero") {
  const KernelSpec k = KernelSpec::first_coord_power(2, 1, 0.25);
  const std::vector<double> y = {0.3, -1.1};
  const std::vector<double> y2 = {0.6, -2.2};
  // Doubling every coordinate leaves |y_1|/|y| bit-identical.
  CHECK(k.eval(y) == k.eval(y2));
  const std::vector<double> y3 = {0.3 * 3.7, -1.1 * 3.7};
  CHECK(k.eval(y3) == doctest::Approx(k.eval(y)).epsilon(1e-14));
  CHECK(k.eval(y) > 1.0);  // |y_1| < |y| so the negative power exceeds one
}

TEST_CASE("power kernel value matches the closed form on a known direction") {
  const KernelSpec k = KernelSpec::first_coord_power(2, 1, 0.5);
  // Direction (3,4)/5: |theta_1| = 3/5.
  CHECK(k.eval(pt({3.0, 4.0})) == doctest::Approx(std::pow(0.6, -0.5)).epsilon(1e-14));
  // gamma = 0 degenerates to the constant 1 away from the singular set.
  const KernelSpec flat = KernelSpec::first_coord_power(2, 1, 0.0);
  CHECK(flat.eval(pt({0.0, 1.0})) == 1.0);
}

TEST_CASE("power kernel blows up on the singular set and rejects the origin") {
  const KernelSpec k = KernelSpec::first_coord_power(2, 1, 0.25);
  CHECK(std::isinf(k.eval(pt({0.0, 1.0}))));
  CHECK_THROWS_AS((void)k.eval(pt({0.0, 0.0})), DomainError);
  CHECK_THROWS_AS((void)k.eval(pt({1.0})), DomainError);  // dimension mismatch
}

TEST_CASE("sign-pattern kernel returns the sign of the chosen coordinate") {
  const KernelSpec k = KernelSpec::sign_pattern(2, 1, 1);
  CHECK(k.eval(pt({5.0, 0.25})) == 1.0);
  CHECK(k.eval(pt({5.0, -0.25})) == -1.0);
  CHECK(k.eval(pt({5.0, 0.0})) == 0.0);
  CHECK_THROWS_AS(KernelSpec::sign_pattern(2, 1, 2), ConfigError);
  CHECK_THROWS_AS(KernelSpec::sign_pattern(2, 1, -1), ConfigError);
}

TEST_CASE("tabulated kernel does nearest-direction lookup") {
  std::vector<KernelSpec::SphereSample> samples;
  samples.push_back({{1.0, 0.0}, 5.0});
  samples.push_back({{-1.0, 0.0}, 7.0});
  samples.push_back({{0.6, 0.8}, -2.0});
  const KernelSpec k = KernelSpec::tabulated(2, 1, samples);
  CHECK(k.eval(pt({10.0, 0.5})) == 5.0);
  CHECK(k.eval(pt({-3.0, 0.1})) == 7.0);
  CHECK(k.eval(pt({0.61, 0.81})) == -2.0);

  CHECK_THROWS_AS(KernelSpec::tabulated(2, 1, {}), ConfigError);
  std::vector<KernelSpec::SphereSample> bad = {{{0.5, 0.5}, 1.0}};  // not unit
  CHECK_THROWS_AS(KernelSpec::tabulated(2, 1, bad), ConfigError);
  std::vector<KernelSpec::SphereSample> wrong_dim = {{{1.0}, 1.0}};
  CHECK_THROWS_AS(KernelSpec::tabulated(2, 1, wrong_dim), ConfigError);
}

TEST_CASE("kernel parse grammar accepts the three builtin forms") {
  CHECK(KernelSpec::parse("constant:2.5", 1, 1).constant_value() == 2.5);
  CHECK(KernelSpec::parse("constant", 1, 1).constant_value() == 1.0);
  CHECK(KernelSpec::parse("power:0.25", 2, 1).kind() == KernelKind::first_coord_power);
  CHECK(KernelSpec::parse("sign:1", 2, 1).kind() == KernelKind::sign_pattern);
  CHECK(KernelSpec::parse("power:0.25", 2, 1).describe() == "power:0.25");

  CHECK_THROWS_AS(KernelSpec::parse("frobnicate:1", 1, 1), ConfigError);
  CHECK_THROWS_AS(KernelSpec::parse("power:abc", 1, 1), ConfigError);
  CHECK_THROWS_AS(KernelSpec::parse("power", 1, 1), ConfigError);
  CHECK_THROWS_AS(KernelSpec::parse("power:-1", 1, 1), ConfigError);
  CHECK_THROWS_AS(KernelSpec::parse("sign:9", 2, 1), ConfigError);
}

TEST_CASE("kernel factories validate dimensions") {
  CHECK_THROWS_AS(KernelSpec::constant(0, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(KernelSpec::constant(1, 0, 1.0), ConfigError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(KernelSpec::constant(1, 1, inf), ConfigError);
  CHECK_THROWS_AS(KernelSpec::first_coord_power(1, 1, inf), ConfigError);
}

TEST_CASE("sphere surface measure matches the classical values") {
  const double pi = 3.14159265358979323846;
  CHECK(sphere_surface(1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(sphere_surface(2) == doctest::Approx(2.0 * pi).epsilon(1e-13));
  CHECK(sphere_surface(3) == doctest::Approx(4.0 * pi).epsilon(1e-13));
  CHECK(sphere_surface(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-13));
  CHECK_THROWS_AS(sphere_surface(0), DomainError);
}

TEST_CASE("sphere norm of a constant kernel is exact") {
  // On S^0 the sampler hits exactly {-1, +1}; the mean of |c|^s is |c|^s.
  const KernelSpec k = KernelSpec::constant(1, 1, 3.0);
  const SphereNormEstimate est = kernel_sphere_norm(k, 2.0, 4096, 1);
  CHECK(est.value == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_FALSE(est.non_integrable);
  CHECK(est.doubling_estimates.size() == 3);

  // In dimension one every direction has |theta_1| = 1, so any power kernel
  // integrates to the bare surface measure.
  const KernelSpec p = KernelSpec::first_coord_power(1, 1, 0.7);
  const SphereNormEstimate pe = kernel_sphere_norm(p, 3.0, 4096, 1);
  CHECK(pe.value == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK_FALSE(pe.non_integrable);
}

TEST_CASE("sphere norm of the quarter-power kernel matches the Gamma closed form") {
  // integral over S^1 of |theta_1|^{-1/2} = 2 Gamma(1/4) Gamma(1/2) / Gamma(3/4).
  const double truth = std::sqrt(
      2.0 * std::exp(std::lgamma(0.25) + std::lgamma(0.5) - std::lgamma(0.75)));
  const KernelSpec k = KernelSpec::first_coord_power(2, 1, 0.25);
  const SphereNormEstimate est = kernel_sphere_norm(k, 2.0, 200000, 12);
  CHECK_FALSE(est.non_integrable);
  // The integrand has a heavy tail, so the Monte Carlo estimate is loose.
  CHECK(est.value == doctest::Approx(truth).epsilon(0.05));
}

TEST_CASE("sphere norm flags a divergent sphere integral") {
  // |theta_1|^{-3} on S^1 is not integrable; the doubling trend must grow.
  const KernelSpec k = KernelSpec::first_coord_power(2, 1, 1.5);
  const SphereNormEstimate est = kernel_sphere_norm(k, 2.0, 65536, 3);
  CHECK(est.non_integrable);
}

TEST_CASE("sphere norm validates its exponent and sample count") {
  const KernelSpec k = KernelSpec::constant(1, 1, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(kernel_sphere_norm(k, inf, 64, 1), HypothesisViolation);
  CHECK_THROWS_AS(kernel_sphere_norm(k, 1.0, 64, 1), HypothesisViolation);
  CHECK_THROWS_AS(kernel_sphere_norm(k, 2.0, 4, 1), ConfigError);
}
