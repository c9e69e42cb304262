#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "roughfrac/errors.hpp"
#include "roughfrac/exponents.hpp"
#include "roughfrac/grid_function.hpp"
#include "roughfrac/kernel.hpp"
#include "roughfrac/operators.hpp"

using namespace roughfrac;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// m = 1, n = 1, alpha = 1/2, essentially bounded kernel.
ExponentConfig cfg11() { return derive_exponents(1, 1, 0.5, kInf, {4.0 / 3.0}); }

EvalSettings quick_settings() {
  EvalSettings st;
  st.quad_tol = 1e-3;
  return st;
}

}  // namespace

TEST_CASE("integral operator reproduces the antiderivative on an indicator") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 64)};
  const EvalSettings st = quick_settings();

  const double x0[] = {0.0};
  const OperatorValue center = eval_integral_op(f, one, cfg, x0, st);
  CHECK(center.converged);
  CHECK(oracles::riesz_indicator_1d(0.5, -1.0, 1.0, 0.0) == doctest::Approx(4.0));
  CHECK(center.value == doctest::Approx(4.0).epsilon(0.01));

  const double x1[] = {0.5};
  const OperatorValue off = eval_integral_op(f, one, cfg, x1, st);
  CHECK(off.value ==
        doctest::Approx(oracles::riesz_indicator_1d(0.5, -1.0, 1.0, 0.5)).epsilon(0.01));

  const double x2[] = {2.5};  // support seen from outside
  const OperatorValue out = eval_integral_op(f, one, cfg, x2, st);
  CHECK(out.value ==
        doctest::Approx(oracles::riesz_indicator_1d(0.5, -1.0, 1.0, 2.5)).epsilon(0.01));
}

TEST_CASE("two-factor integral operator matches the logarithmic closed form") {
  // integral over [-1,1]^2 of (|y_1|+|y_2|)^{-1} = 8 log 2.
  const ExponentConfig cfg = derive_exponents(2, 1, 1.0, kInf, {4.0 / 3.0, 4.0 / 3.0});
  const KernelSpec one = KernelSpec::constant(2, 1, 1.0);
  const SampledFunction chi = make_indicator({-1.0}, {1.0}, 64);
  const std::vector<SampledFunction> f = {chi, chi};
  EvalSettings st;
  st.quad_tol = 3e-3;
  const double x0[] = {0.0};
  const OperatorValue v = eval_integral_op(f, one, cfg, x0, st);
  CHECK(v.converged);
  CHECK(v.value == doctest::Approx(8.0 * std::log(2.0)).epsilon(0.01));
}

TEST_CASE("maximal operator attains the exact supremum when the grid tops the support") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 64)};
  const double x0[] = {0.0};

  // Centered indicator: sup_r r^{-1/2} |[-r,r] cap [-1,1]| = 2 at r = 1,
  // and the automatic grid ends exactly at the support radius 1.
  EvalSettings coarse = quick_settings();
  coarse.radii.rho = 4;
  const OperatorValue v4 = eval_maximal_op(f, one, cfg, x0, coarse);
  CHECK(v4.value >= 2.0 * 0.98);
  CHECK(v4.value <= 2.0 * dyadic_slack_factor(4, 1.5) * 1.001);

  EvalSettings fine = quick_settings();
  fine.radii.rho = 16;
  const OperatorValue v16 = eval_maximal_op(f, one, cfg, x0, fine);
  CHECK(v16.value == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("maximal operator tracks a dense-scan reference off center") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 64)};
  EvalSettings st = quick_settings();
  st.radii.rho = 16;
  const double x[] = {0.7};
  const OperatorValue v = eval_maximal_op(f, one, cfg, x, st);
  const double ref = oracles::maximal_indicator_1d(0.5, -1.0, 1.0, 0.7);
  CHECK(v.value <= ref * 1.01);
  CHECK(v.value >= ref / dyadic_slack_factor(16, 0.5) * 0.99);
}

TEST_CASE("dyadic slack factor and its hypotheses") {
  CHECK(dyadic_slack_factor(4, 0.5) == doctest::Approx(std::exp2(0.125)).epsilon(1e-15));
  CHECK(dyadic_slack_factor(16, 1.5) == doctest::Approx(std::exp2(1.5 / 16.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dyadic_slack_factor(0, 0.5), ConfigError);
  CHECK_THROWS_AS(dyadic_slack_factor(4, 0.0), HypothesisViolation);
}

TEST_CASE("power-of-two dilation rescales both operators exactly") {
  // I(f(lambda .))(x) = lambda^{-alpha} I(f)(lambda x); with lambda = 2 and
  // a dyadic point every quadrature node pairs up bit for bit.
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const SampledFunction f = make_indicator({-1.0}, {1.0}, 64);
  const SampledFunction g = f.dilated(2.0);
  const EvalSettings st = quick_settings();

  const double xs[] = {0.25};
  const double xl[] = {0.5};
  const OperatorValue vi_small = eval_integral_op({g}, one, cfg, xs, st);
  const OperatorValue vi_large = eval_integral_op({f}, one, cfg, xl, st);
  CHECK(vi_small.value * std::sqrt(2.0) == doctest::Approx(vi_large.value).epsilon(1e-12));

  const OperatorValue vm_small = eval_maximal_op({g}, one, cfg, xs, st);
  const OperatorValue vm_large = eval_maximal_op({f}, one, cfg, xl, st);
  CHECK(vm_small.value * std::sqrt(2.0) == doctest::Approx(vm_large.value).epsilon(1e-12));
}

TEST_CASE("trivial kernel exponent collapses the Hoelder majorant onto the smooth maximal") {
  const ExponentConfig cfg = cfg11();  // s = infinity so s' = 1
  const std::vector<SampledFunction> f = {make_tent({-1.0}, {1.0}, 64)};
  const EvalSettings st = quick_settings();
  const double x[] = {0.3};
  const OperatorValue h = holder_majorant(f, cfg, x, st);
  const OperatorValue ms = eval_maximal_op(f, KernelSpec::constant(1, 1, 1.0), cfg, x, st);
  CHECK(h.value == ms.value);
}

TEST_CASE("geometric-mean majorant dominates the integral operator") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_tent({-1.0}, {1.0}, 64)};
  const EvalSettings st = quick_settings();
  const double x[] = {0.3};

  const WellandBound wb = welland_majorant(f, one, cfg, x, 0.2, st);
  CHECK(wb.bound ==
        doctest::Approx(std::sqrt(wb.m_plus.value * wb.m_minus.value)).epsilon(1e-12));
  CHECK(wb.c_proof ==
        doctest::Approx(2.0 * std::exp2(0.5) / (1.0 - std::exp2(-0.2))).epsilon(1e-12));
  const OperatorValue iv = eval_integral_op(f, one, cfg, x, st);
  CHECK(std::fabs(iv.value) <= wb.c_proof * wb.bound * (1.0 + 1e-6));

  CHECK_THROWS_AS(welland_majorant(f, one, cfg, x, 0.0, st), HypothesisViolation);
  CHECK_THROWS_AS(welland_majorant(f, one, cfg, x, 0.5, st), HypothesisViolation);
}

TEST_CASE("operators validate factor count and point dimension") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const SampledFunction chi = make_indicator({-1.0}, {1.0}, 16);
  const EvalSettings st = quick_settings();
  const double x[] = {0.0};
  const double x2[] = {0.0, 0.0};
  CHECK_THROWS_AS(eval_integral_op({chi, chi}, one, cfg, x, st), ConfigError);
  CHECK_THROWS_AS(eval_integral_op({chi}, one, cfg, x2, st), ConfigError);
}

TEST_CASE("an identically zero factor short-circuits to an exact zero") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const SampledFunction zero =
      make_indicator({-1.0}, {1.0}, 16).transformed([](double) { return 0.0; });
  const EvalSettings st = quick_settings();
  const double x[] = {0.0};
  const OperatorValue vi = eval_integral_op({zero}, one, cfg, x, st);
  CHECK(vi.value == 0.0);
  CHECK(vi.evals == 0);
  CHECK(vi.converged);
  const OperatorValue vm = eval_maximal_op({zero}, one, cfg, x, st);
  CHECK(vm.value == 0.0);
  CHECK(vm.evals == 0);
}

TEST_CASE("exhausted budgets are reported, not silently absorbed") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 64)};
  EvalSettings st = quick_settings();
  st.budget.max_evals = 50;
  const double x[] = {0.0};
  const OperatorValue vi = eval_integral_op(f, one, cfg, x, st);
  CHECK(vi.budget_exceeded);
  CHECK_FALSE(vi.converged);
  const OperatorValue vm = eval_maximal_op(f, one, cfg, x, st);
  CHECK(vm.budget_exceeded);
  CHECK_FALSE(vm.converged);
}

TEST_CASE("automatic radial grid tops out exactly at the support bound") {
  RadialGrid rg;  // r0 <= 0 selects the automatic mode
  rg.rho = 4;
  rg.auto_octaves = 16;
  const std::vector<double> radii = rg.resolve(3.0);
  REQUIRE(radii.size() == 65);
  CHECK(radii.back() == 3.0);
  CHECK(radii.front() == doctest::Approx(3.0 * std::exp2(-16.0)).epsilon(1e-12));
  CHECK(radii[64] / radii[63] == doctest::Approx(std::exp2(0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(rg.resolve(0.0), DomainError);
}

TEST_CASE("explicit radial grids follow r0 * 2^{k/rho}") {
  RadialGrid rg;
  rg.r0 = 1.0;
  rg.k_min = -2;
  rg.k_max = 4;
  rg.rho = 2;
  const std::vector<double> radii = rg.resolve(123.0);  // hint unused
  REQUIRE(radii.size() == 7);
  CHECK(radii.front() == 0.5);
  CHECK(radii.back() == 4.0);

  RadialGrid bad = rg;
  bad.k_min = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  RadialGrid bad_rho = rg;
  bad_rho.rho = 0;
  CHECK_THROWS_AS(bad_rho.validate(), ConfigError);
}

TEST_CASE("settings validation rejects degenerate quadrature knobs") {
  EvalSettings st;
  st.quad_tol = 0.0;
  CHECK_THROWS_AS(st.validate(), ConfigError);
  EvalSettings st2;
  st2.points_per_shell = 1;
  CHECK_THROWS_AS(st2.validate(), ConfigError);
}

TEST_CASE("operator id tokens round trip") {
  CHECK(parse_operator_id("I") == OperatorId::integral);
  CHECK(parse_operator_id("M") == OperatorId::maximal);
  CHECK(parse_operator_id("I_smooth") == OperatorId::integral_smooth);
  CHECK(parse_operator_id("M_smooth") == OperatorId::maximal_smooth);
  CHECK_THROWS_AS(parse_operator_id("J"), ConfigError);
}

TEST_CASE("grid points enumerate cell centers row-major with the last axis fastest") {
  const auto pts = make_grid_points({0.0, 0.0}, {1.0, 1.0}, {2, 2});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0] == std::vector<double>{0.25, 0.25});
  CHECK(pts[1] == std::vector<double>{0.25, 0.75});
  CHECK(pts[2] == std::vector<double>{0.75, 0.25});
  CHECK(pts[3] == std::vector<double>{0.75, 0.75});
  CHECK_THROWS_AS(make_grid_points({0.0}, {0.0}, {2}), ConfigError);
  CHECK_THROWS_AS(make_grid_points({0.0, 0.0}, {1.0, 2.0}, {2, 2}), ConfigError);
}

TEST_CASE("field evaluation agrees with pointwise evaluation and ignores point order") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 32)};
  EvalSettings st;
  st.quad_tol = 3e-3;
  st.x_grid = make_grid_points({-2.0}, {2.0}, {8});

  const FieldResult fr = eval_field(OperatorId::maximal, f, one, cfg, st);
  CHECK(fr.field.dim() == 1);
  CHECK(fr.converged);
  for (const auto& x : st.x_grid) {
    const OperatorValue v =
        eval_maximal_op(f, one, cfg, std::span<const double>(x.data(), x.size()), st);
    CHECK(fr.field(std::span<const double>(x.data(), x.size())) == v.value);
  }

  EvalSettings rev = st;
  std::reverse(rev.x_grid.begin(), rev.x_grid.end());
  const FieldResult fr2 = eval_field(OperatorId::maximal, f, one, cfg, rev);
  CHECK(fr2.field.values() == fr.field.values());
}

TEST_CASE("smooth field variants replace the kernel by one") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec doubled = KernelSpec::constant(1, 1, 2.0);
  const KernelSpec unit = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 32)};
  EvalSettings st;
  st.quad_tol = 3e-3;
  st.x_grid = make_grid_points({-1.0}, {1.0}, {4});

  const FieldResult smooth = eval_field(OperatorId::maximal_smooth, f, doubled, cfg, st);
  const FieldResult plain = eval_field(OperatorId::maximal, f, unit, cfg, st);
  CHECK(smooth.field.values() == plain.field.values());
}

TEST_CASE("field evaluation rejects grids that are not uniform products") {
  const ExponentConfig cfg = cfg11();
  const KernelSpec one = KernelSpec::constant(1, 1, 1.0);
  const std::vector<SampledFunction> f = {make_indicator({-1.0}, {1.0}, 16)};
  EvalSettings st;
  CHECK_THROWS_AS(eval_field(OperatorId::maximal, f, one, cfg, st), ConfigError);  // empty
  st.x_grid = {{0.0}, {0.5}, {1.5}};
  CHECK_THROWS_AS(eval_field(OperatorId::maximal, f, one, cfg, st), ConfigError);
  st.x_grid = {{0.25}, {0.25}};
  CHECK_THROWS_AS(eval_field(OperatorId::maximal, f, one, cfg, st), ConfigError);
}
