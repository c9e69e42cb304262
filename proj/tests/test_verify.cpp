#include <algorithm>
#include <cctype>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "roughfrac/errors.hpp"
#include "roughfrac/verify.hpp"

using namespace roughfrac;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

TestBattery tiny_battery(int instances, std::uint64_t seed) {
  BatteryOptions opt;
  opt.instances = instances;
  opt.seed = seed;
  opt.points = {{-0.5}, {0.25}, {1.0}};
  opt.settings.quad_tol = 3e-3;
  opt.settings.budget.max_evals = std::size_t{1} << 21;
  opt.name = "tiny";
  return make_battery(derive_exponents(1, 1, 0.3, kInf, {2.0}), KernelSpec::constant(1, 1, 1.0),
                      opt);
}

TestBattery norm_battery(int instances, std::uint64_t seed) {
  BatteryOptions opt;
  opt.instances = instances;
  opt.seed = seed;
  opt.points = make_grid_points({-4.0}, {4.0}, {8});
  opt.settings.quad_tol = 3e-3;
  opt.settings.budget.max_evals = std::size_t{1} << 21;
  opt.name = "norm";
  return make_battery(derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0}),
                      KernelSpec::first_coord_power(2, 1, 0.25), opt);
}

}  // namespace

TEST_CASE("check id names round trip") {
  const CheckId all[] = {CheckId::holder_domination,
                         CheckId::welland,
                         CheckId::maximal_strong,
                         CheckId::integral_strong,
                         CheckId::maximal_weak,
                         CheckId::integral_weak,
                         CheckId::maximal_oneweight,
                         CheckId::integral_oneweight,
                         CheckId::maximal_twoweight,
                         CheckId::integral_twoweight,
                         CheckId::maximal_twoweight_weak,
                         CheckId::maximal_by_integral,
                         CheckId::scaling};
  for (CheckId id : all) CHECK(parse_check_id(check_id_name(id)) == id);
  CHECK_THROWS_AS(parse_check_id("bogus"), ConfigError);
}

TEST_CASE("battery generation is seed-deterministic and windowed") {
  const TestBattery a = tiny_battery(6, 9);
  const TestBattery b = tiny_battery(6, 9);
  REQUIRE(a.instances.size() == 6);
  REQUIRE(b.instances.size() == 6);
  for (std::size_t t = 0; t < a.instances.size(); ++t) {
    REQUIRE(a.instances[t].factors.size() == 1);
    const SampledFunction& fa = a.instances[t].factors[0];
    const SampledFunction& fb = b.instances[t].factors[0];
    CHECK(fa.values() == fb.values());
    CHECK(fa.box_lo(0) == fb.box_lo(0));
    CHECK(fa.box_lo(0) >= -2.0 - 1e-12);
    CHECK(fa.box_hi(0) <= 2.0 + 1e-12);
  }

  const TestBattery c = tiny_battery(6, 10);
  bool differs = false;
  for (std::size_t t = 0; t < c.instances.size() && !differs; ++t)
    differs = c.instances[t].factors[0].values() != a.instances[t].factors[0].values() ||
              c.instances[t].factors[0].box_lo(0) != a.instances[t].factors[0].box_lo(0);
  CHECK(differs);
}

TEST_CASE("battery options are validated") {
  BatteryOptions opt;
  opt.instances = -1;
  const ExponentConfig cfg = derive_exponents(1, 1, 0.3, kInf, {2.0});
  CHECK_THROWS_AS(make_battery(cfg, KernelSpec::constant(1, 1, 1.0), opt), ConfigError);
  opt.instances = 2;
  opt.window_hi = -1.0;  // window narrower than the minimum span
  CHECK_THROWS_AS(make_battery(cfg, KernelSpec::constant(1, 1, 1.0), opt), ConfigError);
  BatteryOptions ok;
  ok.instances = 2;
  CHECK_THROWS_AS(make_battery(cfg, KernelSpec::constant(2, 1, 1.0), ok), ConfigError);
}

TEST_CASE("config hashes are stable 16-digit hex") {
  const std::string h = config_hash_of("abc");
  CHECK(h == config_hash_of("abc"));
  CHECK(h != config_hash_of("abd"));
  CHECK(h.size() == 16);
  CHECK(std::all_of(h.begin(), h.end(),
                    [](unsigned char ch) { return std::isxdigit(ch) != 0; }));
}

TEST_CASE("pointwise domination collapses to constant one on the trivial configuration") {
  const TestBattery b = tiny_battery(4, 21);
  const VerificationReport rep = check_pointwise_domination({&b, 1});
  CHECK(rep.passed);
  CHECK(rep.error.empty());
  REQUIRE(rep.theoretical_constant.has_value());
  CHECK(*rep.theoretical_constant == 1.0);
  CHECK(rep.empirical_constant <= 1.0 + 1e-6);
  CHECK_FALSE(rep.rows.empty());
}

TEST_CASE("geometric-mean check carries the proof constant") {
  const TestBattery b = tiny_battery(4, 22);
  const VerificationReport rep = check_welland({&b, 1}, 0.5);
  CHECK(rep.passed);
  // eps = 0.5 * min{alpha, mn - alpha} = 0.15 at alpha = 0.3.
  const double c_proof = 2.0 * std::exp2(0.7) / (1.0 - std::exp2(-0.15));
  REQUIRE(rep.theoretical_constant.has_value());
  CHECK(*rep.theoretical_constant == doctest::Approx(c_proof).epsilon(1e-12));
  CHECK_THROWS_AS(check_welland({&b, 1}, 1.5), ConfigError);
}

TEST_CASE("smooth maximal is dominated by the smooth integral pointwise") {
  const TestBattery b = tiny_battery(4, 23);
  const VerificationReport rep = check_reduction({&b, 1});
  CHECK(rep.passed);
  CHECK(rep.error.empty());
}

TEST_CASE("dilation covariance holds and lambda is constrained to powers of two") {
  const TestBattery b = tiny_battery(4, 24);
  const VerificationReport rep = check_scaling({&b, 1}, 2.0);
  CHECK(rep.passed);
  CHECK(rep.error.empty());
  CHECK_THROWS_AS(check_scaling({&b, 1}, 3.0), ConfigError);
  CHECK_THROWS_AS(check_scaling({&b, 1}, 0.5), ConfigError);
}

TEST_CASE("norm checks pass unweighted and surface weight divergences as errors") {
  const TestBattery b = norm_battery(2, 31);
  const VerificationReport plain = check_strong_type(CheckId::maximal_strong, b);
  CHECK(plain.passed);
  CHECK(plain.error.empty());
  CHECK(plain.empirical_constant > 0.0);

  // w^{s'} = |x|^{-1.8} fails the two-exponent precondition on any family
  // containing origin cubes: reported, not thrown.
  WeightContext wc;
  wc.w = WeightSpec::power(1, -0.9);
  const VerificationReport bad = check_strong_type(CheckId::maximal_oneweight, b, wc);
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.error.empty());
  CHECK(bad.rows.empty());

  // The unweighted weak bound needs some p_i on the kernel boundary s'.
  const VerificationReport weak = check_weak_type(CheckId::maximal_weak, b);
  CHECK_FALSE(weak.passed);
  CHECK_FALSE(weak.error.empty());
}

TEST_CASE("check entry points reject ids outside their family") {
  const TestBattery b = norm_battery(1, 32);
  CHECK_THROWS_AS(check_strong_type(CheckId::scaling, b), ConfigError);
  CHECK_THROWS_AS(check_weak_type(CheckId::maximal_strong, b), ConfigError);
}

TEST_CASE("bundled battery set has the documented shape") {
  const auto bats = paper_core_batteries(7);
  REQUIRE(bats.size() == 6);
  for (const auto& b : bats) {
    CHECK_FALSE(b.name.empty());
    CHECK_FALSE(b.instances.empty());
    for (const auto& inst : b.instances)
      CHECK(static_cast<int>(inst.factors.size()) == b.cfg.m);
  }
  CHECK(bats[4].name == "S");
  CHECK(bats[5].name == "W");
}

TEST_CASE("suite reruns are byte-identical and machine-readable") {
  SuiteConfig sc;
  sc.suite = "weighted";
  sc.seed = 7;
  const SuiteResult r1 = run_suite(sc);
  const SuiteResult r2 = run_suite(sc);
  CHECK(r1.exit_code == 0);
  CHECK(r1.csv() == r2.csv());
  CHECK(r1.json() == r2.json());

  const std::string csv = r1.csv();
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "check_id,config_hash,instance_index,lhs,rhs,constant,passed");

  const nlohmann::json j = nlohmann::json::parse(r1.json());
  CHECK(j.at("suite") == "weighted");
  CHECK(j.at("seed") == 7);
  CHECK(j.at("checks").is_array());
  CHECK_FALSE(j.at("checks").empty());
  for (const auto& c : j.at("checks")) {
    CHECK(c.contains("id"));
    CHECK(c.contains("empirical_constant"));
    CHECK(c.contains("passed"));
  }

  SuiteConfig bogus;
  bogus.suite = "nonexistent";
  CHECK_THROWS_AS(run_suite(bogus), ConfigError);
}
