#include <cmath>
#include <limits>

#include "doctest.h"
#include "roughfrac/errors.hpp"
#include "roughfrac/exponents.hpp"

using namespace roughfrac;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("conjugate_exponent pairs") {
  CHECK(conjugate_exponent(2.0) == doctest::Approx(2.0));
  CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK(conjugate_exponent(1.0) == kInf);
  CHECK(conjugate_exponent(kInf) == doctest::Approx(1.0));
  // involution
  CHECK(conjugate_exponent(conjugate_exponent(3.0)) == doctest::Approx(3.0));
}

TEST_CASE("derive_exponents fills the tuple") {
  const ExponentConfig cfg = derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0});
  CHECK(cfg.m == 2);
  CHECK(cfg.n == 1);
  CHECK(cfg.mn() == doctest::Approx(2.0));
  CHECK(cfg.s_prime == doctest::Approx(2.0));
  REQUIRE(cfg.q_per_factor.size() == 2);
  // 1/q_i = 1/3 - 0.4/2
  CHECK(cfg.q_per_factor[0] == doctest::Approx(7.5));
  CHECK(cfg.q_per_factor[1] == doctest::Approx(7.5));
  // 1/p = 2/3 - 0.4
  CHECK(cfg.p_out == doctest::Approx(3.75));
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("derive_exponents with essentially bounded kernel") {
  const ExponentConfig cfg = derive_exponents(1, 1, 0.5, kInf, {4.0 / 3.0});
  CHECK(cfg.s_prime == doctest::Approx(1.0));
  CHECK(cfg.q_per_factor[0] == doctest::Approx(4.0));
  CHECK(cfg.p_out == doctest::Approx(4.0));
}

TEST_CASE("derive_exponents rejects each hypothesis violation") {
  CHECK_THROWS_AS(derive_exponents(1, 1, 0.0, 2.0, {2.0}), HypothesisViolation);
  CHECK_THROWS_AS(derive_exponents(1, 1, 1.0, 2.0, {2.0}), HypothesisViolation);
  CHECK_THROWS_AS(derive_exponents(1, 1, 0.5, 1.0, {2.0}), HypothesisViolation);
  // s' = 2 >= m n / alpha = 2 at alpha = 0.5, m n = 1
  CHECK_THROWS_AS(derive_exponents(1, 1, 0.6, 2.0, {2.0}), HypothesisViolation);
  CHECK_THROWS_AS(derive_exponents(1, 1, 0.5, kInf, {0.5}), HypothesisViolation);
  // 1/p_out = 1/4 - 0.3 < 0
  CHECK_THROWS_AS(derive_exponents(1, 1, 0.3, kInf, {4.0}), HypothesisViolation);
  // 1/q_1 = 1/4 - 0.25 = 0
  CHECK_THROWS_AS(derive_exponents(2, 1, 0.5, kInf, {4.0, 1.5}), HypothesisViolation);
  CHECK_THROWS_AS(derive_exponents(0, 1, 0.5, 2.0, {2.0}), HypothesisViolation);
  CHECK_THROWS_AS(derive_exponents(2, 1, 0.5, 2.0, {2.0}), HypothesisViolation);
}

TEST_CASE("validate detects a tampered config") {
  ExponentConfig cfg = derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0});
  cfg.q_per_factor[1] = 5.0;
  CHECK_THROWS_AS(validate(cfg), HypothesisViolation);
}

TEST_CASE("epsilon_bound and the default perturbation") {
  const ExponentConfig cfg = derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0});
  // min{alpha, m n / s' - alpha, n / p_out} = min{0.4, 0.6, 4/15}
  CHECK(epsilon_bound(cfg) == doctest::Approx(4.0 / 15.0));
  CHECK(default_epsilon(cfg) == doctest::Approx(2.0 / 15.0));
}

TEST_CASE("derive_proof_exponents split identities") {
  const ExponentConfig cfg = derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0});
  const double eps = 0.2;
  const ProofExponents pe = derive_proof_exponents(cfg, eps);
  CHECK(pe.epsilon == doctest::Approx(eps));
  CHECK(1.0 / pe.q1_eps == doctest::Approx(1.0 / cfg.p_out - eps / cfg.n));
  CHECK(1.0 / pe.q2_eps == doctest::Approx(1.0 / cfg.p_out + eps / cfg.n));
  // the exact Hoelder split
  CHECK(cfg.p_out / (2.0 * pe.q1_eps) + cfg.p_out / (2.0 * pe.q2_eps) == doctest::Approx(1.0));
  CHECK(pe.beta1 == doctest::Approx(pe.q1_eps));
  CHECK(pe.beta2 == doctest::Approx(pe.q2_eps));

  CHECK_THROWS_AS(derive_proof_exponents(cfg, 0.0), HypothesisViolation);
  CHECK_THROWS_AS(derive_proof_exponents(cfg, epsilon_bound(cfg)), HypothesisViolation);
}

TEST_CASE("derive_proof_exponents_two_weight split identities") {
  const ExponentConfig cfg = derive_exponents(2, 1, 0.4, 2.0, {3.0, 3.0});
  const double p = 2.0;
  const double eps = 0.1;
  const ProofExponents pe = derive_proof_exponents_two_weight(cfg, eps, p);
  CHECK(1.0 / pe.l1 == doctest::Approx(1.0 / p - eps / cfg.n));
  CHECK(1.0 / pe.l2 == doctest::Approx(1.0 / p + eps / cfg.n));
  CHECK(p / (2.0 * pe.l1) + p / (2.0 * pe.l2) == doctest::Approx(1.0));
  REQUIRE(pe.g_per_factor.size() == 2);
  REQUIRE(pe.h_per_factor.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(1.0 / pe.g_per_factor[i] ==
          doctest::Approx(1.0 / (cfg.m * p) - eps / (cfg.m * cfg.n)));
    CHECK(1.0 / pe.h_per_factor[i] ==
          doctest::Approx(1.0 / (cfg.m * p) + eps / (cfg.m * cfg.n)));
  }
  // eps must stay below m n (1/p_i - 1/(m p)) = 2 (1/3 - 1/4) = 1/6
  CHECK_THROWS_AS(derive_proof_exponents_two_weight(cfg, 0.2, p), HypothesisViolation);
}
