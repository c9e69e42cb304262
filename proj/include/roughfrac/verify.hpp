#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughfrac/exponents.hpp"
#include "roughfrac/grid_function.hpp"
#include "roughfrac/kernel.hpp"
#include "roughfrac/operators.hpp"
#include "roughfrac/weights.hpp"

namespace roughfrac {

enum class CheckId {
  holder_domination,       // pointwise: rough maximal <= C * smooth majorant
  welland,                 // pointwise: |I| <= C_proof * geometric-mean majorant
  maximal_strong,          // ||M(f)||_p <= C prod ||f_i||_{p_i}
  integral_strong,         // same for I
  maximal_weak,            // weak quasinorm on the left, boundary exponent
  integral_weak,
  maximal_oneweight,       // single weight, multiplier convention on both sides
  integral_oneweight,
  maximal_twoweight,       // (u,v) pair, measure convention
  integral_twoweight,
  maximal_twoweight_weak,  // weighted weak quasinorm on the left
  maximal_by_integral,     // pointwise: smooth maximal <= smooth integral of |f|
  scaling                  // dilation covariance of both operators
};

std::string check_id_name(CheckId id);
CheckId parse_check_id(const std::string& name);

struct BatteryInstance {
  std::vector<SampledFunction> factors;
  std::string description;
};

/// One homogeneous battery: a fixed exponent configuration and kernel plus
/// seeded instances. points drive the pointwise checks; the norm checks use
/// them as the output field grid, so there they must enumerate the cell
/// centers of one uniform grid.
struct TestBattery {
  std::string name;
  ExponentConfig cfg;
  KernelSpec kernel = KernelSpec::constant(1, 1, 1.0);
  std::vector<BatteryInstance> instances;
  std::vector<std::vector<double>> points;
  EvalSettings settings;
};

/// Seeded instance generation: factor shapes cycle through indicators,
/// tents, truncated powers and random-sign piecewise constants, with
/// positions, widths and scales drawn from the seed. Every factor is
/// bounded with compact support, so all product-Lebesgue norms are finite.
struct BatteryOptions {
  int instances = 20;
  std::uint64_t seed = 1;
  double window_lo = -2.0;  // supports are sampled inside this window
  double window_hi = 2.0;
  bool use_powers = true;     // include truncated-power factors
  bool use_random_pc = true;  // include random-sign piecewise constants
  std::vector<std::vector<double>> points;
  EvalSettings settings;
  std::string name;
};

TestBattery make_battery(const ExponentConfig& cfg, const KernelSpec& kernel,
                         const BatteryOptions& opt);

/// Weight data for the weighted checks; members irrelevant to a given check
/// may stay empty. Class-constant preconditions are evaluated on family.
struct WeightContext {
  std::optional<WeightSpec> w;       // one-weight checks
  std::optional<WeightSpec> u;       // two-weight checks, left weight
  std::optional<WeightSpec> v;       // two-weight checks, right weight
  std::vector<double> q_per_factor;  // two-weight maximal/weak: 1/p = sum 1/q_i
  double p_two_weight = 0.0;         // two-weight integral: output exponent
  double r_bump = 2.0;
  std::optional<CubeFamily> family;
  double class_quad_tol = 1e-3;
};

struct InstanceRow {
  int instance_index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool passed = true;
  std::string note;
};

struct VerificationReport {
  std::string check_id;
  std::string config_echo;
  std::string config_hash;
  double empirical_constant = 0.0;
  std::optional<double> theoretical_constant;
  bool passed = false;
  std::string witness;  // worst instance and point
  std::string error;    // nonempty when a precondition failed; rows then empty
  double runtime_seconds = 0.0;  // diagnostics only, never serialized
  std::vector<InstanceRow> rows;
};

// Pointwise checks aggregate over several batteries (sub-configurations).
VerificationReport check_pointwise_domination(std::span<const TestBattery> batteries);

// epsilon_fraction scales the admissible bound min{alpha, mn - alpha} per
// battery; the proof constant 2 * 2^{mn-alpha} / (1 - 2^{-eps}) is the
// reported theoretical constant (max across batteries).
VerificationReport check_welland(std::span<const TestBattery> batteries,
                                 double epsilon_fraction = 0.5);

VerificationReport check_reduction(std::span<const TestBattery> batteries);

// lambda must be a positive power of two so grids dilate exactly.
VerificationReport check_scaling(std::span<const TestBattery> batteries, double lambda);

// id selects among {maximal,integral} x {strong, oneweight, twoweight}.
// passed = every ratio finite, and <= baseline * 1.05 when a baseline is
// given. Hypothesis failures surface in .error, not as exceptions.
VerificationReport check_strong_type(CheckId id, const TestBattery& battery,
                                     const WeightContext& wc = {},
                                     std::optional<double> baseline = {});

// id selects among {maximal_weak, integral_weak, maximal_twoweight_weak}.
VerificationReport check_weak_type(CheckId id, const TestBattery& battery,
                                   const WeightContext& wc = {},
                                   std::optional<double> baseline = {});

// FNV-1a over the echo string, fixed-width hex.
std::string config_hash_of(const std::string& echo);

struct SuiteConfig {
  std::string suite = "paper-core";
  std::uint64_t seed = 7;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<VerificationReport> reports;
  int exit_code = 0;  // 0 all passed, 1 some check failed, 2 precondition error

  // One row per instance: check_id,config_hash,instance_index,lhs,rhs,constant,passed
  std::string csv() const;
  // {suite, seed, checks: [{id, empirical_constant, theoretical_constant, passed, witness}]}
  std::string json() const;
};

// Bundled suites: "paper-core" (pointwise lemmas, unweighted strong/weak
// bounds, scaling) and "weighted" (one- and two-weight bounds on power
// weights). Every battery derives from the seed; reruns are byte-identical.
SuiteResult run_suite(const SuiteConfig& config);

std::vector<TestBattery> paper_core_batteries(std::uint64_t seed);

}  // namespace roughfrac
