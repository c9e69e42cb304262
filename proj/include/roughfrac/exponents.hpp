#pragma once

#include <vector>

namespace roughfrac {

// Hoelder conjugate p' = p/(p-1). Maps 1 <-> +infinity.
double conjugate_exponent(double p);

/// Validated exponent tuple for an m-linear fractional operator of order
/// alpha on (R^n)^m with a kernel in L^s of the unit sphere.
///
/// s may be +infinity, in which case s_prime == 1 (the collapse direction
/// where the kernel is essentially bounded).
struct ExponentConfig {
  int m = 1;
  int n = 1;
  double alpha = 0.0;
  double s = 2.0;
  double s_prime = 2.0;
  std::vector<double> p_in;          // input Lebesgue exponents, one per factor
  std::vector<double> q_per_factor;  // 1/q_i = 1/p_i - alpha/(m n)
  double p_out = 0.0;                // 1/p_out = sum_i 1/p_i - alpha/n

  double mn() const { return static_cast<double>(m) * n; }
};

// Builds and validates the full tuple from the free parameters.
// Hypotheses enforced (violations name them verbatim):
//   0 < alpha < m*n
//   s > 1
//   1 <= s_prime < m*n/alpha
//   p_i >= 1 for every i
//   1/p_out = sum_i 1/p_i - alpha/n > 0
//   1/q_i = 1/p_i - alpha/(m*n) > 0 for every i
ExponentConfig derive_exponents(int m, int n, double alpha, double s,
                                std::vector<double> p_in);

// Re-checks every invariant of an already-built config (round-trip guard).
void validate(const ExponentConfig& cfg);

// Largest admissible perturbation for the interpolation-style arguments:
// min{alpha, m*n/s' - alpha, n/p_out}.
double epsilon_bound(const ExponentConfig& cfg);

// Half of epsilon_bound; the default perturbation used by the checks.
double default_epsilon(const ExponentConfig& cfg);

/// Perturbed exponents around a config, used by the majorant-based checks.
/// q1/q2 split the output exponent symmetrically:
///   1/q1 = 1/p_out - eps/n,  1/q2 = 1/p_out + eps/n,
/// so that p_out/(2 q1) + p_out/(2 q2) == 1 exactly.
/// beta1/beta2 are the same split (kept separate for the one-weight checks).
/// l1/l2 and g/h are only populated by the two-weight variant, where the
/// output exponent p is supplied explicitly:
///   1/l1 = 1/p - eps/n, 1/l2 = 1/p + eps/n,
///   1/g_i = 1/(m p) - eps/(m n), 1/h_i = 1/(m p) + eps/(m n).
struct ProofExponents {
  double epsilon = 0.0;
  double q1_eps = 0.0;
  double q2_eps = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  std::vector<double> g_per_factor;
  std::vector<double> h_per_factor;
};

// Requires 0 < eps < epsilon_bound(cfg).
ProofExponents derive_proof_exponents(const ExponentConfig& cfg, double eps);

// Two-weight variant with explicit output exponent p. Additionally requires
// eps < m*n*(1/p_i - 1/(m p)) for every i (which also forces p_i < m p).
ProofExponents derive_proof_exponents_two_weight(const ExponentConfig& cfg,
                                                 double eps, double p);

}  // namespace roughfrac
