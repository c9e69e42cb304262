#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughfrac/exponents.hpp"
#include "roughfrac/grid_function.hpp"
#include "roughfrac/kernel.hpp"
#include "roughfrac/shell_quadrature.hpp"

namespace roughfrac {

/// Discretization of sup_{r>0}: radii r0 * 2^{k/rho}, k = k_min..k_max,
/// rho steps per octave. r0 <= 0 selects the automatic range anchored at
/// the support bound R_max(x) = sum_i (farthest point of the box of f_i
/// from x): the top radius is then exactly R_max and the grid spans
/// auto_octaves octaves below it. Beyond R_max the ball integral is
/// constant while r^{alpha-mn} decays, so larger radii never win.
struct RadialGrid {
  double r0 = 0.0;
  int k_min = 0;
  int k_max = 0;
  int rho = 4;
  int auto_octaves = 16;

  bool is_auto() const { return r0 <= 0.0; }
  void validate() const;
  // Increasing positive radii; r_max_hint feeds the automatic mode.
  std::vector<double> resolve(double r_max_hint) const;
};

// The continuous sup lies in [discrete max, factor * discrete max] once the
// radii cover the support: for r between grid points the ball integral is
// dominated by the one at the next grid radius.
double dyadic_slack_factor(int rho, double mn_minus_alpha);

struct EvalSettings {
  double quad_tol = 1e-3;
  RadialGrid radii;
  ShellRule rule = ShellRule::midpoint_tensor;
  int points_per_shell = 64;
  IntegrationBudget budget;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> x_grid;  // consumed by eval_field

  void validate() const;
};

struct OperatorValue {
  double value = 0.0;
  double err_est = 0.0;
  std::size_t evals = 0;
  bool converged = true;
  bool budget_exceeded = false;  // partial value reported, never discarded
};

// Signed integral of Omega(ybar) |ybar|^{alpha-mn} prod_i f_i(x - y_i) over
// the block ball of radius R_max(x), split into dyadic shells toward the
// singularity. Exact 0 when some factor vanishes identically.
OperatorValue eval_integral_op(const std::vector<SampledFunction>& f, const KernelSpec& k,
                               const ExponentConfig& cfg, std::span<const double> x,
                               const EvalSettings& settings);

// max over the radial grid of r^{alpha-mn} * integral_{|ybar|<r} of
// |Omega| prod |f_i(x - y_i)|; each radius extends the previous ball
// integral by one annulus.
OperatorValue eval_maximal_op(const std::vector<SampledFunction>& f, const KernelSpec& k,
                              const ExponentConfig& cfg, std::span<const double> x,
                              const EvalSettings& settings);

// Right side of the pointwise Hoelder domination, without its constant:
// [smooth maximal at order alpha*s' on (|f_1|^{s'},...,|f_m|^{s'})]^{1/s'}.
OperatorValue holder_majorant(const std::vector<SampledFunction>& f, const ExponentConfig& cfg,
                              std::span<const double> x, const EvalSettings& settings);

struct WellandBound {
  double bound = 0.0;       // sqrt(M_{alpha+eps} * M_{alpha-eps})
  double c_proof = 0.0;     // 2 * 2^{mn-alpha} / (1 - 2^{-eps})
  double delta_star = 0.0;  // equalizing split radius (M_plus/M_minus)^{1/(2 eps)}
  OperatorValue m_plus;
  OperatorValue m_minus;
};

// Geometric-mean majorant for |I|. Requires 0 < eps < min{alpha, mn - alpha}.
WellandBound welland_majorant(const std::vector<SampledFunction>& f, const KernelSpec& k,
                              const ExponentConfig& cfg, std::span<const double> x, double eps,
                              const EvalSettings& settings);

enum class OperatorId { integral, maximal, integral_smooth, maximal_smooth };

// Tokens: "I", "M", "I_smooth", "M_smooth". The smooth variants replace the
// kernel by the constant 1; they do not take absolute values of f.
OperatorId parse_operator_id(const std::string& token);

struct FieldResult {
  SampledFunction field;
  std::size_t evals = 0;
  bool converged = true;
  bool budget_exceeded = false;
};

// Tabulates the operator at settings.x_grid, which must enumerate the cell
// centers of one uniform grid (any order); the result is that grid as a
// SampledFunction. Evaluation failures rethrow with the offending x in the
// message.
FieldResult eval_field(OperatorId op, const std::vector<SampledFunction>& f, const KernelSpec& k,
                       const ExponentConfig& cfg, const EvalSettings& settings);

// Cell centers of the uniform grid [lo, hi) with the given per-axis cell
// counts, in row-major order (last axis fastest). All axes must share one
// cell width.
std::vector<std::vector<double>> make_grid_points(const std::vector<double>& lo,
                                                  const std::vector<double>& hi,
                                                  const std::vector<int>& cells);

}  // namespace roughfrac
