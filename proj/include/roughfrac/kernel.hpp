#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roughfrac {

enum class KernelKind { constant, first_coord_power, sign_pattern, tabulated };

/// Degree-zero homogeneous kernel on R^{m n}, described by its restriction
/// to the Euclidean unit sphere S^{m n - 1}.
///
/// Builtins:
///   constant(c)            Omega == c
///   first_coord_power(g)   Omega(theta) = |theta_1|^{-g}, g >= 0
///   sign_pattern(axis)     Omega(theta) = sign(theta_axis)
///   tabulated(samples)     nearest-direction lookup over unit samples
class KernelSpec {
 public:
  struct SphereSample {
    std::vector<double> direction;  // unit vector in R^{m n}
    double value;
  };

  static KernelSpec constant(int m, int n, double c);
  static KernelSpec first_coord_power(int m, int n, double gamma);
  static KernelSpec sign_pattern(int m, int n, int axis);
  static KernelSpec tabulated(int m, int n, std::vector<SphereSample> samples);

  // Grammar: "constant:c" | "power:gamma" | "sign:axis".
  static KernelSpec parse(const std::string& spec, int m, int n);

  // Evaluates at any nonzero point of R^{m n}; the value depends only on
  // the ray through ybar. Throws DomainError at the origin.
  double eval(std::span<const double> ybar) const;

  int m() const { return m_; }
  int n() const { return n_; }
  int ambient_dim() const { return m_ * n_; }
  KernelKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == KernelKind::constant; }
  double constant_value() const { return c_; }
  std::string describe() const;

  // Cached integrability estimate, filled in by kernel_sphere_norm callers
  // that want to carry it along.
  std::optional<double> ls_norm_estimate;

 private:
  KernelSpec(int m, int n, KernelKind kind) : m_(m), n_(n), kind_(kind) {}
  int m_;
  int n_;
  KernelKind kind_;
  double c_ = 1.0;
  double gamma_ = 0.0;
  int axis_ = 0;
  std::vector<SphereSample> samples_;
};

/// Monte Carlo estimate of (integral over S^{m n - 1} of |Omega|^s)^{1/s}.
/// non_integrable fires when the running estimate keeps growing across the
/// final doubling of the sample count (relative change > 10%), the
/// signature of a divergent sphere integral.
struct SphereNormEstimate {
  double value = 0.0;
  bool non_integrable = false;
  std::vector<double> doubling_estimates;  // at samples/4, samples/2, samples
};

SphereNormEstimate kernel_sphere_norm(const KernelSpec& k, double s, int samples,
                                      std::uint64_t seed);

// Surface measure of the Euclidean unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
double sphere_surface(int d);

}  // namespace roughfrac
