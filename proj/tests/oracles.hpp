#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

// Reference values computed along routes independent of the library:
// antiderivatives, dense scans, and scale-free closed forms. Tests compare
// library output against these, never against the library itself.
namespace oracles {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// integral of |t|^g over [lo, hi] by the antiderivative
// sign(t) |t|^{g+1} / (g+1); +infinity when the closed interval touches 0
// and g <= -1.
inline double power_integral_1d(double g, double lo, double hi) {
  if (lo <= 0.0 && hi >= 0.0 && g <= -1.0) return kInf;
  auto antider = [g](double t) {
    const double s = t >= 0.0 ? 1.0 : -1.0;
    return s * std::pow(std::fabs(t), g + 1.0) / (g + 1.0);
  };
  return antider(hi) - antider(lo);
}

inline double power_mean_1d(double g, double lo, double hi) {
  return power_integral_1d(g, lo, hi) / (hi - lo);
}

// integral over [a,b] of |x - y|^{alpha - 1} dy, all positions of x.
inline double riesz_indicator_1d(double alpha, double a, double b, double x) {
  auto piece = [alpha](double t) { return std::pow(t, alpha) / alpha; };
  if (x <= a) return piece(b - x) - piece(a - x);
  if (x >= b) return piece(x - a) - piece(x - b);
  return piece(x - a) + piece(b - x);
}

// sup over r > 0 of r^{alpha - 1} |[x - r, x + r] ∩ [a, b]| by a dense
// geometric scan of radii.
inline double maximal_indicator_1d(double alpha, double a, double b, double x) {
  const double span = (b - a) + std::fabs(x - 0.5 * (a + b));
  double best = 0.0;
  const int steps = 200000;
  const double r_lo = span * 1e-6;
  const double ratio = std::pow(4.0 * span / r_lo, 1.0 / steps);
  double r = r_lo;
  for (int i = 0; i <= steps; ++i, r *= ratio) {
    const double overlap = std::max(0.0, std::min(x + r, b) - std::max(x - r, a));
    best = std::max(best, std::pow(r, alpha - 1.0) * overlap);
  }
  return best;
}

// Muckenhoupt product of w = |x|^beta over the centered cube [-h, h]:
// (avg w) (avg w^{1-p'})^{p-1}, exact through the antiderivative.
inline double ap_power_product_centered(double beta, double p, double h) {
  const double p_conj = p / (p - 1.0);
  const double a = power_mean_1d(beta, -h, h);
  const double b = power_mean_1d(beta * (1.0 - p_conj), -h, h);
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return a * std::pow(b, p - 1.0);
}

// Dyadic sweep h = 2^0 .. 2^{-12}: diverges when any level is non-finite
// or the products grow along the sweep (for pure powers they are
// scale-free, so growth never fires; the non-finite test decides).
inline bool ap_power_diverges(double beta, double p) {
  double prev = -1.0;
  for (int l = 0; l <= 12; ++l) {
    const double val = ap_power_product_centered(beta, p, std::ldexp(1.0, -l));
    if (!std::isfinite(val)) return true;
    if (prev > 0.0 && val > 1.15 * prev) return true;
    prev = val;
  }
  return false;
}

}  // namespace oracles
