#include "roughfrac/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "roughfrac/block_geometry.hpp"
#include "roughfrac/errors.hpp"
#include "roughfrac/rng.hpp"

namespace roughfrac {

namespace {

std::string point_string(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t d = 0; d < x.size(); ++d) os << (d ? "," : "") << x[d];
  os << "]";
  return os.str();
}

void check_fields(const std::vector<SampledFunction>& f, const ExponentConfig& cfg,
                  std::span<const double> x) {
  if (static_cast<int>(f.size()) != cfg.m)
    throw ConfigError("operator: expected m = " + std::to_string(cfg.m) + " factors, got " +
                      std::to_string(f.size()));
  for (const auto& fi : f)
    if (fi.dim() != cfg.n) throw ConfigError("operator: factor dimension differs from n");
  if (static_cast<int>(x.size()) != cfg.n)
    throw ConfigError("operator: evaluation point dimension differs from n");
}

// Covering radius of the block support: the product vanishes unless every
// ||y_i|| stays within its factor's box radius, so |ybar| <= sum of them.
double support_bound(const std::vector<SampledFunction>& f, std::span<const double> x,
                     bool* any_zero) {
  double total = 0.0;
  *any_zero = false;
  for (const auto& fi : f) {
    if (fi.is_identically_zero()) {
      *any_zero = true;
      return 0.0;
    }
    total += fi.support_radius_from(x);
  }
  return total;
}

// The product vanishes on the block ball of this radius: each factor needs
// ||y_i|| at least the distance from x to its support box.
double support_floor(const std::vector<SampledFunction>& f, std::span<const double> x) {
  double total = 0.0;
  for (const auto& fi : f) total += fi.support_distance_from(x);
  return total;
}

// Shared integrand plumbing: y is the stacked (y_1,...,y_m) block vector,
// the factors are read at x - y_i.
struct ProductEvaluator {
  const std::vector<SampledFunction>& f;
  std::span<const double> x;
  int n;
  mutable std::vector<double> z;

  explicit ProductEvaluator(const std::vector<SampledFunction>& f_, std::span<const double> x_,
                            int n_)
      : f(f_), x(x_), n(n_), z(static_cast<std::size_t>(n_)) {}

  double signed_product(std::span<const double> y) const {
    double prod = 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (int d = 0; d < n; ++d) z[static_cast<std::size_t>(d)] = x[d] - y[i * n + d];
      prod *= f[i](std::span<const double>(z.data(), z.size()));
      if (prod == 0.0) return 0.0;
    }
    return prod;
  }
};

OperatorValue from_integration(const IntegrationResult& r) {
  OperatorValue v;
  v.value = r.value;
  v.err_est = r.err_est;
  v.evals = r.evals;
  v.converged = r.converged;
  v.budget_exceeded = r.budget_exceeded;
  return v;
}

// Core of the maximal operator, shared by the public entry point and the
// majorants, which need it at shifted orders.
OperatorValue maximal_core(const std::vector<SampledFunction>& f, const KernelSpec& k, int m,
                           int n, double alpha, std::span<const double> x,
                           const EvalSettings& settings) {
  settings.validate();
  const double mn = static_cast<double>(m) * n;
  if (!(alpha > 0.0 && alpha < mn))
    throw HypothesisViolation("0 < alpha < m*n", "alpha = " + std::to_string(alpha));

  bool any_zero = false;
  const double r_max = support_bound(f, x, &any_zero);
  if (any_zero || r_max == 0.0) return OperatorValue{};

  const std::vector<double> radii = settings.radii.resolve(r_max);
  const double r_floor = support_floor(f, x);
  const ProductEvaluator pe(f, x, n);
  auto integrand = [&](std::span<const double> y) {
    const double prod = pe.signed_product(y);
    if (prod == 0.0) return 0.0;
    return std::fabs(k.eval(y)) * std::fabs(prod);
  };

  OperatorValue out;
  int points = settings.points_per_shell;
  double prev_best = 0.0;
  bool have_prev = false;
  for (int round = 0;; ++round) {
    double ball = 0.0;
    double best = 0.0;
    double r_lo = 0.0;
    for (std::size_t kk = 0; kk < radii.size(); ++kk) {
      const double r_hi = radii[kk];
      if (r_hi <= r_floor) {  // the ball up to r_hi carries no mass
        r_lo = r_hi;
        continue;
      }
      ball += annulus_integral(integrand, m, n, r_lo, r_hi, points, settings.rule,
                               mix_seed(settings.seed,
                                        static_cast<std::uint64_t>(round) * 4096 + kk),
                               out.evals);
      best = std::max(best, std::pow(r_hi, alpha - mn) * ball);
      r_lo = r_hi;
      if (out.evals > settings.budget.max_evals) {
        out.value = std::max(best, prev_best);
        out.err_est = have_prev ? std::fabs(best - prev_best) : best;
        out.converged = false;
        out.budget_exceeded = true;
        return out;
      }
    }
    if (have_prev) {
      out.err_est = std::fabs(best - prev_best);
      const double scale = std::max(std::fabs(best), std::fabs(prev_best));
      if (out.err_est <= settings.quad_tol * scale || scale == 0.0) {
        out.value = best;
        out.converged = true;
        return out;
      }
    }
    prev_best = best;
    have_prev = true;
    out.value = best;
    points *= 2;
    if (round >= 40) {
      out.converged = false;
      return out;
    }
  }
}

OperatorValue integral_core(const std::vector<SampledFunction>& f, const KernelSpec& k, int m,
                            int n, double alpha, std::span<const double> x,
                            const EvalSettings& settings) {
  settings.validate();
  const double mn = static_cast<double>(m) * n;
  if (!(alpha > 0.0 && alpha < mn))
    throw HypothesisViolation("0 < alpha < m*n", "alpha = " + std::to_string(alpha));

  bool any_zero = false;
  const double r_max = support_bound(f, x, &any_zero);
  if (any_zero || r_max == 0.0) return OperatorValue{};

  const ProductEvaluator pe(f, x, n);
  auto integrand = [&](std::span<const double> y) {
    const double prod = pe.signed_product(y);
    if (prod == 0.0) return 0.0;
    return k.eval(y) * std::pow(block_norm(y, pe.f.size(), pe.n), alpha - mn) * prod;
  };

  ShellScheme scheme;
  scheme.delta = r_max;
  // Deep inner cutoff: the hole below 2^{j_min} r_max contributes O(2^{j_min alpha})
  // relatively, negligible against quad_tol even for small alpha.
  scheme.j_min = -80;
  scheme.j_max = -1;
  scheme.extend_outer = false;  // the support ends exactly at r_max
  scheme.r_floor = support_floor(f, x);
  scheme.points_per_shell = settings.points_per_shell;
  scheme.rule = settings.rule;
  scheme.seed = settings.seed;
  return from_integration(
      integrate_singular(integrand, m, n, scheme, settings.quad_tol, settings.budget));
}

}  // namespace

void RadialGrid::validate() const {
  if (rho < 1) throw ConfigError("radial grid: rho >= 1");
  if (is_auto()) {
    if (auto_octaves < 1) throw ConfigError("radial grid: auto_octaves >= 1");
    if (auto_octaves * rho > 4095) throw ConfigError("radial grid: auto_octaves * rho <= 4095");
  } else {
    if (k_min > k_max) throw ConfigError("radial grid: k_min <= k_max");
    if (k_max - k_min > 4095) throw ConfigError("radial grid: k_max - k_min <= 4095");
  }
}

std::vector<double> RadialGrid::resolve(double r_max_hint) const {
  validate();
  std::vector<double> radii;
  if (is_auto()) {
    if (!(r_max_hint > 0.0)) throw DomainError("radial grid: auto range needs a support bound");
    const int steps = auto_octaves * rho;
    radii.reserve(static_cast<std::size_t>(steps) + 1);
    for (int t = -steps; t <= 0; ++t)
      radii.push_back(r_max_hint * std::exp2(static_cast<double>(t) / rho));
    radii.back() = r_max_hint;  // top radius exact, not exp2(0) rounding
  } else {
    radii.reserve(static_cast<std::size_t>(k_max - k_min) + 1);
    for (int t = k_min; t <= k_max; ++t)
      radii.push_back(r0 * std::exp2(static_cast<double>(t) / rho));
  }
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw ConfigError("radial grid: radii must be increasing and positive");
  return radii;
}

double dyadic_slack_factor(int rho, double mn_minus_alpha) {
  if (rho < 1) throw ConfigError("radial grid: rho >= 1");
  if (!(mn_minus_alpha > 0.0)) throw HypothesisViolation("0 < alpha < m*n");
  return std::exp2(mn_minus_alpha / rho);
}

void EvalSettings::validate() const {
  if (!(quad_tol > 0.0)) throw ConfigError("settings: quad_tol > 0");
  if (points_per_shell < 2) throw ConfigError("settings: points_per_shell >= 2");
  radii.validate();
}

OperatorValue eval_integral_op(const std::vector<SampledFunction>& f, const KernelSpec& k,
                               const ExponentConfig& cfg, std::span<const double> x,
                               const EvalSettings& settings) {
  validate(cfg);
  check_fields(f, cfg, x);
  return integral_core(f, k, cfg.m, cfg.n, cfg.alpha, x, settings);
}

OperatorValue eval_maximal_op(const std::vector<SampledFunction>& f, const KernelSpec& k,
                              const ExponentConfig& cfg, std::span<const double> x,
                              const EvalSettings& settings) {
  validate(cfg);
  check_fields(f, cfg, x);
  return maximal_core(f, k, cfg.m, cfg.n, cfg.alpha, x, settings);
}

OperatorValue holder_majorant(const std::vector<SampledFunction>& f, const ExponentConfig& cfg,
                              std::span<const double> x, const EvalSettings& settings) {
  validate(cfg);
  check_fields(f, cfg, x);
  const double sp = cfg.s_prime;
  if (!(cfg.alpha * sp < cfg.mn()))
    throw HypothesisViolation("alpha*s' < m*n", "alpha*s' = " + std::to_string(cfg.alpha * sp));

  std::vector<SampledFunction> powered;
  powered.reserve(f.size());
  for (const auto& fi : f) powered.push_back(fi.abs_pow(sp));
  OperatorValue inner = maximal_core(powered, KernelSpec::constant(cfg.m, cfg.n, 1.0), cfg.m,
                                     cfg.n, cfg.alpha * sp, x, settings);
  // d(v^{1/s'}) = v^{1/s'-1}/s' dv propagates the inner error estimate.
  const double root = sp == 1.0 ? inner.value : std::pow(inner.value, 1.0 / sp);
  OperatorValue out = inner;
  out.value = root;
  out.err_est = inner.value > 0.0 && sp != 1.0
                    ? root / (sp * inner.value) * inner.err_est
                    : inner.err_est;
  return out;
}

WellandBound welland_majorant(const std::vector<SampledFunction>& f, const KernelSpec& k,
                              const ExponentConfig& cfg, std::span<const double> x, double eps,
                              const EvalSettings& settings) {
  validate(cfg);
  check_fields(f, cfg, x);
  const double mn = cfg.mn();
  if (!(eps > 0.0 && eps < std::min(cfg.alpha, mn - cfg.alpha)))
    throw HypothesisViolation("0 < eps < min{alpha, m*n - alpha}",
                              "eps = " + std::to_string(eps));

  WellandBound wb;
  wb.m_plus = maximal_core(f, k, cfg.m, cfg.n, cfg.alpha + eps, x, settings);
  wb.m_minus = maximal_core(f, k, cfg.m, cfg.n, cfg.alpha - eps, x, settings);
  wb.bound = std::sqrt(wb.m_plus.value) * std::sqrt(wb.m_minus.value);
  wb.c_proof = 2.0 * std::exp2(mn - cfg.alpha) / (1.0 - std::exp2(-eps));
  wb.delta_star = wb.m_plus.value > 0.0 && wb.m_minus.value > 0.0
                      ? std::pow(wb.m_plus.value / wb.m_minus.value, 1.0 / (2.0 * eps))
                      : 0.0;
  return wb;
}

OperatorId parse_operator_id(const std::string& token) {
  if (token == "I") return OperatorId::integral;
  if (token == "M") return OperatorId::maximal;
  if (token == "I_smooth") return OperatorId::integral_smooth;
  if (token == "M_smooth") return OperatorId::maximal_smooth;
  throw ConfigError("unknown operator '" + token + "' (expected I | M | I_smooth | M_smooth)");
}

std::vector<std::vector<double>> make_grid_points(const std::vector<double>& lo,
                                                  const std::vector<double>& hi,
                                                  const std::vector<int>& cells) {
  const int n = static_cast<int>(lo.size());
  if (static_cast<int>(hi.size()) != n || static_cast<int>(cells.size()) != n || n < 1)
    throw ConfigError("grid points: lo/hi/cells must share a positive dimension");
  double spacing = 0.0;
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    if (cells[d] < 1 || !(hi[d] > lo[d])) throw ConfigError("grid points: need hi > lo, cells >= 1");
    const double h = (hi[d] - lo[d]) / cells[d];
    if (d == 0)
      spacing = h;
    else if (std::fabs(h - spacing) > 1e-12 * spacing)
      throw ConfigError("grid points: all axes must share one cell width");
    total *= static_cast<std::size_t>(cells[d]);
  }
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) x[static_cast<std::size_t>(d)] = lo[d] + (idx[d] + 0.5) * spacing;
    pts.push_back(std::move(x));
    int d = n - 1;  // last axis fastest, matching the SampledFunction layout
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == cells[d]) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return pts;
}

FieldResult eval_field(OperatorId op, const std::vector<SampledFunction>& f, const KernelSpec& k,
                       const ExponentConfig& cfg, const EvalSettings& settings) {
  validate(cfg);
  if (settings.x_grid.empty()) throw ConfigError("eval_field: x_grid must be nonempty");
  const int n = cfg.n;
  for (const auto& x : settings.x_grid)
    if (static_cast<int>(x.size()) != n) throw ConfigError("eval_field: point dimension mismatch");

  // Reconstruct the uniform grid the points came from.
  std::vector<std::map<double, int>> axis(static_cast<std::size_t>(n));
  for (const auto& x : settings.x_grid)
    for (int d = 0; d < n; ++d) axis[static_cast<std::size_t>(d)].emplace(x[d], 0);
  std::vector<int> shape(static_cast<std::size_t>(n));
  double spacing = 1.0;
  bool have_spacing = false;
  for (int d = 0; d < n; ++d) {
    auto& m = axis[static_cast<std::size_t>(d)];
    shape[static_cast<std::size_t>(d)] = static_cast<int>(m.size());
    int i = 0;
    double prev = 0.0;
    for (auto& [coord, index] : m) {
      index = i;
      if (i > 0) {
        const double h = coord - prev;
        if (!have_spacing) {
          spacing = h;
          have_spacing = true;
        } else if (std::fabs(h - spacing) > 1e-9 * spacing) {
          throw ConfigError("eval_field: x_grid is not a uniform grid");
        }
      }
      prev = coord;
      ++i;
    }
  }
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(shape[static_cast<std::size_t>(d)]);
  if (total != settings.x_grid.size())
    throw ConfigError("eval_field: x_grid must enumerate a full grid without repeats");

  std::vector<double> origin(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d)
    origin[static_cast<std::size_t>(d)] = axis[static_cast<std::size_t>(d)].begin()->first - 0.5 * spacing;

  const bool smooth = op == OperatorId::integral_smooth || op == OperatorId::maximal_smooth;
  const bool maximal = op == OperatorId::maximal || op == OperatorId::maximal_smooth;
  const KernelSpec kernel = smooth ? KernelSpec::constant(cfg.m, cfg.n, 1.0) : k;

  std::vector<double> values(total, 0.0);
  std::vector<bool> seen(total, false);
  FieldResult res{SampledFunction(n, origin, spacing, shape, values, Interp::nearest)};
  for (const auto& x : settings.x_grid) {
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (int d = n - 1; d >= 0; --d) {
      flat += static_cast<std::size_t>(axis[static_cast<std::size_t>(d)].at(x[d])) * stride;
      stride *= static_cast<std::size_t>(shape[static_cast<std::size_t>(d)]);
    }
    if (seen[flat]) throw ConfigError("eval_field: repeated grid point");
    seen[flat] = true;
    try {
      const std::span<const double> xs(x.data(), x.size());
      const OperatorValue v = maximal
                                  ? maximal_core(f, kernel, cfg.m, cfg.n, cfg.alpha, xs, settings)
                                  : integral_core(f, kernel, cfg.m, cfg.n, cfg.alpha, xs, settings);
      values[flat] = v.value;
      res.evals += v.evals;
      res.converged = res.converged && v.converged;
      res.budget_exceeded = res.budget_exceeded || v.budget_exceeded;
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at x = " + point_string(x));
    }
  }
  res.field = SampledFunction(n, origin, spacing, shape, std::move(values), Interp::nearest);
  return res;
}

}  // namespace roughfrac
