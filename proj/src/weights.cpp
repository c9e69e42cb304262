#include "roughfrac/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "roughfrac/errors.hpp"
#include "roughfrac/exponents.hpp"
#include "roughfrac/rng.hpp"

namespace roughfrac {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// -------------------------------------------------------------- WeightSpec

WeightSpec WeightSpec::constant(int n, double c) {
  if (n < 1) throw ConfigError("weight: dim >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("weight: constant must be positive finite");
  WeightSpec w(n, WeightKind::constant);
  w.c_ = c;
  return w;
}

WeightSpec WeightSpec::power(int n, double beta) {
  if (n < 1) throw ConfigError("weight: dim >= 1");
  if (!std::isfinite(beta)) throw ConfigError("weight: power exponent must be finite");
  WeightSpec w(n, WeightKind::power);
  w.beta_ = beta;
  return w;
}

WeightSpec WeightSpec::piecewise(SampledFunction f, double exterior) {
  if (!(exterior > 0.0) || !std::isfinite(exterior))
    throw ConfigError("weight: exterior constant must be positive finite");
  for (double v : f.values())
    if (!(v > 0.0)) throw ConfigError("weight: piecewise grid values must be positive");
  WeightSpec w(f.dim(), WeightKind::piecewise);
  w.grid_ = std::make_shared<SampledFunction>(std::move(f));
  w.exterior_ = exterior;
  return w;
}

WeightSpec WeightSpec::product(std::vector<WeightSpec> factors) {
  if (factors.empty()) throw ConfigError("weight: product needs at least one factor");
  const int n = factors.front().dim();
  for (const auto& f : factors)
    if (f.dim() != n) throw ConfigError("weight: product factors must share a dimension");
  WeightSpec w(n, WeightKind::product);
  w.factors_ = std::move(factors);
  return w;
}

WeightSpec WeightSpec::parse(const std::string& spec, int n) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "constant") return constant(n, arg.empty() ? 1.0 : std::stod(arg));
    if (kind == "power") return power(n, std::stod(arg));
    if (kind == "pc") return piecewise(parse_generator(arg, n), 1.0);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("weight: cannot parse '" + spec + "'");
  }
  throw ConfigError("unknown weight spec '" + spec + "' (expected constant:c | power:beta | pc:<gen>)");
}

double WeightSpec::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DomainError("weight: point dimension mismatch");
  double v = 0.0;
  switch (kind_) {
    case WeightKind::constant:
      v = c_;
      break;
    case WeightKind::power: {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      v = beta_ == 0.0 ? 1.0 : std::pow(std::sqrt(r2), beta_);
      break;
    }
    case WeightKind::piecewise: {
      bool inside = true;
      for (int d = 0; d < n_; ++d)
        if (x[d] < grid_->box_lo(d) || x[d] >= grid_->box_hi(d)) {
          inside = false;
          break;
        }
      v = inside ? (*grid_)(x) : exterior_;
      break;
    }
    case WeightKind::product: {
      v = 1.0;
      for (const auto& f : factors_) v *= f(x);
      break;
    }
  }
  return exponent_ == 1.0 ? v : std::pow(v, exponent_);
}

double WeightSpec::operator()(double x) const {
  return (*this)(std::span<const double>(&x, 1));
}

bool WeightSpec::may_blow_up_at_origin() const {
  switch (kind_) {
    case WeightKind::constant:
      return false;
    case WeightKind::power:
      return beta_ * exponent_ < 0.0;
    case WeightKind::piecewise:
      return false;  // strictly positive values and exterior, any power stays bounded
    case WeightKind::product:
      for (const auto& f : factors_)
        if (f.may_blow_up_at_origin()) return true;
      return false;
  }
  return true;
}

WeightSpec WeightSpec::pow(double e) const {
  if (!std::isfinite(e)) throw ConfigError("weight: power must be finite");
  WeightSpec w = *this;
  switch (kind_) {
    case WeightKind::constant:
      w.c_ = std::pow(c_, e);
      break;
    case WeightKind::power:
      w.beta_ *= e;
      break;
    case WeightKind::piecewise:
      w.exponent_ *= e;
      break;
    case WeightKind::product:
      for (auto& f : w.factors_) f = f.pow(e);
      break;
  }
  return w;
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WeightKind::constant:
      os << "constant:" << c_;
      break;
    case WeightKind::power:
      os << "power:" << beta_;
      break;
    case WeightKind::piecewise:
      os << "pc[" << grid_->cell_count() << "]";
      if (exponent_ != 1.0) os << "^" << exponent_;
      break;
    case WeightKind::product: {
      os << "product(";
      for (std::size_t i = 0; i < factors_.size(); ++i)
        os << (i ? "," : "") << factors_[i].describe();
      os << ")";
      break;
    }
  }
  return os.str();
}

// -------------------------------------------------------------------- Cube

double Cube::volume(int n) const {
  double v = 1.0;
  for (int d = 0; d < n; ++d) v *= side;
  return v;
}

std::vector<double> Cube::center() const {
  std::vector<double> c(lo);
  for (double& x : c) x += 0.5 * side;
  return c;
}

std::string Cube::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << "Q(lo=[";
  for (std::size_t d = 0; d < lo.size(); ++d) os << (d ? "," : "") << lo[d];
  os << "], side=" << side << ")";
  return os.str();
}

// -------------------------------------------------------------- CubeFamily

CubeFamily CubeFamily::centered(int n, double half_extent, int level_max, int random_count,
                                std::uint64_t seed) {
  CubeFamily f;
  f.n = n;
  f.root_lo.assign(n, -half_extent);
  f.root_side = 2.0 * half_extent;
  f.level_min = 0;
  f.level_max = level_max;
  f.random_count = random_count;
  f.seed = seed;
  f.validate();
  return f;
}

void CubeFamily::validate() const {
  if (n < 1) throw ConfigError("cube family: n >= 1");
  if (static_cast<int>(root_lo.size()) != n) throw ConfigError("cube family: root corner size");
  if (!(root_side > 0.0)) throw ConfigError("cube family: root side must be positive");
  if (level_min < 0 || level_min > level_max) throw ConfigError("cube family: bad level range");
  if (random_count < 0) throw ConfigError("cube family: random_count >= 0");
  if (static_cast<double>(n) * level_max > 22.0)
    throw ConfigError("cube family: level grid too large (n*level_max <= 22)");
}

std::vector<Cube> CubeFamily::cubes_at_level(int level) const {
  if (level < level_min || level > level_max) throw ConfigError("cube family: level out of range");
  const int per_axis = 1 << level;
  const double side = root_side / per_axis;
  std::vector<Cube> cubes;
  cubes.reserve(static_cast<std::size_t>(std::pow(per_axis, n)));
  std::vector<int> idx(n, 0);
  for (;;) {
    Cube c;
    c.side = side;
    c.lo.resize(n);
    for (int d = 0; d < n; ++d) c.lo[d] = root_lo[d] + idx[d] * side;
    cubes.push_back(std::move(c));
    int d = 0;
    while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == n) break;
  }
  return cubes;
}

std::vector<Cube> CubeFamily::random_cubes() const {
  Rng rng(mix_seed(seed, 0xc0beULL));
  std::vector<Cube> cubes;
  cubes.reserve(random_count);
  for (int i = 0; i < random_count; ++i) {
    Cube c;
    // Log-uniform side in [root_side/2^level_max, root_side].
    c.side = root_side * std::pow(2.0, -rng.uniform(0.0, static_cast<double>(level_max)));
    c.lo.resize(n);
    for (int d = 0; d < n; ++d) c.lo[d] = root_lo[d] + rng.uniform() * (root_side - c.side);
    cubes.push_back(std::move(c));
  }
  return cubes;
}

// ----------------------------------------------------------- cube averages

namespace {

int refinement_cap(int n) {
  if (n == 1) return 8192;
  if (n == 2) return 256;
  return 32;
}

template <class F>
double midpoint_mean(F&& f, const Cube& cube, int n, int k) {
  const double h = cube.side / k;
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (;;) {
    for (int d = 0; d < n; ++d) x[d] = cube.lo[d] + (idx[d] + 0.5) * h;
    sum += f(std::span<const double>(x.data(), x.size()));
    int d = 0;
    while (d < n && ++idx[d] == k) idx[d++] = 0;
    if (d == n) break;
  }
  double count = 1.0;
  for (int d = 0; d < n; ++d) count *= k;
  return sum / count;
}

bool touches_origin(const Cube& cube, int n) {
  for (int d = 0; d < n; ++d)
    if (cube.lo[d] > 0.0 || cube.lo[d] + cube.side < 0.0) return false;
  return true;
}

double midpoint_box(const WeightSpec& w, const std::vector<double>& lo,
                    const std::vector<double>& hi, int n, int k) {
  std::vector<int> idx(n, 0);
  std::vector<double> x(n), h(n);
  double vol = 1.0;
  for (int d = 0; d < n; ++d) {
    h[d] = (hi[d] - lo[d]) / k;
    vol *= h[d];
  }
  double sum = 0.0;
  for (;;) {
    for (int d = 0; d < n; ++d) x[d] = lo[d] + (idx[d] + 0.5) * h[d];
    sum += w(std::span<const double>(x.data(), x.size()));
    int d = 0;
    while (d < n && ++idx[d] == k) idx[d++] = 0;
    if (d == n) break;
  }
  return sum * vol;
}

// Integral of w over {r/2 <= max_d |x_d| <= r} intersected with the cube.
// The sup-norm collar splits into 2n disjoint boxes and a box clipped by a
// cube is again a box, so every piece is integrated exactly on its own
// extent with k midpoint nodes per axis. No node comes closer to the
// origin than r/2 in sup norm.
double collar_integral(const WeightSpec& w, const Cube& cube, int n, double r, int k) {
  std::vector<double> blo(n), bhi(n);
  double total = 0.0;
  for (int d = 0; d < n; ++d) {
    for (int pm = 0; pm < 2; ++pm) {
      for (int e = 0; e < n; ++e) {
        if (e == d) {
          blo[e] = pm ? 0.5 * r : -r;
          bhi[e] = pm ? r : -0.5 * r;
        } else if (e < d) {
          blo[e] = -0.5 * r;
          bhi[e] = 0.5 * r;
        } else {
          blo[e] = -r;
          bhi[e] = r;
        }
      }
      bool empty = false;
      for (int e = 0; e < n; ++e) {
        blo[e] = std::max(blo[e], cube.lo[e]);
        bhi[e] = std::min(bhi[e], cube.lo[e] + cube.side);
        if (!(bhi[e] > blo[e])) {
          empty = true;
          break;
        }
      }
      if (!empty) total += midpoint_box(w, blo, bhi, n, k);
    }
  }
  return total;
}

struct CollarSweep {
  double total = 0.0;
  bool diverged = false;
};

// Sums collar integrals inward from the covering box. Near the origin the
// weight behaves like a power, so successive collar sums form a geometric
// sequence with ratio 2^{-(n+beta)}: below one the tail extrapolates and
// the integral is finite, at one or above it diverges. The ratios are read
// on the computed sums directly; quadrature error is scale-invariant in
// the power regime and cancels from them.
CollarSweep collar_sweep(const WeightSpec& w, const Cube& cube, int n, double r0, int k,
                         double tol) {
  CollarSweep out;
  double s_prev = -1.0;
  double rho_last = 0.0;
  double s_last = 0.0;
  int bad_run = 0;
  for (int j = 0; j < 160; ++j) {
    const double r = std::ldexp(r0, -j);
    const double s = collar_integral(w, cube, n, r, k);
    out.total += s;
    if (!std::isfinite(out.total)) {
      out.diverged = true;
      return out;
    }
    if (s > 0.0 && s_prev > 0.0) {
      const double rho = s / s_prev;
      rho_last = rho;
      if (rho >= 0.97) {
        if (++bad_run >= 6) {
          out.diverged = true;
          return out;
        }
      } else {
        bad_run = 0;
      }
      if (rho < 0.9) {
        const double tail = s * rho / (1.0 - rho);
        if (tail <= 0.25 * tol * out.total) {
          out.total += tail;
          return out;
        }
      }
    }
    if (s > 0.0) {
      s_prev = s;
      s_last = s;
    }
  }
  // Depth cap. Sustained near-unit ratios mean divergence; otherwise add
  // the geometric tail that remains.
  if (bad_run >= 3) {
    out.diverged = true;
  } else if (rho_last > 0.0 && rho_last < 1.0) {
    out.total += s_last * rho_last / (1.0 - rho_last);
  }
  return out;
}

CubeAverage pole_cube_average(const WeightSpec& w, const Cube& cube, int n, double quad_tol) {
  double r0 = 0.0;
  for (int d = 0; d < n; ++d)
    r0 = std::max({r0, std::fabs(cube.lo[d]), std::fabs(cube.lo[d] + cube.side)});
  CubeAverage out;
  double prev = 0.0;
  bool have_prev = false;
  for (int k = 4; k <= 64; k *= 2) {
    const CollarSweep sweep = collar_sweep(w, cube, n, r0, k, quad_tol);
    if (sweep.diverged) {
      out.value = sweep.total;
      out.non_integrable = true;
      return out;
    }
    const double cur = sweep.total / cube.volume(n);
    if (have_prev && std::fabs(cur - prev) <= quad_tol * std::max(std::fabs(cur), std::fabs(prev))) {
      out.value = cur;
      return out;
    }
    prev = cur;
    have_prev = true;
  }
  // Midpoint on pole-free boxes is second order; the cap value is close.
  out.value = prev;
  return out;
}

}  // namespace

CubeAverage cube_average(const WeightSpec& w, const Cube& cube, int n, double quad_tol) {
  if (w.may_blow_up_at_origin() && touches_origin(cube, n))
    return pole_cube_average(w, cube, n, quad_tol);
  const int cap = refinement_cap(n);
  std::vector<double> means;
  std::vector<double> deltas;
  CubeAverage out;
  for (int k = 1; k <= cap; k *= 2) {
    const double cur = midpoint_mean(w, cube, n, k);
    if (!std::isfinite(cur)) {
      // A node produced a non-finite value (overflowing power).
      out.value = cur;
      out.non_integrable = true;
      return out;
    }
    if (!means.empty()) {
      const double delta = std::fabs(cur - means.back());
      if (delta <= quad_tol * std::max(std::fabs(cur), std::fabs(means.back()))) {
        out.value = cur;
        return out;
      }
      deltas.push_back(delta);
    }
    means.push_back(cur);
  }
  // Unconverged at the cap. The weight is bounded on this cube, so stalls
  // come from jump edges drifting across the midpoint grid; that noise
  // rides on a decaying envelope, read on min-filtered blocks of three
  // rounds to see the envelope through the wobble.
  const std::size_t nd = deltas.size();
  if (nd >= 6) {
    const double last = std::min({deltas[nd - 3], deltas[nd - 2], deltas[nd - 1]});
    const double prior = std::min({deltas[nd - 6], deltas[nd - 5], deltas[nd - 4]});
    out.non_integrable = !(last < 0.94 * prior);
  } else if (nd >= 2) {
    out.non_integrable = !(deltas[nd - 1] < 0.97 * deltas[nd - 2]);
  } else {
    out.non_integrable = true;
  }
  // The last mean can sit on a bad edge alignment; the median of the last
  // three is steadier.
  const std::size_t nm = means.size();
  if (nm >= 3) {
    const double a = means[nm - 3];
    const double b = means[nm - 2];
    const double c = means[nm - 1];
    out.value = std::max(std::min(a, b), std::min(std::max(a, b), c));
  } else {
    out.value = means.back();
  }
  return out;
}

double cube_min(const WeightSpec& w, const Cube& cube, int n, double quad_tol) {
  const int cap = refinement_cap(n);
  double best = std::numeric_limits<double>::infinity();
  double prev = best;
  std::vector<int> idx;
  std::vector<double> x(n);
  for (int k = 2; k <= cap; k *= 2) {
    const double h = cube.side / k;
    idx.assign(n, 0);
    for (;;) {
      for (int d = 0; d < n; ++d) x[d] = cube.lo[d] + (idx[d] + 0.5) * h;
      best = std::min(best, w(x));
      int d = 0;
      while (d < n && ++idx[d] == k) idx[d++] = 0;
      if (d == n) break;
    }
    if (std::isfinite(prev) && prev - best <= quad_tol * std::fabs(prev)) break;
    prev = best;
  }
  return best;
}

// ------------------------------------------------------- family evaluation

namespace {

bool tail_ratio_rule(const std::vector<double>& s) {
  // Last three entries each exceed the prior by >= 1.5x.
  const std::size_t k = s.size();
  if (k < 4) return false;
  for (std::size_t i = k - 3; i < k; ++i) {
    if (!(s[i - 1] > 0.0) || !(s[i] >= 1.5 * s[i - 1])) return false;
  }
  return true;
}

bool monotone_trend_rule(const std::vector<double>& s) {
  // Longest strictly increasing suffix of length >= 4 with total growth >= 1.15.
  if (s.size() < 4) return false;
  std::size_t start = s.size() - 1;
  while (start > 0 && s[start - 1] < s[start] && std::isfinite(s[start - 1])) --start;
  const std::size_t len = s.size() - start;
  if (len < 4) return false;
  return s[start] > 0.0 && s.back() / s[start] >= 1.15;
}

bool divergent_level_trend(const std::vector<double>& per_level_sup) {
  std::vector<double> fwd = per_level_sup;
  std::vector<double> rev(per_level_sup.rbegin(), per_level_sup.rend());
  return tail_ratio_rule(fwd) || tail_ratio_rule(rev) || monotone_trend_rule(fwd) ||
         monotone_trend_rule(rev);
}

template <class PerCube>
ClassReport eval_on_family(const CubeFamily& fam, PerCube&& per_cube) {
  fam.validate();
  ClassReport rep;
  rep.level_min = fam.level_min;
  rep.sup_estimate = 0.0;
  bool have_argmax = false;
  auto consider = [&](const Cube& cube, int level) {
    ClassReport::CubeValue cv;
    cv.cube = cube;
    cv.level = level;
    per_cube(cube, cv.value, cv.non_integrable);
    if (cv.non_integrable) rep.any_non_integrable = true;
    if (!have_argmax || cv.value > rep.sup_estimate) {
      rep.sup_estimate = cv.value;
      rep.argmax_cube = cube;
      have_argmax = true;
    }
    rep.cube_values.push_back(std::move(cv));
    return rep.cube_values.back().value;
  };

  for (int level = fam.level_min; level <= fam.level_max; ++level) {
    double level_sup = 0.0;
    for (const Cube& cube : fam.cubes_at_level(level))
      level_sup = std::max(level_sup, consider(cube, level));
    rep.per_level_sup.push_back(level_sup);
  }
  for (const Cube& cube : fam.random_cubes())
    rep.random_sup = std::max(rep.random_sup, consider(cube, -1));

  rep.divergence_flag = rep.any_non_integrable || !std::isfinite(rep.sup_estimate) ||
                        divergent_level_trend(rep.per_level_sup);
  return rep;
}

}  // namespace

// ---------------------------------------------------------- class constants

ClassReport ap_constant(const WeightSpec& w, double p, const CubeFamily& fam, double quad_tol) {
  if (!(p > 1.0) || !std::isfinite(p)) throw HypothesisViolation("1 < p < infinity", "p = " + fmt(p));
  const double p_conj = conjugate_exponent(p);
  const WeightSpec w_dual = w.pow(1.0 - p_conj);
  return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
    const CubeAverage a = cube_average(w, cube, fam.n, quad_tol);
    const CubeAverage b = cube_average(w_dual, cube, fam.n, quad_tol);
    ni = a.non_integrable || b.non_integrable;
    value = a.value * std::pow(b.value, p - 1.0);
  });
}

ClassReport apq_constant(const WeightSpec& w, double p, double q, const CubeFamily& fam,
                         double quad_tol) {
  if (!(p > 1.0) || !(p <= q) || !std::isfinite(q))
    throw HypothesisViolation("1 < p <= q < infinity", "p = " + fmt(p) + ", q = " + fmt(q));
  const double p_conj = conjugate_exponent(p);
  const WeightSpec w_q = w.pow(q);
  const WeightSpec w_dual = w.pow(-p_conj);
  return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
    const CubeAverage a = cube_average(w_q, cube, fam.n, quad_tol);
    const CubeAverage b = cube_average(w_dual, cube, fam.n, quad_tol);
    ni = a.non_integrable || b.non_integrable;
    value = std::pow(a.value, 1.0 / q) * std::pow(b.value, 1.0 / p_conj);
  });
}

ClassReport pair_alpha_constant(const WeightSpec& u, const WeightSpec& v, double p, double q,
                                double alpha, const CubeFamily& fam, double quad_tol) {
  if (!(p >= 1.0) || !(p <= q) || !std::isfinite(q))
    throw HypothesisViolation("1 <= p <= q < infinity", "p = " + fmt(p) + ", q = " + fmt(q));
  if (!(alpha >= 0.0 && alpha < fam.n))
    throw HypothesisViolation("0 <= alpha < n", "alpha = " + fmt(alpha));
  // Reported per cube as the q-th power of the defining display so that the
  // diagonal (u, u, p, p, 0) coincides with ap_constant cube for cube.
  const double vol_exp = q * (1.0 / q + alpha / fam.n - 1.0 / p);
  if (p == 1.0) {
    return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
      const CubeAverage a = cube_average(u, cube, fam.n, quad_tol);
      const double inf_v = cube_min(v, cube, fam.n, quad_tol);
      ni = a.non_integrable || !(inf_v > 0.0);
      value = std::pow(cube.volume(fam.n), vol_exp) * a.value / std::pow(inf_v, q);
    });
  }
  const double p_conj = conjugate_exponent(p);
  const WeightSpec v_dual = v.pow(1.0 - p_conj);
  return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
    const CubeAverage a = cube_average(u, cube, fam.n, quad_tol);
    const CubeAverage b = cube_average(v_dual, cube, fam.n, quad_tol);
    ni = a.non_integrable || b.non_integrable;
    value = std::pow(cube.volume(fam.n), vol_exp) * a.value * std::pow(b.value, q / p_conj);
  });
}

namespace {

void check_bump_params(const BumpParams& bp, int n, bool need_p) {
  if (bp.m < 1) throw HypothesisViolation("m >= 1");
  if (!(bp.s_prime >= 1.0)) throw HypothesisViolation("s' >= 1", "s' = " + fmt(bp.s_prime));
  if (!(bp.r_i > 1.0)) throw HypothesisViolation("r_i > 1", "r_i = " + fmt(bp.r_i));
  if (!(bp.alpha > 0.0 && bp.alpha < static_cast<double>(bp.m) * n))
    throw HypothesisViolation("0 < alpha < m*n", "alpha = " + fmt(bp.alpha));
  if (need_p) {
    if (!(bp.s_prime < bp.p_i && bp.p_i < bp.m * bp.p))
      throw HypothesisViolation("s' < p_i < m*p",
                                "p_i = " + fmt(bp.p_i) + ", s' = " + fmt(bp.s_prime) +
                                    ", m*p = " + fmt(bp.m * bp.p));
  } else {
    if (!(bp.s_prime < bp.p_i && bp.p_i < bp.q_i))
      throw HypothesisViolation("s' < p_i < q_i", "p_i = " + fmt(bp.p_i) + ", s' = " +
                                                      fmt(bp.s_prime) + ", q_i = " + fmt(bp.q_i));
  }
}

}  // namespace

ClassReport maximal_bump_constant(const WeightSpec& u, const WeightSpec& v, const BumpParams& bp,
                                  const CubeFamily& fam, double quad_tol) {
  check_bump_params(bp, fam.n, /*need_p=*/false);
  const double sp = bp.s_prime;
  const double t_conj = conjugate_exponent(bp.p_i / sp);
  const double vol_exp = sp / bp.q_i + bp.alpha * sp / (bp.m * fam.n) - sp / bp.p_i;
  const WeightSpec v_bumped = v.pow(bp.r_i * (1.0 - t_conj));
  return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
    const CubeAverage a = cube_average(u, cube, fam.n, quad_tol);
    const CubeAverage b = cube_average(v_bumped, cube, fam.n, quad_tol);
    ni = a.non_integrable || b.non_integrable;
    value = std::pow(cube.volume(fam.n), vol_exp) * std::pow(a.value, sp / bp.q_i) *
            std::pow(b.value, 1.0 / (bp.r_i * t_conj));
  });
}

ClassReport integral_bump_constant(const WeightSpec& u, const WeightSpec& v, const BumpParams& bp,
                                   const CubeFamily& fam, double quad_tol) {
  check_bump_params(bp, fam.n, /*need_p=*/true);
  const double sp = bp.s_prime;
  const double t_conj = conjugate_exponent(bp.p_i / sp);
  const double mp = bp.m * bp.p;
  const double vol_exp = sp / mp + bp.alpha * sp / (bp.m * fam.n) - sp / bp.p_i;
  const WeightSpec u_bumped = u.pow(bp.r_i);
  const WeightSpec v_bumped = v.pow(bp.r_i * (1.0 - t_conj));
  return eval_on_family(fam, [&](const Cube& cube, double& value, bool& ni) {
    const CubeAverage a = cube_average(u_bumped, cube, fam.n, quad_tol);
    const CubeAverage b = cube_average(v_bumped, cube, fam.n, quad_tol);
    ni = a.non_integrable || b.non_integrable;
    value = std::pow(cube.volume(fam.n), vol_exp) * std::pow(a.value, sp / (bp.r_i * mp)) *
            std::pow(b.value, 1.0 / (bp.r_i * t_conj));
  });
}

BumpImplicationResult bump_implies_pair_check(const WeightSpec& u, const WeightSpec& v,
                                              const BumpParams& bp, const CubeFamily& fam,
                                              double quad_tol) {
  BumpImplicationResult res;
  res.bump = maximal_bump_constant(u, v, bp, fam, quad_tol);
  res.precondition_ok = !res.bump.divergence_flag && std::isfinite(res.bump.sup_estimate);
  if (!res.precondition_ok) return res;
  const double sp = bp.s_prime;
  res.pair = pair_alpha_constant(u, v, bp.p_i / sp, bp.q_i / sp, bp.alpha * sp / bp.m, fam,
                                 quad_tol);
  res.holds = !res.pair.divergence_flag && std::isfinite(res.pair.sup_estimate);
  res.margin = res.pair.sup_estimate / res.bump.sup_estimate;
  return res;
}

EpsilonSearchResult perturb_epsilon_search(const WeightSpec& w, double p, double q, double alpha,
                                           double s_prime, const CubeFamily& fam,
                                           const std::vector<double>& eps_grid, double quad_tol) {
  const int n = fam.n;
  if (!(s_prime >= 1.0)) throw HypothesisViolation("s' >= 1", "s' = " + fmt(s_prime));
  if (!(p > s_prime)) throw HypothesisViolation("s' < p", "p = " + fmt(p));
  if (!(alpha > 0.0 && alpha < n)) throw HypothesisViolation("0 < alpha < n", "alpha = " + fmt(alpha));
  if (std::fabs(1.0 / q - (1.0 / p - alpha / n)) > 1e-12)
    throw HypothesisViolation("1/q = 1/p - alpha/n", "q = " + fmt(q));
  const double q_conj = conjugate_exponent(q);
  const double bound = std::min({alpha, n / p - alpha, n / q_conj});
  for (double e : eps_grid)
    if (!(e > 0.0 && e < bound))
      throw HypothesisViolation("0 < eps < min{alpha, n/p - alpha, n/q'}",
                                "eps = " + fmt(e) + ", bound = " + fmt(bound));

  const WeightSpec ws = w.pow(s_prime);
  const ClassReport base = apq_constant(ws, p / s_prime, q / s_prime, fam, quad_tol);
  if (base.divergence_flag || !std::isfinite(base.sup_estimate))
    throw HypothesisViolation("w^{s'} in the two-exponent class at (p/s', q/s')",
                              "base class constant diverges on the family");

  EpsilonSearchResult out;
  for (double e : eps_grid) {
    EpsilonSearchResult::PerEps pe;
    pe.eps = e;
    pe.q_plus = 1.0 / (1.0 / p - (alpha + e) / n);
    pe.q_minus = 1.0 / (1.0 / p - (alpha - e) / n);
    pe.plus_report = apq_constant(ws, p / s_prime, pe.q_plus / s_prime, fam, quad_tol);
    pe.minus_report = apq_constant(ws, p / s_prime, pe.q_minus / s_prime, fam, quad_tol);
    pe.feasible = !pe.plus_report.divergence_flag && !pe.minus_report.divergence_flag &&
                  std::isfinite(pe.plus_report.sup_estimate) &&
                  std::isfinite(pe.minus_report.sup_estimate);
    if (pe.feasible && e > out.eps_best) {
      out.eps_best = e;
      out.found = true;
    }
    out.grid.push_back(std::move(pe));
  }
  return out;
}

}  // namespace roughfrac
