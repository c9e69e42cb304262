#include "roughfrac/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "roughfrac/errors.hpp"
#include "roughfrac/rng.hpp"

namespace roughfrac {

namespace {

void check_dims(int m, int n) {
  if (m < 1 || n < 1) throw ConfigError("kernel: m and n must be >= 1");
}

}  // namespace

KernelSpec KernelSpec::constant(int m, int n, double c) {
  check_dims(m, n);
  if (!std::isfinite(c)) throw ConfigError("kernel: constant value must be finite");
  KernelSpec k(m, n, KernelKind::constant);
  k.c_ = c;
  return k;
}

KernelSpec KernelSpec::first_coord_power(int m, int n, double gamma) {
  check_dims(m, n);
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ConfigError("kernel: power exponent must be finite and >= 0");
  KernelSpec k(m, n, KernelKind::first_coord_power);
  k.gamma_ = gamma;
  return k;
}

KernelSpec KernelSpec::sign_pattern(int m, int n, int axis) {
  check_dims(m, n);
  if (axis < 0 || axis >= m * n) throw ConfigError("kernel: sign axis out of range");
  KernelSpec k(m, n, KernelKind::sign_pattern);
  k.axis_ = axis;
  return k;
}

KernelSpec KernelSpec::tabulated(int m, int n, std::vector<SphereSample> samples) {
  check_dims(m, n);
  if (samples.empty()) throw ConfigError("kernel: tabulated needs at least one sample");
  for (auto& s : samples) {
    if (static_cast<int>(s.direction.size()) != m * n)
      throw ConfigError("kernel: tabulated direction dimension mismatch");
    double norm2 = 0.0;
    for (double c : s.direction) norm2 += c * c;
    if (std::fabs(norm2 - 1.0) > 1e-9)
      throw ConfigError("kernel: tabulated directions must be unit vectors");
    if (!std::isfinite(s.value)) throw ConfigError("kernel: tabulated values must be finite");
  }
  KernelSpec k(m, n, KernelKind::tabulated);
  k.samples_ = std::move(samples);
  return k;
}

KernelSpec KernelSpec::parse(const std::string& spec, int m, int n) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "constant") return constant(m, n, arg.empty() ? 1.0 : std::stod(arg));
    if (kind == "power") return first_coord_power(m, n, std::stod(arg));
    if (kind == "sign") return sign_pattern(m, n, arg.empty() ? 0 : std::stoi(arg));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("kernel: cannot parse argument in '" + spec + "'");
  }
  throw ConfigError("unknown kernel spec '" + spec + "' (expected constant:c | power:g | sign:axis)");
}

double KernelSpec::eval(std::span<const double> ybar) const {
  if (static_cast<int>(ybar.size()) != ambient_dim())
    throw DomainError("kernel: point dimension mismatch");
  if (kind_ == KernelKind::constant) return c_;

  double norm2 = 0.0;
  for (double c : ybar) norm2 += c * c;
  if (norm2 == 0.0) throw DomainError("kernel has no value at the origin");
  const double norm = std::sqrt(norm2);

  switch (kind_) {
    case KernelKind::first_coord_power: {
      const double t = std::fabs(ybar[0]) / norm;
      if (t == 0.0 && gamma_ > 0.0) return std::numeric_limits<double>::infinity();
      return gamma_ == 0.0 ? 1.0 : std::pow(t, -gamma_);
    }
    case KernelKind::sign_pattern: {
      const double c = ybar[axis_];
      return c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
    }
    case KernelKind::tabulated: {
      // Nearest tabulated direction by inner product.
      double best = -2.0;
      double val = 0.0;
      for (const auto& s : samples_) {
        double dot = 0.0;
        for (std::size_t i = 0; i < ybar.size(); ++i) dot += ybar[i] * s.direction[i];
        dot /= norm;
        if (dot > best) {
          best = dot;
          val = s.value;
        }
      }
      return val;
    }
    case KernelKind::constant:
      break;
  }
  return c_;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case KernelKind::constant:
      os << "constant:" << c_;
      break;
    case KernelKind::first_coord_power:
      os << "power:" << gamma_;
      break;
    case KernelKind::sign_pattern:
      os << "sign:" << axis_;
      break;
    case KernelKind::tabulated:
      os << "tabulated[" << samples_.size() << "]";
      break;
  }
  return os.str();
}

double sphere_surface(int d) {
  if (d < 1) throw DomainError("sphere_surface requires d >= 1");
  // 2 pi^{d/2} / Gamma(d/2); d = 1 gives 2 (the two-point sphere S^0).
  return 2.0 * std::pow(3.14159265358979323846, 0.5 * d) / std::tgamma(0.5 * d);
}

SphereNormEstimate kernel_sphere_norm(const KernelSpec& k, double s, int samples,
                                      std::uint64_t seed) {
  if (!(s > 1.0) || std::isinf(s))
    throw HypothesisViolation("1 < s < infinity", "sphere norm needs a finite exponent");
  if (samples < 8) throw ConfigError("kernel_sphere_norm: need at least 8 samples");

  const int d = k.ambient_dim();
  Rng rng(mix_seed(seed, 0x5357ULL));
  std::vector<double> point(d);

  // Running mean of |Omega|^s over uniform sphere points, checkpointed at
  // samples/4, samples/2, samples.
  const double surface = sphere_surface(d);
  double sum = 0.0;
  long count = 0;
  const long c1 = samples / 4, c2 = samples / 2, c3 = samples;
  SphereNormEstimate out;
  auto checkpoint = [&]() {
    const double mean = sum / static_cast<double>(count);
    out.doubling_estimates.push_back(std::pow(surface * mean, 1.0 / s));
  };
  for (long i = 0; i < c3; ++i) {
    if (d == 1) {
      point[0] = rng.coin() ? 1.0 : -1.0;
    } else {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int j = 0; j < d; ++j) {
          point[j] = rng.normal();
          norm2 += point[j] * point[j];
        }
      } while (norm2 == 0.0);
      const double inv = 1.0 / std::sqrt(norm2);
      for (int j = 0; j < d; ++j) point[j] *= inv;
    }
    double v = std::fabs(k.eval(point));
    if (std::isinf(v)) v = 1e300;  // direction exactly on the singular set
    sum += std::pow(v, s);
    ++count;
    if (count == c1 || count == c2 || count == c3) checkpoint();
  }

  out.value = out.doubling_estimates.back();
  const double prev = out.doubling_estimates[out.doubling_estimates.size() - 2];
  if (prev > 0.0 && out.value > prev * 1.10) out.non_integrable = true;
  if (!std::isfinite(out.value)) out.non_integrable = true;
  return out;
}

}  // namespace roughfrac
