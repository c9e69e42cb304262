#include "roughfrac/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "roughfrac/errors.hpp"

namespace roughfrac {

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw HypothesisViolation("p >= 1", "p = " + std::to_string(p));
}

// Cell weights via the spec, guarding poles on the support of f.
std::vector<double> weight_on_cells(const SampledFunction& f, const WeightSpec& w) {
  if (w.dim() != f.dim()) throw ConfigError("norm: weight dimension mismatch");
  const auto& v = f.values();
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;  // zero cells never contribute, poles there are fine
    const std::vector<double> c = f.cell_center(i);
    const double wi = w(std::span<const double>(c.data(), c.size()));
    if (!std::isfinite(wi))
      throw NonFiniteWeight("weight is non-finite on a support cell of the integrand");
    out[i] = wi;
  }
  return out;
}

}  // namespace

NormSpec NormSpec::strong(double p) { return NormSpec{NormKind::strong, p, std::nullopt}; }
NormSpec NormSpec::weak(double p) { return NormSpec{NormKind::weak, p, std::nullopt}; }
NormSpec NormSpec::weighted_multiplier(double p, WeightSpec w) {
  return NormSpec{NormKind::weighted_multiplier, p, std::move(w)};
}
NormSpec NormSpec::weighted_measure(double p, WeightSpec w) {
  return NormSpec{NormKind::weighted_measure, p, std::move(w)};
}

void NormSpec::validate() const {
  check_p(p);
  const bool weighted =
      kind == NormKind::weighted_multiplier || kind == NormKind::weighted_measure;
  if (weighted != w.has_value())
    throw ConfigError("norm spec: weight present iff the kind is weighted");
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case NormKind::strong:
      os << "L^" << p;
      break;
    case NormKind::weak:
      os << "weak-L^" << p;
      break;
    case NormKind::weighted_multiplier:
      os << "L^" << p << " multiplier " << w->describe();
      break;
    case NormKind::weighted_measure:
      os << "L^" << p << " measure " << w->describe();
      break;
  }
  return os.str();
}

double lp_norm(const SampledFunction& f, double p) {
  check_p(p);
  const auto& v = f.values();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::fabs(x));
    return mx;
  }
  const double h = f.cell_measure();
  double sum = 0.0;
  for (double x : v) {
    if (x != 0.0) sum += std::pow(std::fabs(x), p) * h;
  }
  return std::pow(sum, 1.0 / p);
}

double weak_lp_quasinorm(const SampledFunction& f, double p) {
  check_p(p);
  std::vector<double> mags;
  mags.reserve(f.values().size());
  for (double x : f.values())
    if (x != 0.0) mags.push_back(std::fabs(x));
  if (mags.empty()) return 0.0;
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  const double h = f.cell_measure();
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double best = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k)
    best = std::max(best, mags[k] * std::pow((k + 1) * h, inv_p));
  return best;
}

double weighted_norm(const SampledFunction& f, const NormSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case NormKind::strong:
      return lp_norm(f, spec.p);
    case NormKind::weak:
      return weak_lp_quasinorm(f, spec.p);
    case NormKind::weighted_multiplier: {
      const std::vector<double> wc = weight_on_cells(f, *spec.w);
      const auto& v = f.values();
      const double h = f.cell_measure();
      if (std::isinf(spec.p)) {
        double mx = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) mx = std::max(mx, std::fabs(v[i]) * wc[i]);
        return mx;
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) sum += std::pow(std::fabs(v[i]) * wc[i], spec.p) * h;
      }
      return std::pow(sum, 1.0 / spec.p);
    }
    case NormKind::weighted_measure: {
      const std::vector<double> wc = weight_on_cells(f, *spec.w);
      const auto& v = f.values();
      const double h = f.cell_measure();
      double sum = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) sum += std::pow(std::fabs(v[i]), spec.p) * wc[i] * h;
      }
      return std::pow(sum, 1.0 / spec.p);
    }
  }
  throw ConfigError("norm spec: unknown kind");
}

double weighted_weak_quasinorm(const SampledFunction& f, double p, const WeightSpec& u) {
  check_p(p);
  const std::vector<double> wc = weight_on_cells(f, u);
  const auto& v = f.values();
  struct Cell {
    double mag;
    double mass;
  };
  std::vector<Cell> cells;
  cells.reserve(v.size());
  const double h = f.cell_measure();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) cells.push_back({std::fabs(v[i]), wc[i] * h});
  if (cells.empty()) return 0.0;
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.mag > b.mag; });
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double mass = 0.0;
  double best = 0.0;
  for (const Cell& c : cells) {
    mass += c.mass;
    best = std::max(best, c.mag * std::pow(mass, inv_p));
  }
  return best;
}

}  // namespace roughfrac
