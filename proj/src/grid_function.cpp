#include "roughfrac/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "roughfrac/errors.hpp"
#include "roughfrac/rng.hpp"

namespace roughfrac {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<int> parse_csv_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_csv_doubles(s)) {
    if (v != std::floor(v)) throw ConfigError("expected integer, got '" + fmt17(v) + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

SampledFunction::SampledFunction(int dim, std::vector<double> origin, double spacing,
                                 std::vector<int> shape, std::vector<double> values,
                                 Interp interp)
    : dim_(dim),
      origin_(std::move(origin)),
      spacing_(spacing),
      shape_(std::move(shape)),
      values_(std::move(values)),
      interp_(interp) {
  if (dim_ < 1) throw ConfigError("SampledFunction: dim must be >= 1");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
    throw ConfigError("SampledFunction: spacing must be positive and finite");
  if (static_cast<int>(origin_.size()) != dim_ || static_cast<int>(shape_.size()) != dim_)
    throw ConfigError("SampledFunction: origin/shape length must equal dim");
  std::size_t total = 1;
  for (int d = 0; d < dim_; ++d) {
    if (shape_[d] < 1) throw ConfigError("SampledFunction: shape entries must be >= 1");
    if (!std::isfinite(origin_[d])) throw ConfigError("SampledFunction: origin must be finite");
    total *= static_cast<std::size_t>(shape_[d]);
  }
  if (values_.size() != total)
    throw ConfigError("SampledFunction: got " + std::to_string(values_.size()) +
                      " values for shape product " + std::to_string(total));
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("SampledFunction: values must be finite");
  stride_.assign(dim_, 1);
  for (int d = dim_ - 2; d >= 0; --d)
    stride_[d] = stride_[d + 1] * static_cast<std::size_t>(shape_[d + 1]);
}

double SampledFunction::cell_measure() const {
  double h = 1.0;
  for (int d = 0; d < dim_; ++d) h *= spacing_;
  return h;
}

std::vector<double> SampledFunction::cell_center(std::size_t flat) const {
  std::vector<double> c(dim_);
  for (int d = 0; d < dim_; ++d) {
    const std::size_t idx = (flat / stride_[d]) % static_cast<std::size_t>(shape_[d]);
    c[d] = origin_[d] + (static_cast<double>(idx) + 0.5) * spacing_;
  }
  return c;
}

double SampledFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DomainError("SampledFunction: point dimension mismatch");
  if (interp_ == Interp::nearest) {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) {
      const double t = (x[d] - origin_[d]) / spacing_;
      if (t < 0.0 || t >= static_cast<double>(shape_[d])) return 0.0;
      flat += static_cast<std::size_t>(t) * stride_[d];
    }
    return values_[flat];
  }
  // Multilinear between cell centers, zero ghost cells outside the box.
  int base[8];
  double frac[8];
  for (int d = 0; d < dim_; ++d) {
    const double t = (x[d] - origin_[d]) / spacing_;
    if (t < 0.0 || t >= static_cast<double>(shape_[d])) return 0.0;
    const double u = t - 0.5;
    const double fl = std::floor(u);
    base[d] = static_cast<int>(fl);
    frac[d] = u - fl;
  }
  double acc = 0.0;
  const int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    bool ghost = false;
    for (int d = 0; d < dim_; ++d) {
      const int bit = (c >> d) & 1;
      const int idx = base[d] + bit;
      w *= bit ? frac[d] : 1.0 - frac[d];
      if (idx < 0 || idx >= shape_[d]) {
        ghost = true;
        break;
      }
      flat += static_cast<std::size_t>(idx) * stride_[d];
    }
    if (!ghost && w != 0.0) acc += w * values_[flat];
  }
  return acc;
}

double SampledFunction::operator()(double x) const {
  return (*this)(std::span<const double>(&x, 1));
}

bool SampledFunction::is_identically_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double SampledFunction::support_radius_from(std::span<const double> x) const {
  double r2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double far = std::max(std::fabs(x[d] - box_lo(d)), std::fabs(x[d] - box_hi(d)));
    r2 += far * far;
  }
  return std::sqrt(r2);
}

double SampledFunction::support_distance_from(std::span<const double> x) const {
  double r2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double gap = std::max({0.0, box_lo(d) - x[d], x[d] - box_hi(d)});
    r2 += gap * gap;
  }
  return std::sqrt(r2);
}

SampledFunction SampledFunction::transformed(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) v[i] = fn(values_[i]);
  return SampledFunction(dim_, origin_, spacing_, shape_, std::move(v), interp_);
}

SampledFunction SampledFunction::abs_pow(double e) const {
  if (e == 1.0) return transformed([](double v) { return std::fabs(v); });
  return transformed([e](double v) { return v == 0.0 ? 0.0 : std::pow(std::fabs(v), e); });
}

SampledFunction SampledFunction::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("dilation factor must be positive");
  std::vector<double> o(origin_);
  for (double& c : o) c /= lambda;
  return SampledFunction(dim_, std::move(o), spacing_ / lambda, shape_, values_, interp_);
}

// ---------------------------------------------------------------- SFN v1 --

void SampledFunction::write_sfn(std::ostream& out) const {
  out << "SFN v1 dim=" << dim_ << " shape=";
  for (int d = 0; d < dim_; ++d) out << (d ? "," : "") << shape_[d];
  out << " origin=";
  for (int d = 0; d < dim_; ++d) out << (d ? "," : "") << fmt17(origin_[d]);
  out << " spacing=" << fmt17(spacing_)
      << " interp=" << (interp_ == Interp::nearest ? "nearest" : "multilinear") << "\n";
  for (std::size_t i = 0; i < values_.size(); ++i) out << fmt17(values_[i]) << "\n";
}

void SampledFunction::write_sfn_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_sfn(out);
}

SampledFunction SampledFunction::read_sfn(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("SFN: empty stream");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "SFN" || version != "v1")
    throw ConfigError("SFN: expected header 'SFN v1', got '" + header + "'");

  int dim = -1;
  std::vector<int> shape;
  std::vector<double> origin;
  double spacing = 0.0;
  Interp interp = Interp::nearest;
  bool saw_dim = false, saw_shape = false, saw_origin = false, saw_spacing = false,
       saw_interp = false;
  std::string tok;
  while (hs >> tok) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("SFN: malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "dim") {
      dim = parse_csv_ints(val).at(0);
      saw_dim = true;
    } else if (key == "shape") {
      shape = parse_csv_ints(val);
      saw_shape = true;
    } else if (key == "origin") {
      origin = parse_csv_doubles(val);
      saw_origin = true;
    } else if (key == "spacing") {
      spacing = parse_csv_doubles(val).at(0);
      saw_spacing = true;
    } else if (key == "interp") {
      if (val == "nearest")
        interp = Interp::nearest;
      else if (val == "multilinear")
        interp = Interp::multilinear;
      else
        throw ConfigError("SFN: unknown interp '" + val + "'");
      saw_interp = true;
    } else {
      throw ConfigError("SFN: unknown header key '" + key + "'");
    }
  }
  if (!(saw_dim && saw_shape && saw_origin && saw_spacing && saw_interp))
    throw ConfigError("SFN: header must carry dim, shape, origin, spacing, interp");

  std::size_t total = 1;
  for (int k : shape) {
    if (k < 1) throw ConfigError("SFN: shape entries must be >= 1");
    total *= static_cast<std::size_t>(k);
  }
  std::vector<double> values;
  values.reserve(total);
  double v;
  while (values.size() < total && in >> v) values.push_back(v);
  if (values.size() != total)
    throw ConfigError("SFN: expected " + std::to_string(total) + " values, got " +
                      std::to_string(values.size()));
  std::string rest;
  if (in >> rest) throw ConfigError("SFN: trailing content '" + rest + "'");
  return SampledFunction(dim, std::move(origin), spacing, std::move(shape), std::move(values),
                         interp);
}

SampledFunction SampledFunction::read_sfn_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_sfn(in);
}

// ------------------------------------------------------------- generators --

namespace {

void check_box(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("generator: box corner size mismatch");
  for (std::size_t d = 0; d < a.size(); ++d)
    if (!(a[d] < b[d])) throw ConfigError("generator: box requires a < b per axis");
}

// Per-axis spacing must be uniform; pick it from axis 0 and require the
// other axes to be integer multiples of it in extent.
double uniform_spacing(const std::vector<double>& a, const std::vector<double>& b,
                       int cells_per_axis) {
  const double h = (b[0] - a[0]) / cells_per_axis;
  for (std::size_t d = 1; d < a.size(); ++d) {
    const double cells = (b[d] - a[d]) / h;
    if (std::fabs(cells - std::round(cells)) > 1e-9 * cells)
      throw ConfigError("generator: box extents must share a uniform grid spacing");
  }
  return h;
}

template <class F>
SampledFunction tabulate(std::vector<double> a, const std::vector<double>& b,
                         int cells_per_axis, Interp interp, F&& f) {
  check_box(a, b);
  const int dim = static_cast<int>(a.size());
  const double h = uniform_spacing(a, b, cells_per_axis);
  std::vector<int> shape(dim);
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) {
    shape[d] = static_cast<int>(std::round((b[d] - a[d]) / h));
    total *= static_cast<std::size_t>(shape[d]);
  }
  std::vector<double> values(total);
  std::vector<double> x(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int d = dim - 1; d >= 0; --d) {
      const std::size_t idx = rem % static_cast<std::size_t>(shape[d]);
      rem /= static_cast<std::size_t>(shape[d]);
      x[d] = a[d] + (static_cast<double>(idx) + 0.5) * h;
    }
    values[flat] = f(x);
  }
  return SampledFunction(dim, std::move(a), h, std::move(shape), std::move(values), interp);
}

}  // namespace

SampledFunction make_indicator(std::vector<double> a, std::vector<double> b,
                               int cells_per_axis) {
  return tabulate(std::move(a), b, cells_per_axis, Interp::nearest,
                  [](const std::vector<double>&) { return 1.0; });
}

SampledFunction make_tent(std::vector<double> a, std::vector<double> b, int cells_per_axis) {
  std::vector<double> mid(a.size()), halfw(a.size());
  for (std::size_t d = 0; d < a.size(); ++d) {
    mid[d] = 0.5 * (a[d] + b[d]);
    halfw[d] = 0.5 * (b[d] - a[d]);
  }
  return tabulate(std::move(a), b, cells_per_axis, Interp::multilinear,
                  [&](const std::vector<double>& x) {
                    double v = 1.0;
                    for (std::size_t d = 0; d < x.size(); ++d)
                      v *= std::max(0.0, 1.0 - std::fabs(x[d] - mid[d]) / halfw[d]);
                    return v;
                  });
}

SampledFunction make_power(double beta, std::vector<double> a, std::vector<double> b,
                           int cells_per_axis) {
  const double h = (b[0] - a[0]) / cells_per_axis;
  return tabulate(std::move(a), b, cells_per_axis, Interp::nearest,
                  [beta, h](const std::vector<double>& x) {
                    double r2 = 0.0;
                    for (double c : x) r2 += c * c;
                    double v = std::pow(std::sqrt(r2), beta);
                    if (!std::isfinite(v)) {
                      // Cell centered exactly on the singular point: sample
                      // off-center so grid values stay finite.
                      double r2n = h * h / 64.0;
                      for (double c : x) r2n += c * c;
                      v = std::pow(std::sqrt(r2n), beta);
                    }
                    return v;
                  });
}

SampledFunction make_random_pc(int dim, int cells_per_axis, std::uint64_t seed) {
  if (dim < 1 || cells_per_axis < 1) throw ConfigError("randpc: bad dimensions");
  Rng rng(mix_seed(seed, 0x7063ULL));
  std::vector<int> shape(dim, cells_per_axis);
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(cells_per_axis);
  std::vector<double> values(total);
  for (std::size_t i = 0; i < total; ++i) values[i] = rng.coin() ? 1.0 : -1.0;
  return SampledFunction(dim, std::vector<double>(dim, -1.0), 2.0 / cells_per_axis,
                         std::move(shape), std::move(values), Interp::nearest);
}

SampledFunction parse_generator(const std::string& spec, int dim) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t next = spec.find(':', pos);
    parts.push_back(spec.substr(pos, next == std::string::npos ? next : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (parts.empty()) throw ConfigError("empty generator spec");
  const std::string& kind = parts[0];

  // Corner fields a and b must agree in arity: both single scalars (broadcast
  // across axes) or both full dim-length lists.
  auto expand_corners = [dim](const std::string& ta, const std::string& tb) {
    std::vector<double> a = parse_csv_doubles(ta);
    std::vector<double> b = parse_csv_doubles(tb);
    if (a.size() != b.size())
      throw ConfigError("generator: corners '" + ta + "' and '" + tb +
                        "' must have the same number of coordinates");
    if (static_cast<int>(a.size()) == 1 && dim > 1) {
      a.assign(dim, a[0]);
      b.assign(dim, b[0]);
    }
    if (static_cast<int>(a.size()) != dim)
      throw ConfigError("generator: expected " + std::to_string(dim) + " coordinates in '" + ta +
                        "'");
    return std::pair<std::vector<double>, std::vector<double>>(std::move(a), std::move(b));
  };

  if (kind == "chi") {
    if (parts.size() != 3) throw ConfigError("usage: chi:a:b");
    auto [a, b] = expand_corners(parts[1], parts[2]);
    return make_indicator(a, b);
  }
  if (kind == "tent") {
    if (parts.size() != 3) throw ConfigError("usage: tent:a:b");
    auto [a, b] = expand_corners(parts[1], parts[2]);
    return make_tent(a, b);
  }
  if (kind == "pow") {
    if (parts.size() != 4) throw ConfigError("usage: pow:beta:a:b");
    auto [a, b] = expand_corners(parts[2], parts[3]);
    return make_power(parse_csv_doubles(parts[1]).at(0), a, b);
  }
  if (kind == "randpc") {
    if (parts.size() != 3) throw ConfigError("usage: randpc:k:seed");
    const int k = parse_csv_ints(parts[1]).at(0);
    const auto seed = static_cast<std::uint64_t>(parse_csv_doubles(parts[2]).at(0));
    return make_random_pc(dim, k, seed);
  }
  if (kind == "sfn") {
    if (parts.size() < 2) throw ConfigError("usage: sfn:path");
    // Re-join in case the path itself contains ':'.
    std::string path = parts[1];
    for (std::size_t i = 2; i < parts.size(); ++i) path += ":" + parts[i];
    SampledFunction f = SampledFunction::read_sfn_file(path);
    if (f.dim() != dim)
      throw ConfigError("sfn file dim " + std::to_string(f.dim()) + " != expected " +
                        std::to_string(dim));
    return f;
  }
  throw ConfigError("unknown generator kind '" + kind + "'");
}

}  // namespace roughfrac
