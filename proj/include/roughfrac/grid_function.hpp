#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roughfrac {

enum class Interp { nearest, multilinear };

/// Compactly supported function on R^n stored on a uniform grid.
///
/// shape[d] counts cells along axis d; values live at cell centers in
/// row-major order. Evaluation returns exactly 0 outside the box
/// [origin, origin + shape*spacing). `nearest` is piecewise constant on
/// cells; `multilinear` interpolates between cell centers with zero ghost
/// cells beyond the box, so the function still vanishes off the box.
class SampledFunction {
 public:
  SampledFunction(int dim, std::vector<double> origin, double spacing,
                  std::vector<int> shape, std::vector<double> values,
                  Interp interp = Interp::nearest);

  double operator()(std::span<const double> x) const;
  double operator()(double x) const;  // dim == 1 convenience

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }
  Interp interp() const { return interp_; }

  std::size_t cell_count() const { return values_.size(); }
  double cell_measure() const;  // spacing^dim
  double box_lo(int d) const { return origin_[d]; }
  double box_hi(int d) const { return origin_[d] + shape_[d] * spacing_; }
  // Center of the cell with row-major index `flat`.
  std::vector<double> cell_center(std::size_t flat) const;

  bool is_identically_zero() const;

  // Largest Euclidean distance from x to a point of the support box.
  double support_radius_from(std::span<const double> x) const;

  // Euclidean distance from x to the support box, 0 when x lies inside.
  double support_distance_from(std::span<const double> x) const;

  // Same grid, values mapped through fn.
  SampledFunction transformed(const std::function<double(double)>& fn) const;
  SampledFunction abs_pow(double e) const;  // |values|^e

  // Represents x -> f(lambda x): geometry shrinks by lambda, values are
  // shared. Exact for both interpolation modes.
  SampledFunction dilated(double lambda) const;

  // SFN v1 text format:
  //   SFN v1 dim=<n> shape=<k1,...,kn> origin=<a1,...,an> spacing=<h> interp=<mode>
  // followed by whitespace-separated cell values in row-major order.
  static SampledFunction read_sfn(std::istream& in);
  static SampledFunction read_sfn_file(const std::string& path);
  void write_sfn(std::ostream& out) const;
  void write_sfn_file(const std::string& path) const;

 private:
  int dim_;
  std::vector<double> origin_;
  double spacing_;
  std::vector<int> shape_;
  std::vector<std::size_t> stride_;
  std::vector<double> values_;
  Interp interp_;
};

// -------------------------------------------------------------------------
// Built-in generators. The string grammar (shared by batteries and the CLI):
//   chi:a:b        indicator of the box [a,b] (per-axis values comma-lists)
//   tent:a:b       product tent: peak 1 at the box center, 0 on the boundary
//   pow:beta:a:b   |x|_2^beta restricted to [a,b]
//   randpc:k:seed  random-sign piecewise constant, k cells per axis on [-1,1]^n
// -------------------------------------------------------------------------

SampledFunction make_indicator(std::vector<double> a, std::vector<double> b,
                               int cells_per_axis = 16);
SampledFunction make_tent(std::vector<double> a, std::vector<double> b,
                          int cells_per_axis = 64);
SampledFunction make_power(double beta, std::vector<double> a, std::vector<double> b,
                           int cells_per_axis = 64);
SampledFunction make_random_pc(int dim, int cells_per_axis, std::uint64_t seed);

// Parses the generator grammar above; `dim` fixes the ambient dimension.
// Also accepts "sfn:<path>" to load a file. Throws ConfigError on anything
// unparsable or dimensionally inconsistent.
SampledFunction parse_generator(const std::string& spec, int dim);

}  // namespace roughfrac
