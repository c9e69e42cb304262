#pragma once

#include <optional>
#include <string>

#include "roughfrac/grid_function.hpp"
#include "roughfrac/weights.hpp"

namespace roughfrac {

/// Two weighted conventions coexist deliberately:
///   weighted_multiplier: (integral of |f w|^p)^{1/p}
///   weighted_measure:    (integral of |f|^p w)^{1/p}
/// They agree when the multiplier's w is passed as w^p to the measure form.
enum class NormKind { strong, weak, weighted_multiplier, weighted_measure };

struct NormSpec {
  NormKind kind = NormKind::strong;
  double p = 2.0;
  std::optional<WeightSpec> w;

  static NormSpec strong(double p);
  static NormSpec weak(double p);
  static NormSpec weighted_multiplier(double p, WeightSpec w);
  static NormSpec weighted_measure(double p, WeightSpec w);

  void validate() const;  // p >= 1 (p may be +infinity); w present iff weighted
  std::string describe() const;
};

// Riemann cell sum (sum |f|^p h^n)^{1/p}; p == +infinity gives max |f|.
double lp_norm(const SampledFunction& f, double p);

// sup over levels of lambda * |{|f| > lambda}|^{1/p}, exact on the grid:
// sort cell values descending and take max_k v_k (k h^n)^{1/p}.
double weak_lp_quasinorm(const SampledFunction& f, double p);

// Dispatches every NormKind; strong and weak delegate to the unweighted
// forms. Throws NonFiniteWeight when the weight is non-finite on a cell
// where f does not vanish.
double weighted_norm(const SampledFunction& f, const NormSpec& spec);

// Weak quasinorm with cell measure replaced by the u-mass of the cell.
double weighted_weak_quasinorm(const SampledFunction& f, double p, const WeightSpec& u);

}  // namespace roughfrac
