#pragma once

#include <memory>
#include <string>

#include "bregkit/types.hpp"

namespace bregkit {

// Entropy coordinates at or below this are treated as outside the open
// domain; values this small carry no usable gradient information anyway.
inline constexpr double kEntropyFloor = 1e-300;

enum class LegendreKind { SquaredNorm, QuadraticForm, PNorm, NegativeEntropy };

const char* to_string(LegendreKind k);

// A smooth strictly convex generator together with its convex conjugate.
// Both gradient maps are available in closed form and are mutually inverse
// bijections between the interior of the domain and all of R^d.
//
// Four concrete families:
//   SquaredNorm       f(x) = 0.5 ||x||^2
//   QuadraticForm     f(x) = 0.5 x'Qx, Q symmetric positive definite
//   PNorm             f(x) = (1/p) sum |x_i|^p, p > 1, coordinatewise
//   NegativeEntropy   f(x) = sum x_i log x_i on the open positive orthant
class LegendreFunction {
 public:
  static LegendreFunction squared_norm(int dim);
  static LegendreFunction quadratic_form(Mat q);
  static LegendreFunction p_norm(int dim, double p);
  static LegendreFunction negative_entropy(int dim);

  LegendreKind kind() const;
  int dim() const;
  double exponent() const;   // PNorm only
  const Mat& matrix() const;  // QuadraticForm only

  bool in_interior(const Vec& x) const;
  // Closure of the domain: adds the orthant boundary for NegativeEntropy,
  // identical to in_interior for the full-space kinds.
  bool in_closure(const Vec& x) const;

  double value(const Vec& x) const;
  // Evaluation extended to the domain closure (0 log 0 = 0). Needed wherever
  // the first argument of a divergence may sit on the boundary.
  double value_closure(const Vec& x) const;
  Vec gradient(const Vec& x) const;

  double conj_value(const Vec& xstar) const;
  Vec conj_gradient(const Vec& xstar) const;

  // Diagonal of the Hessian of the conjugate at xstar (separable kinds only;
  // QuadraticForm callers should solve with matrix() instead). Used by the
  // Newton steps inside the projection machinery.
  Vec conj_hessian_diag(const Vec& xstar) const;

  std::string describe() const;

 private:
  struct Impl;
  explicit LegendreFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace bregkit
