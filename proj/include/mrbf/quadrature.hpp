#pragma once

#include "mrbf/element.hpp"

#include <vector>

namespace mrbf {

/// Quadrature points and weights on a reference domain. Weights are in
/// reference-measure units and sum to reference_measure(kind).
struct QuadratureRule {
  std::vector<RefCoord> points;
  std::vector<double> weights;
  /// Highest total polynomial degree integrated exactly.
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxGaussPoints1D = 32;

/// Gauss-Legendre rule with n points on [-1, 1], 1 <= n <= kMaxGaussPoints1D.
[[nodiscard]] QuadratureRule gauss_legendre(int n);

/// Quadrature on the reference domain of `kind`:
///   segments       n in [1, 32] Gauss-Legendre points;
///   quadrilaterals n = k*k, k in [1, 32], tensor product;
///   triangles      n in {1, 3, 6, 7, 12}, symmetric rules of degree 1, 2, 4, 5, 6.
/// Any other request throws invalid-argument.
[[nodiscard]] QuadratureRule gauss_rule(ElementKind kind, int n_points);

/// Smallest supported rule on `kind` that integrates polynomials of `degree`.
[[nodiscard]] QuadratureRule gauss_rule_for_degree(ElementKind kind, int degree);

}  // namespace mrbf
