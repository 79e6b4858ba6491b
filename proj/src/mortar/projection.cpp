#include "mrbf/errors.hpp"
#include "mrbf/mortar.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mrbf {

namespace {

RefCoord reference_centre(ElementKind kind) {
  return is_simplex(kind) ? RefCoord(1.0 / 3.0, 1.0 / 3.0) : RefCoord::Zero();
}

// Largest component of r along the unit tangents.
double tangential_residual(const Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 2>& j, const Vec3& r) {
  double res = 0.0;
  for (Eigen::Index k = 0; k < j.cols(); ++k) res = std::max(res, std::abs(j.col(k).dot(r)) / j.col(k).norm());
  return res;
}

}  // namespace

Projection project_point_newton(const InterfaceMesh& master, Index elem, const Vec3& x, const NewtonOptions& options) {
  const ElementKind kind = master.kind();
  const int d = reference_dimension(kind);
  Projection p;
  p.xi = reference_centre(kind);
  for (int it = 0; it <= options.max_iter; ++it) {
    const Vec3 r = x - map_to_physical(master, elem, p.xi);
    const auto j = jacobian(master, elem, p.xi);
    if (tangential_residual(j, r) < options.tol) {
      p.converged = true;
      p.iterations = it;
      return p;
    }
    if (it == options.max_iter) break;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd step = jtj.ldlt().solve(j.transpose() * r);
    for (int k = 0; k < d; ++k) p.xi[k] += step[k];
    // Shape functions are not evaluated beyond 1.5; such points are far outside anyway.
    if (p.xi.head(d).cwiseAbs().maxCoeff() > 1.5) {
      p.iterations = it + 1;
      return p;
    }
  }
  p.iterations = options.max_iter;
  return p;
}

bool support_detect(std::span<const double> values, double tol) {
  for (const double v : values) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
  }
  return true;
}

bool support_detect(ElementKind kind, const Projection& projection, double tol) {
  return projection.converged && inside_reference(kind, projection.xi, tol);
}

}  // namespace mrbf
