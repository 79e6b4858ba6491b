#include "mrbf/errors.hpp"
#include "mrbf/poisson.hpp"
#include "mrbf/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace mrbf {

ErrorReport broken_norms(const std::array<Eigen::VectorXd, 2>& nodal, const PoissonProblem& problem) {
  if (!problem.exact || !problem.exact->value || !problem.exact->gradient) {
    raise(ErrorCode::InvalidArgument, "error norms need an exact solution with gradient");
  }
  const ExactSolution& exact = *problem.exact;
  const QuadratureRule rule = gauss_rule_for_degree(ElementKind::Tri3, 5);
  const RefCoord centre(1.0 / 3, 1.0 / 3);
  const ShapeGradients ref_grad = shape_gradients(ElementKind::Tri3, centre);
  ErrorReport r;
  double semi_total = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const VolumeMesh& mesh = problem.domains[k];
    if (nodal[k].size() != mesh.num_nodes()) raise(ErrorCode::DimensionMismatch, "nodal field size does not match mesh");
    double l2 = 0.0;
    double semi = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const auto nodes = mesh.element(e);
      const double det = jacobian_measure(mesh, e, centre);
      const Eigen::Matrix2d jac = jacobian(mesh, e, centre).topRows<2>();
      const Eigen::Vector3d u_e(nodal[k][nodes[0]], nodal[k][nodes[1]], nodal[k][nodes[2]]);
      const Eigen::Vector2d grad_h = (ref_grad * jac.inverse()).transpose() * u_e;
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const Vec3 x = map_to_physical(mesh, e, rule.points[g]);
        const double w = rule.weights[g] * det;
        const double diff = shape_values(ElementKind::Tri3, rule.points[g]).dot(u_e) - exact.value(x.x(), x.y());
        l2 += w * diff * diff;
        semi += w * (grad_h - exact.gradient(x.x(), x.y())).squaredNorm();
      }
    }
    r.l2[k] = std::sqrt(l2);
    r.h1[k] = std::sqrt(l2 + semi);
    semi_total += semi;
  }
  r.l2_broken = std::hypot(r.l2[0], r.l2[1]);
  r.h1_broken = std::hypot(r.h1[0], r.h1[1]);
  r.h1_semi_broken = std::sqrt(semi_total);
  return r;
}

ErrorReport broken_norms(const SolutionFields& fields, const PoissonProblem& problem) {
  return broken_norms(fields.u, problem);
}

void write_solution_csv(std::ostream& out, const SolutionFields& fields, const PoissonProblem& problem) {
  out << "node,x,y,u\n";
  char buf[96];
  Index id = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const VolumeMesh& mesh = problem.domains[k];
    for (Index v = 0; v < mesh.num_nodes(); ++v, ++id) {
      const Vec3& x = mesh.node(v);
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", id, x.x(), x.y(), fields.u[k][v]);
      out << buf;
    }
  }
}

}  // namespace mrbf
