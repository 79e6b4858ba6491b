#include "mrbf/errors.hpp"
#include "mrbf/poisson.hpp"
#include "mrbf/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <set>

namespace mrbf {

PoissonProblem manufactured_problem(VolumeMesh master, VolumeMesh slave) {
  PoissonProblem p;
  p.domains = {std::move(master), std::move(slave)};
  p.forcing = [](double x, double y) { return 32.0 * (x * (1.0 - x) + y * (1.0 - y)); };
  p.dirichlet = [](double, double) { return 0.0; };
  p.exact = ExactSolution{
      [](double x, double y) { return 16.0 * x * y * (1.0 - x) * (1.0 - y); },
      [](double x, double y) {
        return Eigen::Vector2d(16.0 * (1.0 - 2.0 * x) * y * (1.0 - y), 16.0 * x * (1.0 - x) * (1.0 - 2.0 * y));
      }};
  return p;
}

namespace {

void require_tri3(const VolumeMesh& mesh) {
  if (mesh.kind() != ElementKind::Tri3) raise(ErrorCode::InvalidArgument, "volume meshes must be Tri3");
}

// Number of triangles sharing each edge.
std::map<Edge, int> edge_use(const VolumeMesh& mesh) {
  std::map<Edge, int> use;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto n = mesh.element(e);
    for (int k = 0; k < 3; ++k) ++use[make_edge(n[static_cast<std::size_t>(k)], n[static_cast<std::size_t>((k + 1) % 3)])];
  }
  return use;
}

}  // namespace

std::vector<Index> tagged_nodes(const VolumeMesh& mesh, std::string_view tag) {
  std::set<Index> nodes;
  for (const auto& [a, b] : mesh.edges_tagged(tag)) {
    nodes.insert(a);
    nodes.insert(b);
  }
  return {nodes.begin(), nodes.end()};
}

InterfaceExtraction extract_interface(const VolumeMesh& mesh, std::string_view tag, Side side) {
  require_tri3(mesh);
  const auto edges = mesh.edges_tagged(tag);
  if (edges.empty()) raise(ErrorCode::InvalidArgument, "no edge tagged '" + std::string(tag) + "'");
  const auto use = edge_use(mesh);
  for (const auto& edge : edges) {
    const auto it = use.find(edge);
    if (it == use.end() || it->second != 1) {
      raise(ErrorCode::IndexMap, "tagged edge (" + std::to_string(edge.first) + ", " + std::to_string(edge.second) +
                                     ") is not a boundary edge of the volume mesh");
    }
  }
  InterfaceExtraction out;
  out.to_volume = tagged_nodes(mesh, tag);
  std::map<Index, Index> local;
  std::vector<Vec3> nodes;
  for (const Index v : out.to_volume) {
    local[v] = static_cast<Index>(nodes.size());
    nodes.push_back(mesh.node(v));
  }
  std::vector<Index> conn;
  for (const auto& [a, b] : edges) {
    conn.push_back(local.at(a));
    conn.push_back(local.at(b));
  }
  out.mesh = InterfaceMesh(2, ElementKind::Seg2, std::move(nodes), std::move(conn), side);
  return out;
}

SubdomainSystem assemble_subdomain(const VolumeMesh& mesh, const ScalarField& forcing,
                                   const std::vector<Index>& interface_nodes) {
  require_tri3(mesh);
  const Index n = mesh.num_nodes();
  const QuadratureRule rule = gauss_rule_for_degree(ElementKind::Tri3, 4);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * 9);
  SubdomainSystem out;
  out.load = Eigen::VectorXd::Zero(n);
  const ShapeGradients ref_grad = shape_gradients(ElementKind::Tri3, RefCoord(1.0 / 3, 1.0 / 3));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element(e);
    const double det = jacobian_measure(mesh, e, RefCoord(1.0 / 3, 1.0 / 3));  // throws if inverted
    const Eigen::Matrix2d jac = jacobian(mesh, e, RefCoord(1.0 / 3, 1.0 / 3)).topRows<2>();
    const Eigen::Matrix<double, 3, 2> grad = ref_grad * jac.inverse();
    const Eigen::Matrix3d k = 0.5 * det * grad * grad.transpose();
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    if (forcing) {
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const Vec3 x = map_to_physical(mesh, e, rule.points[g]);
        f += rule.weights[g] * det * forcing(x.x(), x.y()) * shape_values(ElementKind::Tri3, rule.points[g]);
      }
    }
    for (int a = 0; a < 3; ++a) {
      out.load[nodes[static_cast<std::size_t>(a)]] += f[a];
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)], k(a, b));
      }
    }
  }
  out.stiffness.resize(n, n);
  out.stiffness.setFromTriplets(triplets.begin(), triplets.end());

  std::vector<Index> block(static_cast<std::size_t>(n), -1);  // position within its block
  std::vector<bool> on_interface(static_cast<std::size_t>(n), false);
  for (const Index v : interface_nodes) {
    if (v < 0 || v >= n || on_interface[static_cast<std::size_t>(v)]) {
      raise(ErrorCode::IndexMap, "interface node " + std::to_string(v) + " is out of range or repeated");
    }
    on_interface[static_cast<std::size_t>(v)] = true;
    block[static_cast<std::size_t>(v)] = static_cast<Index>(out.interface.size());
    out.interface.push_back(v);
  }
  for (Index v = 0; v < n; ++v) {
    if (!on_interface[static_cast<std::size_t>(v)]) {
      block[static_cast<std::size_t>(v)] = static_cast<Index>(out.interior.size());
      out.interior.push_back(v);
    }
  }
  const auto ni = static_cast<Index>(out.interior.size());
  const auto ng = static_cast<Index>(out.interface.size());
  std::vector<Eigen::Triplet<double>> ii;
  std::vector<Eigen::Triplet<double>> ig;
  std::vector<Eigen::Triplet<double>> gg;
  for (int c = 0; c < out.stiffness.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(out.stiffness, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto col = static_cast<std::size_t>(it.col());
      const Index br = block[r];
      const Index bc = block[col];
      if (!on_interface[r] && !on_interface[col]) ii.emplace_back(br, bc, it.value());
      if (!on_interface[r] && on_interface[col]) ig.emplace_back(br, bc, it.value());
      if (on_interface[r] && on_interface[col]) gg.emplace_back(br, bc, it.value());
    }
  }
  out.A_II.resize(ni, ni);
  out.A_IG.resize(ni, ng);
  out.A_GG.resize(ng, ng);
  out.A_II.setFromTriplets(ii.begin(), ii.end());
  out.A_IG.setFromTriplets(ig.begin(), ig.end());
  out.A_GG.setFromTriplets(gg.begin(), gg.end());
  out.f_I = out.load(Eigen::VectorXi::Map(out.interior.data(), ni));
  out.f_G = out.load(Eigen::VectorXi::Map(out.interface.data(), ng));
  return out;
}

}  // namespace mrbf
