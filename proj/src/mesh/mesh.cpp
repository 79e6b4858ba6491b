#include "mrbf/mesh.hpp"

#include "mrbf/errors.hpp"
#include "mrbf/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace mrbf {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::None: return "none";
    case Side::Master: return "master";
    case Side::Slave: return "slave";
  }
  return "none";
}

Edge make_edge(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

Mesh::Mesh(int dim, ElementKind kind, std::vector<Vec3> nodes, std::vector<Index> connectivity,
           Side side)
    : dim_(dim), kind_(kind), side_(side), nodes_(std::move(nodes)), connectivity_(std::move(connectivity)) {
  if (dim_ < 1 || dim_ > 3) raise(ErrorCode::InvalidArgument, "mesh dimension must be 1, 2 or 3");
  if (reference_dimension(kind_) > dim_) {
    raise(ErrorCode::InvalidArgument,
          std::string(to_string(kind_)) + " elements cannot live in dimension " + std::to_string(dim_));
  }
  const auto npe = static_cast<std::size_t>(nodes_per_element());
  if (connectivity_.size() % npe != 0) {
    raise(ErrorCode::InvalidArgument, "connectivity length is not a multiple of the element node count");
  }
  for (std::size_t k = 0; k < connectivity_.size(); ++k) {
    const Index id = connectivity_[k];
    if (id < 0 || id >= num_nodes()) {
      raise(ErrorCode::InvalidArgument, "element " + std::to_string(k / npe) + " references node " +
                                            std::to_string(id) + " out of range");
    }
  }
  for (auto& x : nodes_) {
    for (int c = dim_; c < 3; ++c) {
      if (x[c] != 0.0) raise(ErrorCode::InvalidArgument, "node coordinate beyond mesh dimension");
    }
  }
}

std::span<const Index> Mesh::element(Index e) const {
  const auto npe = static_cast<std::size_t>(nodes_per_element());
  return {connectivity_.data() + static_cast<std::size_t>(e) * npe, npe};
}

Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxElementNodes> Mesh::element_coords(Index e) const {
  const auto ids = element(e);
  Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxElementNodes> x(3, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = node(ids[i]);
  return x;
}

void Mesh::tag_edge(Index a, Index b, std::string tag) {
  if (a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes()) {
    raise(ErrorCode::InvalidArgument, "tagged edge references a node out of range");
  }
  edge_tags_[make_edge(a, b)] = std::move(tag);
}

void Mesh::tag_element(Index e, std::string tag) {
  if (e < 0 || e >= num_elements()) raise(ErrorCode::InvalidArgument, "tagged element out of range");
  element_tags_[e] = std::move(tag);
}

std::vector<Edge> Mesh::edges_tagged(std::string_view tag) const {
  std::vector<Edge> out;
  for (const auto& [edge, t] : edge_tags_) {
    if (t == tag) out.push_back(edge);
  }
  return out;
}

Vec3 map_to_physical(const Mesh& mesh, Index elem, const RefCoord& xi) {
  return mesh.element_coords(elem) * shape_values(mesh.kind(), xi);
}

Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 2> jacobian(const Mesh& mesh, Index elem, const RefCoord& xi) {
  return mesh.element_coords(elem) * shape_gradients(mesh.kind(), xi);
}

double jacobian_measure(const Mesh& mesh, Index elem, const RefCoord& xi) {
  const auto j = jacobian(mesh, elem, xi);
  const int rdim = reference_dimension(mesh.kind());
  double measure = 0.0;
  bool signed_measure = false;
  if (rdim == 2 && mesh.dim() == 2) {
    measure = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    signed_measure = true;
  } else if (rdim == 1) {
    measure = j.col(0).norm();
  } else {
    const Eigen::Matrix2d g = j.transpose() * j;
    measure = std::sqrt(std::max(0.0, g.determinant()));
  }
  if (!(signed_measure ? measure > 0.0 : measure != 0.0) || !std::isfinite(measure)) {
    raise(ErrorCode::DegenerateElement,
          "element " + std::to_string(elem) + " has jacobian measure " + std::to_string(measure));
  }
  return measure;
}

double element_circumdiameter(const Mesh& mesh, Index elem) {
  if (elem < 0 || elem >= mesh.num_elements()) {
    raise(ErrorCode::InvalidArgument, "element id " + std::to_string(elem) + " out of range");
  }
  const auto ids = mesh.element(elem);
  double d = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      d = std::max(d, (mesh.node(ids[a]) - mesh.node(ids[b])).norm());
    }
  }
  return d;
}

double max_circumdiameter(const Mesh& mesh) {
  double d = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) d = std::max(d, element_circumdiameter(mesh, e));
  return d;
}

Vec3 element_normal(const Mesh& mesh, Index elem, const RefCoord& xi) {
  const auto j = jacobian(mesh, elem, xi);
  Vec3 n;
  if (reference_dimension(mesh.kind()) == 2 && mesh.dim() == 3) {
    n = j.col(0).cross(j.col(1));
  } else if (reference_dimension(mesh.kind()) == 1 && mesh.dim() == 2) {
    n = Vec3(-j(1, 0), j(0, 0), 0.0);
  } else {
    raise(ErrorCode::InvalidArgument, "element normal undefined for this kind/dimension");
  }
  const double len = n.norm();
  if (len == 0.0) raise(ErrorCode::DegenerateElement, "element " + std::to_string(elem) + " has no normal");
  return n / len;
}

void check_non_degenerate(const Mesh& mesh) {
  const QuadratureRule rule = gauss_rule_for_degree(mesh.kind(), 2 * polynomial_degree(mesh.kind()));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    for (const auto& p : rule.points) (void)jacobian_measure(mesh, e, p);
    for (const auto& p : ReferenceElement::of(mesh.kind()).node_ref_coords) (void)jacobian_measure(mesh, e, p);
  }
}

}  // namespace mrbf
