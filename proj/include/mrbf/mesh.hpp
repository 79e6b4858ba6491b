#pragma once

#include "mrbf/element.hpp"

#include <Eigen/Core>

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mrbf {

using Index = int;

enum class Side { None, Master, Slave };

[[nodiscard]] std::string_view to_string(Side side);

/// Undirected edge key: the two node ids in ascending order.
using Edge = std::pair<Index, Index>;
[[nodiscard]] Edge make_edge(Index a, Index b);

/// Nodes plus single-kind element connectivity.
///
/// The same container serves interface meshes (Seg2/Seg3 in R^2 or R^3,
/// Quad4/Quad8 in R^3; `side` says which side of the interface they
/// discretize) and volume meshes (Tri3 in R^2, boundary edges tagged).
/// Connectivity is validated on construction; a Mesh is not modified by any
/// library routine afterwards.
class Mesh {
 public:
  Mesh() = default;
  Mesh(int dim, ElementKind kind, std::vector<Vec3> nodes, std::vector<Index> connectivity,
       Side side = Side::None);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] ElementKind kind() const noexcept { return kind_; }
  [[nodiscard]] Side side() const noexcept { return side_; }
  [[nodiscard]] int nodes_per_element() const noexcept { return node_count(kind_); }

  [[nodiscard]] Index num_nodes() const noexcept { return static_cast<Index>(nodes_.size()); }
  [[nodiscard]] Index num_elements() const noexcept {
    return static_cast<Index>(connectivity_.size()) / nodes_per_element();
  }

  [[nodiscard]] const Vec3& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const std::vector<Vec3>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const Index> element(Index e) const;
  [[nodiscard]] const std::vector<Index>& connectivity() const noexcept { return connectivity_; }

  /// Node coordinates of element e, one column per node.
  [[nodiscard]] Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxElementNodes> element_coords(
      Index e) const;

  [[nodiscard]] const std::map<Edge, std::string>& edge_tags() const noexcept { return edge_tags_; }
  [[nodiscard]] const std::map<Index, std::string>& element_tags() const noexcept {
    return element_tags_;
  }
  void set_side(Side side) noexcept { side_ = side; }
  void tag_edge(Index a, Index b, std::string tag);
  void tag_element(Index e, std::string tag);

  /// Edges carrying `tag`.
  [[nodiscard]] std::vector<Edge> edges_tagged(std::string_view tag) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  int dim_ = 2;
  ElementKind kind_ = ElementKind::Seg2;
  Side side_ = Side::None;
  std::vector<Vec3> nodes_;
  std::vector<Index> connectivity_;
  std::map<Edge, std::string> edge_tags_;
  std::map<Index, std::string> element_tags_;
};

using InterfaceMesh = Mesh;
using VolumeMesh = Mesh;

/// Physical point x(xi) = sum_i N_i(xi) x_i.
[[nodiscard]] Vec3 map_to_physical(const Mesh& mesh, Index elem, const RefCoord& xi);

/// dx/dxi, one column per reference direction.
[[nodiscard]] Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 2> jacobian(const Mesh& mesh, Index elem,
                                                                       const RefCoord& xi);

/// Integration measure of the isoparametric map at xi. Elements whose
/// reference dimension equals the mesh dimension (Tri3 in R^2) use the signed
/// determinant and reject j <= 0; embedded elements use sqrt(det(J^T J)) and
/// reject j == 0. Throws degenerate-element.
[[nodiscard]] double jacobian_measure(const Mesh& mesh, Index elem, const RefCoord& xi);

/// Maximum inter-node distance of the element.
[[nodiscard]] double element_circumdiameter(const Mesh& mesh, Index elem);

/// Largest element circumdiameter of the mesh.
[[nodiscard]] double max_circumdiameter(const Mesh& mesh);

/// Unit normal of a surface element (Quad/Tri in R^3) or line element in the
/// plane (Seg in R^2) at xi. Throws invalid-argument for other combinations.
[[nodiscard]] Vec3 element_normal(const Mesh& mesh, Index elem, const RefCoord& xi);

/// Evaluates jacobian_measure at every Gauss point of every element;
/// throws degenerate-element naming the first offending element.
void check_non_degenerate(const Mesh& mesh);

}  // namespace mrbf
