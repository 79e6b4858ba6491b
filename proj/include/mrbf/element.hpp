#pragma once

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace mrbf {

/// Reference-element coordinates. One-dimensional elements use only x().
using RefCoord = Eigen::Vector2d;
/// Physical coordinates. Meshes of dimension 1 or 2 leave trailing components at zero.
using Vec3 = Eigen::Vector3d;

inline constexpr int kMaxElementNodes = 8;

using ShapeVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxElementNodes, 1>;
using ShapeGradients = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxElementNodes, 2>;

/// Seg2/Seg3 are interface elements of 2D problems, Quad4/Quad8 interface
/// elements of 3D problems, Tri3 is the volume element of the Poisson solver.
enum class ElementKind { Seg2, Seg3, Tri3, Quad4, Quad8 };

[[nodiscard]] int node_count(ElementKind kind);
/// Dimension of the reference domain (1 for segments, 2 otherwise).
[[nodiscard]] int reference_dimension(ElementKind kind);
[[nodiscard]] int polynomial_degree(ElementKind kind);
[[nodiscard]] bool is_simplex(ElementKind kind);
/// Measure of the reference domain: 2 (segment), 0.5 (triangle), 4 (square).
[[nodiscard]] double reference_measure(ElementKind kind);

[[nodiscard]] std::string_view to_string(ElementKind kind);
/// Parses "Seg2", "Seg3", "Tri3", "Quad4", "Quad8"; throws invalid-argument otherwise.
[[nodiscard]] ElementKind element_kind_from_string(std::string_view tag);

/// Node layout of a reference element.
///
/// Seg2: -1, +1.  Seg3: -1, 0, +1.  Tri3: (0,0), (1,0), (0,1).
/// Quad4: counter-clockwise corners from (-1,-1).  Quad8: the Quad4 corners
/// followed by the mid-side nodes of edges (0,1), (1,2), (2,3), (3,0).
struct ReferenceElement {
  ElementKind kind;
  std::vector<RefCoord> node_ref_coords;
  int polynomial_degree;

  [[nodiscard]] static const ReferenceElement& of(ElementKind kind);
};

/// Nodal basis values N_i(xi). Evaluation is allowed up to |xi_k| <= 1.5 so
/// that interpolants can be probed slightly outside the element.
[[nodiscard]] ShapeVector shape_values(ElementKind kind, const RefCoord& xi);

/// Rows are nodes, columns are reference directions (one column for segments).
[[nodiscard]] ShapeGradients shape_gradients(ElementKind kind, const RefCoord& xi);

/// Auxiliary functions used for support detection. Each one lies in [0, 1]
/// on the reference element and drops below 0 as soon as xi leaves it.
///
/// Segments: (1 - xi)/2, (1 + xi)/2.  Triangles: the barycentric coordinates.
/// Quadrilaterals: (1 - xi)/2, (1 + xi)/2, (1 - eta)/2, (1 + eta)/2, i.e. the
/// sums of corner bilinear bases over the two corners of each edge.
[[nodiscard]] int support_probe_count(ElementKind kind);
[[nodiscard]] ShapeVector support_probe_values(ElementKind kind, const RefCoord& xi);

/// True if xi lies in the reference domain inflated by tol.
[[nodiscard]] bool inside_reference(ElementKind kind, const RefCoord& xi, double tol);

}  // namespace mrbf
