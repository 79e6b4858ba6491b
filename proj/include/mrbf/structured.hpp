#pragma once

#include "mrbf/mesh.hpp"

#include <functional>
#include <string_view>
#include <utility>

namespace mrbf {

/// Height field z(x, y) used to bend surface meshes out of the plane.
using SurfaceWarp = std::function<double(double x, double y)>;
/// Maps a node position to its distorted position.
using NodeDistortion = std::function<Vec3(const Vec3&)>;

/// z = amplitude * cos(pi x / 2) * cos(pi y / 2): a single bump over
/// [-1,1]^2 that vanishes on the boundary and peaks at the centre.
[[nodiscard]] SurfaceWarp sine_bump_warp(double amplitude);

/// Uniform mesh of [a, b] on the x axis of R^dim (dim 1, 2 or 3), Seg2 or Seg3.
[[nodiscard]] InterfaceMesh interval_mesh(double a, double b, int n_elements, ElementKind kind,
                                          Side side, int dim = 2);

/// Master/slave interval meshes of the same segment with independent element counts.
[[nodiscard]] std::pair<InterfaceMesh, InterfaceMesh> interval_pair(double a, double b, int n_master,
                                                                    int n_slave, ElementKind kind);

/// n x n Quad4/Quad8 mesh of [lo, hi]^2 in R^3, lifted by `warp` (flat if empty).
[[nodiscard]] InterfaceMesh square_surface(double lo, double hi, int n, ElementKind kind,
                                           const SurfaceWarp& warp, Side side);

/// Master/slave surface meshes of [-1,1]^2. Each side carries its own warp so
/// that curved pairs are geometrically non-conforming (gaps between facets).
[[nodiscard]] std::pair<InterfaceMesh, InterfaceMesh> surface_pair(int n_master, int n_slave,
                                                                  ElementKind kind,
                                                                  const SurfaceWarp& warp_master,
                                                                  const SurfaceWarp& warp_slave);

/// Structured Tri3 mesh of [x0,x1] x [y0,y1] with nx x ny cells, each cut
/// along its (i,j)-(i+1,j+1) diagonal. Boundary edges are tagged "bottom",
/// "right", "top", "left". The optional distortion moves nodes after
/// tagging; tangled results throw degenerate-element.
[[nodiscard]] VolumeMesh rectangle_tri_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                                            const NodeDistortion& distortion = {});

/// Unit square split at y = 0.5 (curved to y = 0.5 + a sin(pi x) when
/// a != 0). The master subdomain is the upper half, the slave the lower one.
/// Edges on the interface are tagged "interface", the rest of the outer
/// boundary "dirichlet". Each half has nx x nx/2 cells (nx must be even).
struct SplitSquare {
  VolumeMesh master;
  VolumeMesh slave;
};
[[nodiscard]] SplitSquare split_unit_square(int nx_master, int nx_slave, double curve_amplitude = 0.0);

inline constexpr std::string_view kInterfaceTag = "interface";
inline constexpr std::string_view kDirichletTag = "dirichlet";

/// Interface curve height of split_unit_square.
[[nodiscard]] double split_interface_height(double x, double curve_amplitude);

}  // namespace mrbf
