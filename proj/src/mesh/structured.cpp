#include "mrbf/structured.hpp"

#include "mrbf/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mrbf {

SurfaceWarp sine_bump_warp(double amplitude) {
  return [amplitude](double x, double y) {
    return amplitude * std::cos(0.5 * std::numbers::pi * x) * std::cos(0.5 * std::numbers::pi * y);
  };
}

InterfaceMesh interval_mesh(double a, double b, int n_elements, ElementKind kind, Side side, int dim) {
  if (n_elements < 1 || !(b > a)) raise(ErrorCode::InvalidArgument, "invalid interval mesh request");
  if (kind != ElementKind::Seg2 && kind != ElementKind::Seg3) {
    raise(ErrorCode::InvalidArgument, "interval meshes are Seg2 or Seg3");
  }
  const int order = polynomial_degree(kind);
  const int n_nodes = order * n_elements + 1;
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    // Exact endpoints so that master and slave meshes share them bit-for-bit.
    const double x = (i == n_nodes - 1) ? b : a + (b - a) * i / (n_nodes - 1);
    nodes.emplace_back(x, 0.0, 0.0);
  }
  std::vector<Index> conn;
  for (int e = 0; e < n_elements; ++e) {
    const int first = order * e;
    if (order == 1) {
      conn.insert(conn.end(), {first, first + 1});
    } else {
      conn.insert(conn.end(), {first, first + 1, first + 2});
    }
  }
  return {dim, kind, std::move(nodes), std::move(conn), side};
}

std::pair<InterfaceMesh, InterfaceMesh> interval_pair(double a, double b, int n_master, int n_slave,
                                                      ElementKind kind) {
  return {interval_mesh(a, b, n_master, kind, Side::Master), interval_mesh(a, b, n_slave, kind, Side::Slave)};
}

InterfaceMesh square_surface(double lo, double hi, int n, ElementKind kind, const SurfaceWarp& warp, Side side) {
  if (n < 1 || !(hi > lo)) raise(ErrorCode::InvalidArgument, "invalid surface mesh request");
  if (kind != ElementKind::Quad4 && kind != ElementKind::Quad8) {
    raise(ErrorCode::InvalidArgument, "surface meshes are Quad4 or Quad8");
  }
  const bool quadratic = kind == ElementKind::Quad8;
  const int m = quadratic ? 2 * n + 1 : n + 1;  // lattice points per direction
  std::vector<Index> id(static_cast<std::size_t>(m * m), -1);
  std::vector<Vec3> nodes;
  const auto coord = [&](int i) { return (i == m - 1) ? hi : lo + (hi - lo) * i / (m - 1); };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (quadratic && i % 2 == 1 && j % 2 == 1) continue;  // no cell-centre node
      const double x = coord(i);
      const double y = coord(j);
      const double z = warp ? warp(x, y) : 0.0;
      id[static_cast<std::size_t>(j * m + i)] = static_cast<Index>(nodes.size());
      nodes.emplace_back(x, y, z);
    }
  }
  const auto at = [&](int i, int j) { return id[static_cast<std::size_t>(j * m + i)]; };
  std::vector<Index> conn;
  for (int cj = 0; cj < n; ++cj) {
    for (int ci = 0; ci < n; ++ci) {
      if (quadratic) {
        const int i = 2 * ci;
        const int j = 2 * cj;
        conn.insert(conn.end(), {at(i, j), at(i + 2, j), at(i + 2, j + 2), at(i, j + 2), at(i + 1, j),
                                 at(i + 2, j + 1), at(i + 1, j + 2), at(i, j + 1)});
      } else {
        conn.insert(conn.end(), {at(ci, cj), at(ci + 1, cj), at(ci + 1, cj + 1), at(ci, cj + 1)});
      }
    }
  }
  InterfaceMesh mesh(3, kind, std::move(nodes), std::move(conn), side);
  check_non_degenerate(mesh);
  return mesh;
}

std::pair<InterfaceMesh, InterfaceMesh> surface_pair(int n_master, int n_slave, ElementKind kind,
                                                    const SurfaceWarp& warp_master,
                                                    const SurfaceWarp& warp_slave) {
  return {square_surface(-1.0, 1.0, n_master, kind, warp_master, Side::Master),
          square_surface(-1.0, 1.0, n_slave, kind, warp_slave, Side::Slave)};
}

VolumeMesh rectangle_tri_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                              const NodeDistortion& distortion) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) {
    raise(ErrorCode::InvalidArgument, "invalid rectangle mesh request");
  }
  const auto node_id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? x1 : x0 + (x1 - x0) * i / nx;
      const double y = (j == ny) ? y1 : y0 + (y1 - y0) * j / ny;
      Vec3 p(x, y, 0.0);
      if (distortion) {
        p = distortion(p);
        p.z() = 0.0;
      }
      nodes.push_back(p);
    }
  }
  std::vector<Index> conn;
  conn.reserve(static_cast<std::size_t>(6 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      conn.insert(conn.end(), {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1)});
      conn.insert(conn.end(), {node_id(i, j), node_id(i + 1, j + 1), node_id(i, j + 1)});
    }
  }
  VolumeMesh mesh(2, ElementKind::Tri3, std::move(nodes), std::move(conn));
  for (int i = 0; i < nx; ++i) {
    mesh.tag_edge(node_id(i, 0), node_id(i + 1, 0), "bottom");
    mesh.tag_edge(node_id(i, ny), node_id(i + 1, ny), "top");
  }
  for (int j = 0; j < ny; ++j) {
    mesh.tag_edge(node_id(0, j), node_id(0, j + 1), "left");
    mesh.tag_edge(node_id(nx, j), node_id(nx, j + 1), "right");
  }
  check_non_degenerate(mesh);
  return mesh;
}

double split_interface_height(double x, double curve_amplitude) {
  return 0.5 + curve_amplitude * std::sin(std::numbers::pi * x);
}

SplitSquare split_unit_square(int nx_master, int nx_slave, double curve_amplitude) {
  if (nx_master < 2 || nx_slave < 2 || nx_master % 2 || nx_slave % 2) {
    raise(ErrorCode::InvalidArgument, "split_unit_square needs even, positive cell counts");
  }
  const double a = curve_amplitude;
  // Vertical blending keeps the outer boundary fixed and puts y = 0.5 on the curve.
  const NodeDistortion lift_upper = [a](const Vec3& p) {
    return Vec3(p.x(), p.y() + a * std::sin(std::numbers::pi * p.x()) * (1.0 - p.y()) / 0.5, 0.0);
  };
  const NodeDistortion lift_lower = [a](const Vec3& p) {
    return Vec3(p.x(), p.y() + a * std::sin(std::numbers::pi * p.x()) * p.y() / 0.5, 0.0);
  };
  SplitSquare out{
      rectangle_tri_mesh(0.0, 1.0, 0.5, 1.0, nx_master, nx_master / 2, a != 0.0 ? lift_upper : NodeDistortion{}),
      rectangle_tri_mesh(0.0, 1.0, 0.0, 0.5, nx_slave, nx_slave / 2, a != 0.0 ? lift_lower : NodeDistortion{})};
  const auto retag = [](VolumeMesh& mesh, std::string_view interface_side) {
    const auto tags = mesh.edge_tags();
    for (const auto& [edge, tag] : tags) {
      mesh.tag_edge(edge.first, edge.second,
                    std::string(tag == interface_side ? kInterfaceTag : kDirichletTag));
    }
  };
  retag(out.master, "bottom");
  retag(out.slave, "top");
  out.master.set_side(Side::Master);
  out.slave.set_side(Side::Slave);
  return out;
}

}  // namespace mrbf
