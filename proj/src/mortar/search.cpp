#include "mrbf/errors.hpp"
#include "mrbf/mortar.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <string>

namespace mrbf {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::RB:
      return "rb";
    case Scheme::EB:
      return "eb";
    case Scheme::SB1D:
      return "sb";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "rb") return Scheme::RB;
  if (name == "eb") return Scheme::EB;
  if (name == "sb") return Scheme::SB1D;
  raise(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

int minimum_gauss_points(ElementKind slave_kind) {
  switch (slave_kind) {
    case ElementKind::Seg2:
      return 2;
    case ElementKind::Seg3:
      return 3;
    case ElementKind::Quad4:
      return 4;
    case ElementKind::Quad8:
      return 9;
    case ElementKind::Tri3:
      break;
  }
  raise(ErrorCode::InvalidArgument, "Tri3 is not an interface element");
}

void MortarConfig::validate(ElementKind slave_kind) const {
  const int min_gp = minimum_gauss_points(slave_kind);
  if (n_gauss < min_gp) {
    raise(ErrorCode::InvalidArgument, "n_gauss = " + std::to_string(n_gauss) + " is below the minimum " +
                                          std::to_string(min_gp) + " for " + std::string(to_string(slave_kind)));
  }
  if (!(support_tol >= 0.0 && support_tol <= 0.1)) raise(ErrorCode::InvalidArgument, "support_tol must lie in [0, 0.1]");
  if (!(newton.tol > 0.0) || newton.max_iter < 1) raise(ErrorCode::InvalidArgument, "invalid Newton settings");
}

InterfacePair make_interface_pair(InterfaceMesh master, InterfaceMesh slave, std::optional<double> gap_tolerance) {
  if (master.dim() != slave.dim()) raise(ErrorCode::InvalidArgument, "master and slave live in different dimensions");
  if (master.kind() == ElementKind::Tri3 || slave.kind() == ElementKind::Tri3 ||
      reference_dimension(master.kind()) != reference_dimension(slave.kind())) {
    raise(ErrorCode::InvalidArgument, "master and slave element kinds are incompatible");
  }
  if (reference_dimension(master.kind()) >= master.dim()) {
    raise(ErrorCode::InvalidArgument, "interface elements must have codimension 1");
  }
  if (gap_tolerance && !(*gap_tolerance >= 0.0)) raise(ErrorCode::InvalidArgument, "gap tolerance must be >= 0");
  const double gap = gap_tolerance.value_or(0.5 * std::max(max_circumdiameter(master), max_circumdiameter(slave)));
  return {std::move(master), std::move(slave), gap};
}

namespace {

Eigen::AlignedBox3d element_box(const Mesh& mesh, Index e, double inflate) {
  Eigen::AlignedBox3d box;
  for (const Index n : mesh.element(e)) box.extend(mesh.node(n));
  box.min().array() -= inflate;
  box.max().array() += inflate;
  return box;
}

}  // namespace

std::vector<SlaveCandidates> contact_search(const InterfacePair& pair) {
  const Index n_master = pair.master.num_elements();
  std::vector<Eigen::AlignedBox3d> master_boxes;
  master_boxes.reserve(static_cast<std::size_t>(n_master));
  for (Index m = 0; m < n_master; ++m) master_boxes.push_back(element_box(pair.master, m, pair.gap_tolerance));
  // Sweep along x: masters sorted by lower x bound.
  std::vector<Index> order(static_cast<std::size_t>(n_master));
  for (Index m = 0; m < n_master; ++m) order[static_cast<std::size_t>(m)] = m;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return master_boxes[static_cast<std::size_t>(a)].min().x() < master_boxes[static_cast<std::size_t>(b)].min().x();
  });

  std::vector<SlaveCandidates> out;
  out.reserve(static_cast<std::size_t>(pair.slave.num_elements()));
  for (Index s = 0; s < pair.slave.num_elements(); ++s) {
    const auto box = element_box(pair.slave, s, pair.gap_tolerance);
    SlaveCandidates c{s, {}};
    for (const Index m : order) {
      const auto& mb = master_boxes[static_cast<std::size_t>(m)];
      if (mb.min().x() > box.max().x()) break;
      if (mb.intersects(box)) c.masters.push_back(m);
    }
    std::sort(c.masters.begin(), c.masters.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mrbf
