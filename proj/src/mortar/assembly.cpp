#include "mrbf/errors.hpp"
#include "mrbf/mortar.hpp"
#include "mrbf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mrbf {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Master element credited with one slave quadrature point.
struct Hit {
  Index master = -1;
  ShapeVector basis;
  double depth = -1.0;  // smallest support-probe value, larger is deeper inside
};

class Accumulator {
 public:
  explicit Accumulator(const InterfacePair& pair) : pair_(pair) {}

  // Adds w * phi_a * phi_b to D and w * phi_a * N_l to M.
  void add(Index slave_elem, const ShapeVector& slave_basis, const Hit& hit, double weight) {
    const auto s_nodes = pair_.slave.element(slave_elem);
    const auto m_nodes = pair_.master.element(hit.master);
    for (std::size_t a = 0; a < s_nodes.size(); ++a) {
      const double wa = weight * slave_basis[static_cast<Eigen::Index>(a)];
      for (std::size_t b = 0; b < s_nodes.size(); ++b) {
        d_.emplace_back(s_nodes[a], s_nodes[b], wa * slave_basis[static_cast<Eigen::Index>(b)]);
      }
      for (std::size_t l = 0; l < m_nodes.size(); ++l) {
        m_.emplace_back(s_nodes[a], m_nodes[l], wa * hit.basis[static_cast<Eigen::Index>(l)]);
      }
    }
  }

  MortarMatrices finish(Scheme scheme, int n_gauss, AssemblyStats stats, std::vector<PairRecord> provenance) {
    MortarMatrices out;
    const Index n2 = pair_.slave.num_nodes();
    const Index n1 = pair_.master.num_nodes();
    out.D.resize(n2, n2);
    out.M.resize(n2, n1);
    out.D.setFromTriplets(d_.begin(), d_.end());
    out.M.setFromTriplets(m_.begin(), m_.end());
    out.D.makeCompressed();
    out.M.makeCompressed();
    out.scheme = scheme;
    out.n_gauss = n_gauss;
    out.stats = std::move(stats);
    out.provenance = std::move(provenance);
    return out;
  }

 private:
  const InterfacePair& pair_;
  Triplets d_;
  Triplets m_;
};

// Shared slave loop of the element-based schemes: Gauss points live on the
// slave element, `locate` finds the master element (if any) that supports each.
template <class Locate>
MortarMatrices slave_loop(const InterfacePair& pair, const MortarConfig& config,
                          const std::vector<SlaveCandidates>& candidates, Locate&& locate) {
  const ElementKind slave_kind = pair.slave.kind();
  const QuadratureRule rule = gauss_rule(slave_kind, config.n_gauss);
  const auto n_points = static_cast<long>(rule.size());
  Accumulator acc(pair);
  AssemblyStats stats;
  std::vector<PairRecord> provenance;
  for (const auto& cand : candidates) {
    const Index s = cand.slave;
    stats.gauss_points_total += n_points;
    if (cand.masters.empty()) {
      stats.uncovered_slaves.push_back(s);
      stats.gauss_points_dropped += n_points;
      continue;
    }
    stats.pairs_visited += static_cast<long>(cand.masters.size());
    std::map<Index, int> credited;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const RefCoord& zeta = rule.points[g];
      const Vec3 x = map_to_physical(pair.slave, s, zeta);
      const auto hit = locate(x, cand.masters);
      if (!hit) {
        ++stats.gauss_points_dropped;
        continue;
      }
      const double weight = rule.weights[g] * jacobian_measure(pair.slave, s, zeta);
      acc.add(s, shape_values(slave_kind, zeta), *hit, weight);
      ++credited[hit->master];
    }
    for (const auto& [m, count] : credited) provenance.push_back({s, m, count});
  }
  return acc.finish(config.scheme, config.n_gauss, std::move(stats), std::move(provenance));
}

// Keeps the deeper of two supporting candidates; earlier (lower id) wins ties.
void keep_deepest(std::optional<Hit>& best, Hit&& hit) {
  if (!best || hit.depth > best->depth) best = std::move(hit);
}

}  // namespace

MortarMatrices assemble_rb(const InterfacePair& pair, const MortarConfig& config) {
  config.validate(pair.slave.kind());
  const auto candidates = contact_search(pair);

  // Master loop: one interpolant per master element that has a slave partner.
  std::vector<bool> needed(static_cast<std::size_t>(pair.master.num_elements()), false);
  for (const auto& c : candidates) {
    for (const Index m : c.masters) needed[static_cast<std::size_t>(m)] = true;
  }
  FitOptions fit;
  fit.epsilon = config.rbf.epsilon;
  std::vector<std::optional<MasterInterpolant>> interps(needed.size());
  for (Index m = 0; m < pair.master.num_elements(); ++m) {
    if (needed[static_cast<std::size_t>(m)]) {
      interps[static_cast<std::size_t>(m)] =
          fit_master_interpolant(pair.master, m, config.rbf.layout, config.rbf.family, fit);
    }
  }

  Eigen::VectorXd row;
  const auto locate = [&](const Vec3& x, const std::vector<Index>& masters) {
    std::optional<Hit> best;
    for (const Index m : masters) {
      const MasterInterpolant& mi = *interps[static_cast<std::size_t>(m)];
      row.resize(mi.n_basis + mi.n_probes);
      if (!mi.interp.evaluate_rescaled_at(x, row)) continue;  // breakdown: outside support
      const auto probes = row.tail(mi.n_probes);
      if (!support_detect(std::span<const double>(probes.data(), static_cast<std::size_t>(probes.size())),
                          config.support_tol)) {
        continue;
      }
      keep_deepest(best, Hit{m, row.head(mi.n_basis), probes.minCoeff()});
    }
    return best;
  };
  return slave_loop(pair, config, candidates, locate);
}

MortarMatrices assemble_eb(const InterfacePair& pair, const MortarConfig& config) {
  config.validate(pair.slave.kind());
  const auto candidates = contact_search(pair);
  const ElementKind master_kind = pair.master.kind();
  const auto locate = [&](const Vec3& x, const std::vector<Index>& masters) {
    std::optional<Hit> best;
    for (const Index m : masters) {
      const Projection p = project_point_newton(pair.master, m, x, config.newton);
      if (!support_detect(master_kind, p, config.support_tol)) continue;
      keep_deepest(best, Hit{m, shape_values(master_kind, p.xi), support_probe_values(master_kind, p.xi).minCoeff()});
    }
    return best;
  };
  return slave_loop(pair, config, candidates, locate);
}

namespace {

// Straight-line parametrization shared by the two meshes of a collinear pair.
struct Line {
  Vec3 origin;
  Vec3 dir;
  double length = 0.0;

  [[nodiscard]] double param(const Vec3& x) const { return (x - origin).dot(dir); }
};

Line common_line(const InterfacePair& pair) {
  const Vec3 o = pair.slave.node(0);
  Vec3 far = o;
  for (const auto* mesh : {&pair.slave, &pair.master}) {
    for (const auto& x : mesh->nodes()) {
      if ((x - o).norm() > (far - o).norm()) far = x;
    }
  }
  Line line{o, far - o, (far - o).norm()};
  if (line.length == 0.0) raise(ErrorCode::InvalidGeometry, "interface meshes collapse to a point");
  line.dir /= line.length;
  const double tol = 1e-10 * std::max(1.0, line.length);
  for (const auto* mesh : {&pair.slave, &pair.master}) {
    for (const auto& x : mesh->nodes()) {
      const Vec3 r = x - o;
      if ((r - r.dot(line.dir) * line.dir).norm() > tol) {
        raise(ErrorCode::InvalidGeometry, "segment-based integration needs collinear master and slave meshes");
      }
    }
    if (mesh->kind() == ElementKind::Seg3) {
      for (Index e = 0; e < mesh->num_elements(); ++e) {
        const auto n = mesh->element(e);
        const Vec3 mid = 0.5 * (mesh->node(n[0]) + mesh->node(n[2]));
        if ((mesh->node(n[1]) - mid).norm() > tol) {
          raise(ErrorCode::InvalidGeometry, "segment-based integration needs straight, affine Seg3 elements");
        }
      }
    }
  }
  return line;
}

// Parameter range of a segment element: end nodes are the first and last ids.
std::pair<double, double> element_range(const Line& line, const Mesh& mesh, Index e) {
  const auto n = mesh.element(e);
  return {line.param(mesh.node(n.front())), line.param(mesh.node(n.back()))};
}

double to_reference(double t, std::pair<double, double> range) {
  return -1.0 + 2.0 * (t - range.first) / (range.second - range.first);
}

}  // namespace

MortarMatrices assemble_sb_1d(const InterfacePair& pair, const MortarConfig& config) {
  if (reference_dimension(pair.slave.kind()) != 1 || reference_dimension(pair.master.kind()) != 1) {
    raise(ErrorCode::InvalidGeometry, "segment-based integration is implemented for 1D interfaces only");
  }
  config.validate(pair.slave.kind());
  const Line line = common_line(pair);
  const auto candidates = contact_search(pair);
  const int p_s = polynomial_degree(pair.slave.kind());
  const int p_m = polynomial_degree(pair.master.kind());
  // Integrands are polynomials of degree max(2 p_s, p_s + p_m) on each segment.
  const int degree = std::max(2 * p_s, p_s + p_m);
  const QuadratureRule rule = gauss_legendre((degree + 2) / 2);
  const double sliver = 1e-14 * line.length;

  Accumulator acc(pair);
  AssemblyStats stats;
  std::vector<PairRecord> provenance;
  for (const auto& cand : candidates) {
    const Index s = cand.slave;
    const auto sr = element_range(line, pair.slave, s);
    const double s_lo = std::min(sr.first, sr.second);
    const double s_hi = std::max(sr.first, sr.second);
    stats.pairs_visited += static_cast<long>(cand.masters.size());
    bool covered = false;
    for (const Index m : cand.masters) {
      const auto mr = element_range(line, pair.master, m);
      const double lo = std::max(s_lo, std::min(mr.first, mr.second));
      const double hi = std::min(s_hi, std::max(mr.first, mr.second));
      if (hi - lo <= sliver) continue;
      covered = true;
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.points[g].x();
        const double weight = 0.5 * (hi - lo) * rule.weights[g];
        const RefCoord xi_s(to_reference(t, sr), 0.0);
        const RefCoord xi_m(to_reference(t, mr), 0.0);
        acc.add(s, shape_values(pair.slave.kind(), xi_s), Hit{m, shape_values(pair.master.kind(), xi_m), 0.0}, weight);
      }
      stats.gauss_points_total += static_cast<long>(rule.size());
      provenance.push_back({s, m, static_cast<int>(rule.size())});
    }
    if (!covered) stats.uncovered_slaves.push_back(s);
  }
  return acc.finish(Scheme::SB1D, static_cast<int>(rule.size()), std::move(stats), std::move(provenance));
}

MortarMatrices assemble(const InterfacePair& pair, const MortarConfig& config) {
  switch (config.scheme) {
    case Scheme::RB:
      return assemble_rb(pair, config);
    case Scheme::EB:
      return assemble_eb(pair, config);
    case Scheme::SB1D:
      return assemble_sb_1d(pair, config);
  }
  raise(ErrorCode::InvalidArgument, "unknown scheme");
}

}  // namespace mrbf
