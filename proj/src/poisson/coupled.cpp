#include "mrbf/errors.hpp"
#include "mrbf/poisson.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace mrbf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSolverTol = 1e-10;

using Triplets = std::vector<Eigen::Triplet<double>>;

bool is_dirichlet(const Eigen::VectorXd& g, Index v) { return !std::isnan(g[v]); }

Eigen::VectorXd gather(const Eigen::VectorXd& u, const std::vector<Index>& ids) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) out[static_cast<Eigen::Index>(i)] = u[ids[i]];
  return out;
}

// Dirichlet data with NaN replaced by zero: the affine part of the nodal field.
Eigen::VectorXd known_part(const Eigen::VectorXd& g) { return g.array().isNaN().select(0.0, g); }

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double scale = b.norm();
  const double r = (a * x - b).norm();
  return scale > 0.0 ? r / scale : r;
}

void check_numbering(const CoupledSystem& s) {
  const auto n_master = static_cast<Eigen::Index>(s.interfaces[0].to_volume.size());
  const auto n_slave = static_cast<Eigen::Index>(s.interfaces[1].to_volume.size());
  const auto& c = s.constraint;
  if (s.mortar.D.rows() != n_slave || s.mortar.D.cols() != n_slave || s.mortar.M.rows() != n_slave ||
      s.mortar.M.cols() != n_master || c.D.cols() != n_slave || c.M.cols() != n_master ||
      c.D.rows() != static_cast<Eigen::Index>(c.multiplier_nodes.size()) || c.M.rows() != c.D.rows()) {
    std::ostringstream msg;
    msg << "mortar matrices (D " << s.mortar.D.rows() << "x" << s.mortar.D.cols() << ", M " << s.mortar.M.rows() << "x"
        << s.mortar.M.cols() << ") do not match the interface numbering (" << n_slave << " slave, " << n_master
        << " master nodes)";
    raise(ErrorCode::IndexMap, msg.str());
  }
  for (int k = 0; k < 2; ++k) {
    if (s.interfaces[k].to_volume != s.sub[k].interface) {
      raise(ErrorCode::IndexMap, "subdomain interface block does not follow the interface node order");
    }
  }
}

double constraint_residual(const InterfaceConstraint& c, const Eigen::VectorXd& u_master,
                           const Eigen::VectorXd& u_slave) {
  if (c.D.rows() == 0) return 0.0;
  const Eigen::VectorXd mu = c.M * u_master;
  const double defect = (c.D * u_slave - mu).cwiseAbs().maxCoeff();
  const double scale = mu.cwiseAbs().maxCoeff();
  return scale > 0.0 ? defect / scale : defect;
}

}  // namespace

InterfaceConstraint make_constraint(const MortarMatrices& mortar, const InterfaceMesh& slave,
                                    const std::vector<bool>& slave_fixed) {
  const Index n = slave.num_nodes();
  if (static_cast<Index>(slave_fixed.size()) != n || mortar.D.rows() != n) {
    raise(ErrorCode::IndexMap, "slave Dirichlet flags do not match the slave interface");
  }
  InterfaceConstraint c;
  std::vector<Index> row(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    if (slave_fixed[static_cast<std::size_t>(i)]) {
      c.fixed_nodes.push_back(i);
    } else {
      row[static_cast<std::size_t>(i)] = static_cast<Index>(c.multiplier_nodes.size());
      c.multiplier_nodes.push_back(i);
    }
  }
  std::vector<std::set<Index>> neighbours(static_cast<std::size_t>(n));
  for (Index e = 0; e < slave.num_elements(); ++e) {
    const auto nodes = slave.element(e);
    for (const Index a : nodes) {
      for (const Index b : nodes) {
        if (a != b) neighbours[static_cast<std::size_t>(a)].insert(b);
      }
    }
  }
  Triplets merge;
  for (Index i = 0; i < n; ++i) {
    if (row[static_cast<std::size_t>(i)] >= 0) {
      merge.emplace_back(row[static_cast<std::size_t>(i)], i, 1.0);
      continue;
    }
    std::vector<Index> free;
    for (const Index j : neighbours[static_cast<std::size_t>(i)]) {
      if (row[static_cast<std::size_t>(j)] >= 0) free.push_back(j);
    }
    if (free.empty()) {
      raise(ErrorCode::InvalidArgument,
            "slave interface node " + std::to_string(i) + " is on the Dirichlet boundary without a free neighbour");
    }
    for (const Index j : free) {
      merge.emplace_back(row[static_cast<std::size_t>(j)], i, 1.0 / static_cast<double>(free.size()));
    }
  }
  SparseMatrix r(static_cast<Index>(c.multiplier_nodes.size()), n);
  r.setFromTriplets(merge.begin(), merge.end());
  c.D = r * mortar.D;
  c.M = r * mortar.M;
  return c;
}

CoupledSystem assemble_coupled(const PoissonProblem& problem, const MortarConfig& config) {
  CoupledSystem s;
  const std::array<Side, 2> sides{Side::Master, Side::Slave};
  bool any_dirichlet = false;
  for (int k = 0; k < 2; ++k) {
    const VolumeMesh& mesh = problem.domains[static_cast<std::size_t>(k)];
    s.interfaces[k] = extract_interface(mesh, problem.interface_tag, sides[static_cast<std::size_t>(k)]);
    s.sub[k] = assemble_subdomain(mesh, problem.forcing, s.interfaces[k].to_volume);
    s.dirichlet_values[k] = Eigen::VectorXd::Constant(mesh.num_nodes(), kNaN);
    for (const Index v : tagged_nodes(mesh, problem.dirichlet_tag)) {
      const Vec3& x = mesh.node(v);
      s.dirichlet_values[k][v] = problem.dirichlet ? problem.dirichlet(x.x(), x.y()) : 0.0;
      any_dirichlet = true;
    }
  }
  if (!any_dirichlet) raise(ErrorCode::InvalidArgument, "no Dirichlet boundary: the problem is not well posed");
  s.mortar = assemble(make_interface_pair(s.interfaces[0].mesh, s.interfaces[1].mesh), config);
  std::vector<bool> fixed;
  for (const Index v : s.interfaces[1].to_volume) fixed.push_back(is_dirichlet(s.dirichlet_values[1], v));
  s.constraint = make_constraint(s.mortar, s.interfaces[1].mesh, fixed);
  return s;
}

SaddleSystem assemble_saddle(const CoupledSystem& s) {
  check_numbering(s);
  SaddleSystem out;
  std::array<std::vector<Index>, 2> column;  // volume node -> unknown index, -1 if eliminated
  Index n = 0;
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd& g = s.dirichlet_values[k];
    column[k].assign(static_cast<std::size_t>(g.size()), -1);
    for (Index v = 0; v < g.size(); ++v) {
      if (!is_dirichlet(g, v)) {
        column[k][static_cast<std::size_t>(v)] = n++;
        out.free_nodes[k].push_back(v);
      }
    }
  }
  out.n_multipliers = static_cast<Index>(s.constraint.D.rows());
  const Index total = n + out.n_multipliers;
  out.rhs = Eigen::VectorXd::Zero(total);
  Triplets t;
  std::array<Eigen::VectorXd, 2> g;
  for (int k = 0; k < 2; ++k) {
    g[k] = known_part(s.dirichlet_values[k]);
    const Eigen::VectorXd lifted = s.sub[k].load - s.sub[k].stiffness * g[k];
    const SparseMatrix& a = s.sub[k].stiffness;
    for (int c = 0; c < a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
        const Index r = column[k][static_cast<std::size_t>(it.row())];
        const Index col = column[k][static_cast<std::size_t>(it.col())];
        if (r >= 0 && col >= 0) t.emplace_back(r, col, it.value());
      }
    }
    for (const Index v : out.free_nodes[k]) out.rhs[column[k][static_cast<std::size_t>(v)]] = lifted[v];
  }
  // Multiplier rows: -M u_G1 + D u_G2 = 0, mirrored into the columns.
  const auto add_block = [&](const SparseMatrix& b, int side, double sign) {
    for (int c = 0; c < b.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) {
        const Index row = n + static_cast<Index>(it.row());
        const Index v = s.interfaces[side].to_volume[static_cast<std::size_t>(it.col())];
        const Index col = column[side][static_cast<std::size_t>(v)];
        if (col >= 0) {
          t.emplace_back(row, col, sign * it.value());
          t.emplace_back(col, row, sign * it.value());
        } else {
          out.rhs[row] -= sign * it.value() * g[side][v];
        }
      }
    }
  };
  add_block(s.constraint.M, 0, -1.0);
  add_block(s.constraint.D, 1, 1.0);
  out.matrix.resize(total, total);
  out.matrix.setFromTriplets(t.begin(), t.end());
  out.matrix.makeCompressed();
  return out;
}

CondensedSystem condense(const CoupledSystem& s) {
  check_numbering(s);
  const InterfaceConstraint& con = s.constraint;
  const auto& master_if = s.interfaces[0].to_volume;
  const auto& slave_if = s.interfaces[1].to_volume;

  // Free slave interface values: D_ff u_f = M u_G1 - D_fe g_e.
  const auto n_free = static_cast<Eigen::Index>(con.multiplier_nodes.size());
  SparseMatrix select_free(static_cast<Eigen::Index>(slave_if.size()), n_free);
  {
    Triplets t;
    for (Eigen::Index r = 0; r < n_free; ++r) t.emplace_back(con.multiplier_nodes[static_cast<std::size_t>(r)], r, 1.0);
    select_free.setFromTriplets(t.begin(), t.end());
  }
  const SparseMatrix d_ff = con.D * select_free;
  std::vector<int> empty;
  {
    const Eigen::VectorXd mass = Eigen::MatrixXd(d_ff).cwiseAbs().rowwise().sum();
    for (Eigen::Index r = 0; r < n_free; ++r) {
      if (mass[r] == 0.0) empty.push_back(con.multiplier_nodes[static_cast<std::size_t>(r)]);
    }
  }
  if (!empty.empty()) throw SingularDError(std::move(empty));
  Eigen::VectorXd g_slave_if = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(slave_if.size()));
  for (const Index i : con.fixed_nodes) g_slave_if[i] = s.dirichlet_values[1][slave_if[static_cast<std::size_t>(i)]];

  CondensedSystem out;
  Eigen::VectorXd free_offset;
  if (con.fixed_nodes.empty()) {
    out.transfer = compute_E(s.mortar).to_dense();  // D symmetric: LDL^T path
    free_offset = Eigen::VectorXd::Zero(n_free);
  } else {
    Eigen::SparseLU<SparseMatrix> lu(d_ff);
    if (lu.info() != Eigen::Success) raise(ErrorCode::SolverFailure, "factorization of D failed: " + lu.lastErrorMessage());
    out.transfer = lu.solve(Eigen::MatrixXd(con.M));
    free_offset = lu.solve(Eigen::VectorXd(-(con.D * g_slave_if)));
    if (!out.transfer.allFinite() || !free_offset.allFinite()) {
      raise(ErrorCode::SolverFailure, "solve with D produced non-finite values");
    }
  }

  std::array<std::vector<Index>, 2> column;
  Index n = 0;
  std::vector<bool> governed(static_cast<std::size_t>(s.dirichlet_values[1].size()), false);
  for (const Index i : con.multiplier_nodes) governed[static_cast<std::size_t>(slave_if[static_cast<std::size_t>(i)])] = true;
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd& g = s.dirichlet_values[k];
    column[k].assign(static_cast<std::size_t>(g.size()), -1);
    for (Index v = 0; v < g.size(); ++v) {
      if (!is_dirichlet(g, v) && !(k == 1 && governed[static_cast<std::size_t>(v)])) column[k][static_cast<std::size_t>(v)] = n++;
    }
  }
  std::array<Triplets, 2> p;
  for (int k = 0; k < 2; ++k) {
    out.offset[k] = known_part(s.dirichlet_values[k]);
    for (std::size_t v = 0; v < column[k].size(); ++v) {
      if (column[k][v] >= 0) p[k].emplace_back(static_cast<Index>(v), column[k][v], 1.0);
    }
  }
  // Governed slave rows: u_f = E u_G1 + offset, Dirichlet master values folded into the offset.
  const Eigen::VectorXd g_master = known_part(s.dirichlet_values[0]);
  for (Eigen::Index r = 0; r < n_free; ++r) {
    const Index slave_v = slave_if[static_cast<std::size_t>(con.multiplier_nodes[static_cast<std::size_t>(r)])];
    out.offset[1][slave_v] = free_offset[r];
    for (Eigen::Index l = 0; l < out.transfer.cols(); ++l) {
      const double e = out.transfer(r, l);
      if (e == 0.0) continue;
      const Index master_v = master_if[static_cast<std::size_t>(l)];
      const Index col = column[0][static_cast<std::size_t>(master_v)];
      if (col >= 0) {
        p[1].emplace_back(slave_v, col, e);
      } else {
        out.offset[1][slave_v] += e * g_master[master_v];
      }
    }
  }
  out.matrix.resize(n, n);
  out.rhs = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < 2; ++k) {
    const SparseMatrix& a = s.sub[k].stiffness;
    out.prolongation[k].resize(a.rows(), n);
    out.prolongation[k].setFromTriplets(p[k].begin(), p[k].end());
    const SparseMatrix& pk = out.prolongation[k];
    out.matrix += SparseMatrix(pk.transpose() * (a * pk));
    out.rhs += pk.transpose() * (s.sub[k].load - a * out.offset[k]);
  }
  // Symmetric up to roundoff of the triple product; make it exact.
  out.matrix = SparseMatrix(0.5 * (out.matrix + SparseMatrix(out.matrix.transpose())));
  out.matrix.makeCompressed();
  return out;
}

namespace {

SolutionFields finish(const CoupledSystem& s, SolutionFields f) {
  f.u_interface_master = gather(f.u[0], s.interfaces[0].to_volume);
  f.u_interface_slave = gather(f.u[1], s.interfaces[1].to_volume);
  f.constraint_residual = constraint_residual(s.constraint, f.u_interface_master, f.u_interface_slave);
  return f;
}

SolutionFields solve_condensed(const CoupledSystem& s) {
  const CondensedSystem c = condense(s);
  SolutionFields f;
  Eigen::VectorXd z;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(c.matrix);
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
    z = ldlt.solve(c.rhs);
    f.solver = "ldlt";
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(c.matrix);
    cg.setTolerance(kSolverTol);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * c.matrix.rows()));
    z = cg.solve(c.rhs);
    f.solver = "cg";
    if (cg.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "condensed system is not SPD: LDL^T has non-positive pivots and CG stopped after " << cg.iterations()
          << " iterations at relative residual " << cg.error();
      raise(ErrorCode::SolverFailure, msg.str());
    }
  }
  f.solver_residual = relative_residual(c.matrix, z, c.rhs);
  if (!std::isfinite(f.solver_residual) || f.solver_residual > 1e-8) {
    raise(ErrorCode::SolverFailure, "condensed solve residual " + std::to_string(f.solver_residual));
  }
  for (int k = 0; k < 2; ++k) f.u[k] = c.prolongation[k] * z + c.offset[k];

  // Multipliers from the governed slave interface rows: (A2 u2)_f + D_ff^T lambda = f_f.
  const InterfaceConstraint& con = s.constraint;
  std::vector<Index> governed;
  for (const Index i : con.multiplier_nodes) governed.push_back(s.interfaces[1].to_volume[static_cast<std::size_t>(i)]);
  const Eigen::VectorXd r = gather(s.sub[1].load - s.sub[1].stiffness * f.u[1], governed);
  Eigen::MatrixXd d_ff(con.D.rows(), con.D.rows());
  for (std::size_t j = 0; j < con.multiplier_nodes.size(); ++j) {
    d_ff.col(static_cast<Eigen::Index>(j)) = Eigen::MatrixXd(con.D.col(con.multiplier_nodes[j]));
  }
  f.lambda = d_ff.transpose().partialPivLu().solve(r);
  return finish(s, std::move(f));
}

SolutionFields solve_saddle(const CoupledSystem& s) {
  const SaddleSystem sys = assemble_saddle(s);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(sys.matrix);
  if (lu.info() != Eigen::Success) {
    raise(ErrorCode::SolverFailure, "saddle-point factorization failed: " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd x = lu.solve(sys.rhs);
  SolutionFields f;
  f.solver = "lu";
  f.solver_residual = relative_residual(sys.matrix, x, sys.rhs);
  if (!std::isfinite(f.solver_residual) || f.solver_residual > 1e-8) {
    raise(ErrorCode::SolverFailure, "saddle-point solve residual " + std::to_string(f.solver_residual));
  }
  Index pos = 0;
  for (int k = 0; k < 2; ++k) {
    f.u[k] = known_part(s.dirichlet_values[k]);
    for (const Index v : sys.free_nodes[k]) f.u[k][v] = x[pos++];
  }
  f.lambda = x.tail(sys.n_multipliers);
  return finish(s, std::move(f));
}

}  // namespace

SolutionFields solve(const CoupledSystem& system, SolvePath path) {
  return path == SolvePath::Condensed ? solve_condensed(system) : solve_saddle(system);
}

SolutionFields solve(const PoissonProblem& problem, const MortarConfig& config, SolvePath path) {
  return solve(assemble_coupled(problem, config), path);
}

}  // namespace mrbf
