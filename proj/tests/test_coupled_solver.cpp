#include "mrbf/errors.hpp"
#include "mrbf/poisson.hpp"
#include "mrbf/structured.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace mrbf;

namespace {

MortarConfig scheme(Scheme s) {
  MortarConfig c;
  c.scheme = s;
  c.n_gauss = 2;
  return c;
}

PoissonProblem split_problem(int nx_master, int nx_slave, double curve = 0.0) {
  auto sq = split_unit_square(nx_master, nx_slave, curve);
  return manufactured_problem(std::move(sq.master), std::move(sq.slave));
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Column of the condensed system holding the unknown of volume node v.
Index column_of(const SparseMatrix& p, Index v) {
  for (int c = 0; c < p.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(p, c); it; ++it) {
      if (it.row() == v) return static_cast<Index>(it.col());
    }
  }
  return -1;
}

}  // namespace

TEST(Subdomain, SingleTriangleStiffness) {
  const VolumeMesh tri(2, ElementKind::Tri3, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {0, 1, 2});
  const auto s = assemble_subdomain(tri, {});
  Eigen::Matrix3d expected;
  expected << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  expected *= 0.5;
  EXPECT_LE(max_abs(Eigen::MatrixXd(s.stiffness) - expected), 1e-15);
  EXPECT_LE(s.load.cwiseAbs().maxCoeff(), 0.0);
  const auto loaded = assemble_subdomain(tri, [](double, double) { return 1.0; });
  EXPECT_LE((loaded.load.array() - 1.0 / 6).abs().maxCoeff(), 1e-15);
}

TEST(Subdomain, TranslationInvariantStiffness) {
  const auto a = rectangle_tri_mesh(0, 1, 0, 1, 3, 2);
  std::vector<Vec3> moved = a.nodes();
  for (auto& x : moved) x += Vec3(7.5, -3.25, 0.0);
  const VolumeMesh b(2, ElementKind::Tri3, moved, a.connectivity());
  EXPECT_LE(max_abs(Eigen::MatrixXd(assemble_subdomain(a, {}).stiffness) -
                    Eigen::MatrixXd(assemble_subdomain(b, {}).stiffness)),
            1e-13);
}

TEST(Subdomain, StiffnessSymmetricSemidefiniteWithConstantKernel) {
  const auto mesh = rectangle_tri_mesh(0, 2, 0, 1, 4, 3, [](const Vec3& p) {
    return Vec3(p.x() + 0.05 * std::sin(3 * p.y()), p.y() + 0.04 * std::cos(2 * p.x()), 0);
  });
  const Eigen::MatrixXd k(assemble_subdomain(mesh, {}).stiffness);
  EXPECT_LE(max_abs(k - k.transpose()), 1e-15);
  EXPECT_LE((k * Eigen::VectorXd::Ones(k.cols())).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), -1e-13);
}

TEST(Subdomain, InvertedTriangleRejected) {
  const VolumeMesh tri(2, ElementKind::Tri3, {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0)}, {0, 1, 2});
  try {
    (void)assemble_subdomain(tri, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateElement);
  }
}

TEST(Subdomain, InterfaceBlocksPartitionTheMatrix) {
  const auto sq = split_unit_square(4, 6);
  const auto ext = extract_interface(sq.master, kInterfaceTag, Side::Master);
  EXPECT_EQ(ext.mesh.num_nodes(), 5);
  EXPECT_EQ(ext.mesh.num_elements(), 4);
  for (std::size_t i = 0; i < ext.to_volume.size(); ++i) {
    EXPECT_NEAR(sq.master.node(ext.to_volume[i]).y(), 0.5, 1e-15);
  }
  const auto s = assemble_subdomain(sq.master, [](double x, double y) { return x + y; }, ext.to_volume);
  EXPECT_EQ(s.interior.size() + s.interface.size(), static_cast<std::size_t>(sq.master.num_nodes()));
  const Eigen::MatrixXd full(s.stiffness);
  for (std::size_t i = 0; i < s.interface.size(); ++i) {
    for (std::size_t j = 0; j < s.interface.size(); ++j) {
      EXPECT_EQ(s.A_GG.coeff(static_cast<Index>(i), static_cast<Index>(j)), full(s.interface[i], s.interface[j]));
    }
  }
  EXPECT_DOUBLE_EQ(s.f_I.sum() + s.f_G.sum(), s.load.sum());
}

TEST(Subdomain, NonBoundaryTaggedEdgeIsIndexMapError) {
  auto mesh = rectangle_tri_mesh(0, 1, 0, 1, 2, 2);
  mesh.tag_edge(0, 4, "bad");  // interior diagonal of the first cell
  try {
    (void)extract_interface(mesh, "bad", Side::Master);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexMap);
  }
  EXPECT_THROW((void)extract_interface(mesh, "missing", Side::Master), Error);
}

TEST(Coupled, ZeroDataGivesZeroSolution) {
  auto p = split_problem(4, 6);
  p.forcing = [](double, double) { return 0.0; };
  for (const auto path : {SolvePath::Condensed, SolvePath::Saddle}) {
    const auto f = solve(p, scheme(Scheme::EB), path);
    EXPECT_EQ(f.u[0].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(f.u[1].cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Coupled, ConformingSplitMatchesMergedMesh) {
  const auto p = split_problem(6, 6);
  const auto merged = oracle::merged_solve({&p.domains[0], &p.domains[1]}, p.forcing, p.dirichlet);
  for (const auto path : {SolvePath::Condensed, SolvePath::Saddle}) {
    const auto f = solve(p, scheme(Scheme::SB1D), path);
    double worst = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      for (Index v = 0; v < p.domains[k].num_nodes(); ++v) {
        const Vec3& x = p.domains[k].node(v);
        worst = std::max(worst, std::abs(f.u[k][v] - merged.at(x.x(), x.y())));
      }
    }
    EXPECT_LE(worst, 1e-10);
    EXPECT_LE(f.solver_residual, 1e-10);
  }
}

TEST(Coupled, ConformingCondensedBlocksAreSums) {
  const auto p = split_problem(4, 4);
  const auto sys = assemble_coupled(p, scheme(Scheme::SB1D));
  const auto c = condense(sys);
  const auto& m_if = sys.interfaces[0].to_volume;
  const auto& s_if = sys.interfaces[1].to_volume;
  // The two interface node lists are in the same (ascending x) order on both sides.
  for (std::size_t i = 1; i + 1 < m_if.size(); ++i) {
    for (std::size_t j = 1; j + 1 < m_if.size(); ++j) {
      const Index ci = column_of(c.prolongation[0], m_if[i]);
      const Index cj = column_of(c.prolongation[0], m_if[j]);
      const double expected = sys.sub[0].stiffness.coeff(m_if[i], m_if[j]) + sys.sub[1].stiffness.coeff(s_if[i], s_if[j]);
      EXPECT_NEAR(c.matrix.coeff(ci, cj), expected, 1e-12);
    }
    const Index ci = column_of(c.prolongation[0], m_if[i]);
    EXPECT_NEAR(c.rhs[ci], sys.sub[0].load[m_if[i]] + sys.sub[1].load[s_if[i]], 1e-12);
  }
}

TEST(Coupled, CondensedMatrixSymmetricPositiveDefinite) {
  for (const auto s : {Scheme::RB, Scheme::EB}) {
    const auto p = split_problem(4, 6, 0.1);
    const auto sys = assemble_coupled(p, scheme(s));
    const Eigen::MatrixXd k(condense(sys).matrix);
    EXPECT_LE(max_abs(k - k.transpose()), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Coupled, SaddleAndCondensedAgree) {
  for (const double curve : {0.0, 0.1}) {
    for (const auto s : {Scheme::RB, Scheme::EB, Scheme::SB1D}) {
      if (curve != 0.0 && s == Scheme::SB1D) continue;
      const auto sys = assemble_coupled(split_problem(8, 12, curve), scheme(s));
      const auto a = solve(sys, SolvePath::Condensed);
      const auto b = solve(sys, SolvePath::Saddle);
      for (std::size_t k = 0; k < 2; ++k) EXPECT_LE((a.u[k] - b.u[k]).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LE((a.lambda - b.lambda).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, b.lambda.cwiseAbs().maxCoeff()));
      EXPECT_LE(a.constraint_residual, 1e-9);
      EXPECT_LE(b.constraint_residual, 1e-9);
      EXPECT_LE(b.solver_residual, 1e-10);
    }
  }
}

TEST(Coupled, SaddleMatrixSymmetric) {
  const auto sys = assemble_coupled(split_problem(4, 6), scheme(Scheme::RB));
  const SaddleSystem s = assemble_saddle(sys);
  EXPECT_EQ(SparseMatrix(s.matrix - SparseMatrix(s.matrix.transpose())).norm(), 0.0);
}

TEST(Coupled, MismatchedMortarNumberingIsIndexMapError) {
  auto sys = assemble_coupled(split_problem(4, 6), scheme(Scheme::EB));
  sys.mortar.M.conservativeResize(sys.mortar.M.rows(), sys.mortar.M.cols() + 1);
  try {
    (void)assemble_saddle(sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexMap);
  }
}

TEST(Coupled, ManufacturedCentreValue) {
  const auto f = solve(split_problem(16, 24), scheme(Scheme::RB));
  const auto& mesh = split_unit_square(16, 24).master;
  for (Index v = 0; v < mesh.num_nodes(); ++v) {
    if ((mesh.node(v) - Vec3(0.5, 0.5, 0)).norm() < 1e-12) {
      EXPECT_NEAR(f.u[0][v], 1.0, 5e-3);
    }
  }
}

TEST(Coupled, LinearSolutionReproduced) {
  const auto linear = [](double x, double y) { return 1.0 + 2.0 * x - 3.0 * y; };
  const auto check = [&](PoissonProblem p, Scheme s, double tol) {
    p.forcing = [](double, double) { return 0.0; };
    p.dirichlet = linear;
    const auto f = solve(p, scheme(s));
    for (std::size_t k = 0; k < 2; ++k) {
      for (Index v = 0; v < p.domains[k].num_nodes(); ++v) {
        const Vec3& x = p.domains[k].node(v);
        EXPECT_NEAR(f.u[k][v], linear(x.x(), x.y()), tol) << "scheme " << to_string(s);
      }
    }
  };
  check(split_problem(4, 6), Scheme::SB1D, 1e-10);
  check(split_problem(6, 4), Scheme::SB1D, 1e-10);
  check(split_problem(4, 4), Scheme::EB, 1e-10);
}

TEST(Coupled, NoDirichletRejected) {
  auto p = split_problem(4, 6);
  p.dirichlet_tag = "nothing";
  EXPECT_THROW((void)solve(p, scheme(Scheme::EB)), Error);
}

TEST(Norms, InterpolatedLinearIsExact) {
  auto p = split_problem(4, 6, 0.1);
  const auto lin = [](double x, double y) { return 0.5 - x + 4 * y; };
  p.exact = ExactSolution{lin, [](double, double) { return Eigen::Vector2d(-1, 4); }};
  std::array<Eigen::VectorXd, 2> nodal;
  for (std::size_t k = 0; k < 2; ++k) {
    nodal[k].resize(p.domains[k].num_nodes());
    for (Index v = 0; v < p.domains[k].num_nodes(); ++v) nodal[k][v] = lin(p.domains[k].node(v).x(), p.domains[k].node(v).y());
  }
  const auto r = broken_norms(nodal, p);
  EXPECT_LE(r.l2_broken, 1e-12);
  EXPECT_LE(r.h1_broken, 1e-12);
}

TEST(Norms, ZeroFieldAgainstOne) {
  auto p = split_problem(4, 6);
  p.exact = ExactSolution{[](double, double) { return 1.0; }, [](double, double) { return Eigen::Vector2d(0, 0); }};
  const std::array<Eigen::VectorXd, 2> zero{Eigen::VectorXd::Zero(p.domains[0].num_nodes()),
                                            Eigen::VectorXd::Zero(p.domains[1].num_nodes())};
  const auto r = broken_norms(zero, p);
  EXPECT_NEAR(r.l2_broken, 1.0, 1e-13);
  EXPECT_NEAR(r.h1_broken, 1.0, 1e-13);
  EXPECT_NEAR(std::hypot(r.l2[0], r.l2[1]), r.l2_broken, 1e-15);
  p.exact.reset();
  EXPECT_THROW((void)broken_norms(zero, p), Error);
}

TEST(Norms, ConvergenceOrdersAndMonotoneEnergy) {
  std::vector<double> h;
  std::vector<double> l2;
  std::vector<double> h1;
  double previous = INFINITY;
  for (int level = 0; level < 4; ++level) {
    const int nx = 4 << level;
    const auto p = split_problem(nx, 6 << level);
    const auto r = broken_norms(solve(p, scheme(Scheme::EB)), p);
    h.push_back(1.0 / (6 << level));
    l2.push_back(r.l2_broken);
    h1.push_back(r.h1_broken);
    EXPECT_LT(r.h1_semi_broken, previous);
    previous = r.h1_semi_broken;
  }
  EXPECT_NEAR(oracle::fitted_order({h.end() - 3, h.end()}, {l2.end() - 3, l2.end()}), 2.0, 0.2);
  EXPECT_NEAR(oracle::fitted_order({h.end() - 3, h.end()}, {h1.end() - 3, h1.end()}), 1.0, 0.2);
}

TEST(Export, SolutionCsv) {
  const auto p = split_problem(4, 6);
  const auto f = solve(p, scheme(Scheme::EB));
  std::ostringstream out;
  write_solution_csv(out, f, p);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "node,x,y,u");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, p.domains[0].num_nodes() + p.domains[1].num_nodes());
}
