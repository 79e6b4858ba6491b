#pragma once

#include "mrbf/mesh.hpp"
#include "mrbf/mortar.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrbf {

using ScalarField = std::function<double(double x, double y)>;
using GradientField = std::function<Eigen::Vector2d(double x, double y)>;

struct ExactSolution {
  ScalarField value;
  GradientField gradient;
};

/// -Laplace(u) = f on two Tri3 subdomains glued along tagged interface edges.
/// Subdomain 0 carries the master side of the interface, subdomain 1 the slave side.
struct PoissonProblem {
  std::array<VolumeMesh, 2> domains;
  ScalarField forcing;
  ScalarField dirichlet;
  std::optional<ExactSolution> exact;
  std::string interface_tag = "interface";
  std::string dirichlet_tag = "dirichlet";
};

/// u = 16 x y (1-x)(1-y) on the split unit square, homogeneous Dirichlet data.
[[nodiscard]] PoissonProblem manufactured_problem(VolumeMesh master, VolumeMesh slave);

/// Interface mesh extracted from the tagged edges of a volume mesh.
struct InterfaceExtraction {
  InterfaceMesh mesh;          ///< Seg2 in R^2
  std::vector<Index> to_volume;  ///< interface node -> volume node
};

/// Throws invalid-argument if no edge carries `tag`, index-map if a tagged
/// edge is not a boundary edge of a triangle.
[[nodiscard]] InterfaceExtraction extract_interface(const VolumeMesh& mesh, std::string_view tag, Side side);

/// Nodes lying on edges tagged `tag`, ascending.
[[nodiscard]] std::vector<Index> tagged_nodes(const VolumeMesh& mesh, std::string_view tag);

/// P1 stiffness and load of one subdomain, full and split into interior (I)
/// and interface (G) blocks. Interface order follows `interface_nodes`.
struct SubdomainSystem {
  SparseMatrix stiffness;
  Eigen::VectorXd load;
  std::vector<Index> interior;
  std::vector<Index> interface;
  SparseMatrix A_II, A_IG, A_GG;
  Eigen::VectorXd f_I, f_G;
};

/// Loads use a degree-4 triangle rule. Throws degenerate-element for
/// inverted triangles, index-map if an interface node is out of range.
[[nodiscard]] SubdomainSystem assemble_subdomain(const VolumeMesh& mesh, const ScalarField& forcing,
                                                 const std::vector<Index>& interface_nodes = {});

/// Mortar constraint rows actually imposed. Slave interface nodes on the
/// Dirichlet boundary keep their Dirichlet value and carry no multiplier;
/// their rows of D and M are merged into the rows of their free interface
/// neighbours so that the multiplier basis still sums to one.
struct InterfaceConstraint {
  std::vector<Index> multiplier_nodes;  ///< slave interface nodes (local ids) with a multiplier
  std::vector<Index> fixed_nodes;       ///< slave interface nodes (local ids) with Dirichlet data
  SparseMatrix D;                       ///< multipliers x slave interface nodes
  SparseMatrix M;                       ///< multipliers x master interface nodes
};

/// Everything needed to solve one coupled problem.
struct CoupledSystem {
  std::array<SubdomainSystem, 2> sub;
  std::array<InterfaceExtraction, 2> interfaces;
  MortarMatrices mortar;
  InterfaceConstraint constraint;
  /// Prescribed values of the Dirichlet nodes, NaN elsewhere.
  std::array<Eigen::VectorXd, 2> dirichlet_values;
};

/// Extracts interfaces, assembles subdomains, mortar matrices and the constraint.
[[nodiscard]] CoupledSystem assemble_coupled(const PoissonProblem& problem, const MortarConfig& config);

/// Builds the imposed constraint from D, M and the slave Dirichlet nodes.
/// Throws invalid-argument if a Dirichlet slave node has no free neighbour.
[[nodiscard]] InterfaceConstraint make_constraint(const MortarMatrices& mortar, const InterfaceMesh& slave,
                                                  const std::vector<bool>& slave_fixed);

/// Symmetric indefinite saddle system in (u_master, u_slave, lambda) with
/// Dirichlet nodes eliminated. Multiplier rows are [-M D] of the constraint.
struct SaddleSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::array<std::vector<Index>, 2> free_nodes;  ///< volume nodes kept as unknowns
  Index n_multipliers = 0;
};

/// Throws index-map if the interface numbering does not match D and M.
[[nodiscard]] SaddleSystem assemble_saddle(const CoupledSystem& system);

/// Condensed SPD system in (u_1, u_2, u_G1): K = P^T A P, b = P^T (f - A g),
/// where P maps the unknowns to both subdomains' nodal values with
/// u_G2 = E u_G1 (+ Dirichlet part) and g holds the Dirichlet data.
struct CondensedSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::array<SparseMatrix, 2> prolongation;
  std::array<Eigen::VectorXd, 2> offset;
  /// Free slave interface nodes x master interface nodes.
  Eigen::MatrixXd transfer;
};

/// Throws SingularDError if a multiplier row of D is empty.
[[nodiscard]] CondensedSystem condense(const CoupledSystem& system);

struct SolutionFields {
  std::array<Eigen::VectorXd, 2> u;  ///< nodal values per subdomain
  Eigen::VectorXd u_interface_master;
  Eigen::VectorXd u_interface_slave;
  Eigen::VectorXd lambda;
  double solver_residual = 0.0;      ///< relative residual of the solved system
  double constraint_residual = 0.0;  ///< max|D u_G2 - M u_G1| / max|M u_G1| over imposed rows
  std::string solver;                ///< "ldlt", "cg" or "lu"
};

enum class SolvePath { Condensed, Saddle };

/// Solves the coupled problem. The condensed path factors K by sparse LDL^T
/// and falls back to CG (relative residual 1e-10) when pivots are not positive.
/// Throws solver-failure with diagnostics.
[[nodiscard]] SolutionFields solve(const PoissonProblem& problem, const MortarConfig& config,
                                   SolvePath path = SolvePath::Condensed);
[[nodiscard]] SolutionFields solve(const CoupledSystem& system, SolvePath path = SolvePath::Condensed);

struct ErrorReport {
  double l2_broken = 0.0;
  double h1_broken = 0.0;       ///< full H1 norm (value and gradient)
  double h1_semi_broken = 0.0;  ///< gradient part only
  std::array<double, 2> l2{};
  std::array<double, 2> h1{};
  std::optional<double> observed_order;
};

/// Broken L2 / H1 norms of u_h - u*; throws invalid-argument without an exact solution.
[[nodiscard]] ErrorReport broken_norms(const SolutionFields& fields, const PoissonProblem& problem);

/// Broken norms of v_h - u* for arbitrary nodal fields.
[[nodiscard]] ErrorReport broken_norms(const std::array<Eigen::VectorXd, 2>& nodal, const PoissonProblem& problem);

/// "node,x,y,u" rows, subdomain 0 first; node ids continue across subdomains.
void write_solution_csv(std::ostream& out, const SolutionFields& fields, const PoissonProblem& problem);

}  // namespace mrbf
