#pragma once

#include "mrbf/mesh.hpp"
#include "mrbf/rbf.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mrbf {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Master (Gamma_1) and slave (Gamma_2) interface meshes.
struct InterfacePair {
  InterfaceMesh master;
  InterfaceMesh slave;
  double gap_tolerance = 0.0;
};

/// Validates dimensions and element families; the gap tolerance defaults to
/// half the largest element circumdiameter of either side.
[[nodiscard]] InterfacePair make_interface_pair(InterfaceMesh master, InterfaceMesh slave,
                                                std::optional<double> gap_tolerance = std::nullopt);

enum class Scheme { RB, EB, SB1D };

[[nodiscard]] std::string_view to_string(Scheme scheme);
/// "rb", "eb", "sb".
[[nodiscard]] Scheme scheme_from_string(std::string_view name);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 20;
};

struct RbfSettings {
  KernelFamily family = KernelFamily::Gaussian;
  PointLayout layout{LayoutVariant::UniformGrid, 6};
  /// Experimental override of the circumdiameter shape parameter.
  std::optional<double> epsilon;
};

struct MortarConfig {
  Scheme scheme = Scheme::RB;
  int n_gauss = 2;
  RbfSettings rbf;
  double support_tol = 1e-6;
  NewtonOptions newton;

  /// Throws invalid-argument if n_gauss is below the minimum for `slave_kind`,
  /// support_tol is outside [0, 0.1] or the Newton settings are not positive.
  void validate(ElementKind slave_kind) const;
};

/// Smallest admissible Gauss rule on slave elements: 2 (Seg2), 3 (Seg3), 4 (Quad4), 9 (Quad8).
[[nodiscard]] int minimum_gauss_points(ElementKind slave_kind);

struct AssemblyStats {
  long pairs_visited = 0;
  long gauss_points_total = 0;
  long gauss_points_dropped = 0;
  /// Slave elements without any master candidate from the contact search.
  std::vector<Index> uncovered_slaves;

  [[nodiscard]] double dropped_fraction() const {
    return gauss_points_total ? static_cast<double>(gauss_points_dropped) / gauss_points_total : 0.0;
  }
};

/// Quadrature points of one slave element credited to one master element.
struct PairRecord {
  Index slave = -1;
  Index master = -1;
  int points = 0;
};

struct MortarMatrices {
  SparseMatrix D;  ///< slave x slave
  SparseMatrix M;  ///< slave x master
  Scheme scheme = Scheme::RB;
  int n_gauss = 0;
  AssemblyStats stats;
  std::vector<PairRecord> provenance;
};

/// Transfer operator E = D^-1 M, dense when small.
class MortarOperator {
 public:
  static constexpr double kDenseLimit = 1e6;

  MortarOperator(Eigen::MatrixXd dense);
  MortarOperator(SparseMatrix sparse);

  [[nodiscard]] bool is_dense() const noexcept { return dense_.has_value(); }
  [[nodiscard]] Index rows() const;
  [[nodiscard]] Index cols() const;
  [[nodiscard]] Eigen::MatrixXd to_dense() const;
  [[nodiscard]] SparseMatrix to_sparse() const;
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  [[nodiscard]] Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const;
  [[nodiscard]] Eigen::VectorXd row_sums() const;

 private:
  std::optional<Eigen::MatrixXd> dense_;
  std::optional<SparseMatrix> sparse_;
};

struct SlaveCandidates {
  Index slave = -1;
  std::vector<Index> masters;
};

/// Bounding-box contact search: every master element whose node bounding box,
/// inflated by the gap tolerance, meets the inflated box of the slave element.
/// One entry per slave element, in slave order; uncovered slaves have no masters.
[[nodiscard]] std::vector<SlaveCandidates> contact_search(const InterfacePair& pair);

struct Projection {
  RefCoord xi = RefCoord::Zero();
  bool converged = false;
  int iterations = 0;
};

/// Closest point of master element `elem` to x by Gauss-Newton iteration from
/// the element centre. Converged when the components of x - x(xi) along the
/// unit tangents drop below options.tol.
[[nodiscard]] Projection project_point_newton(const InterfaceMesh& master, Index elem, const Vec3& x,
                                              const NewtonOptions& options = {});

/// True if every value lies in [-tol, 1 + tol].
[[nodiscard]] bool support_detect(std::span<const double> values, double tol);
/// Reference-coordinate form used by the element-based scheme.
[[nodiscard]] bool support_detect(ElementKind kind, const Projection& projection, double tol);

[[nodiscard]] MortarMatrices assemble_rb(const InterfacePair& pair, const MortarConfig& config);
[[nodiscard]] MortarMatrices assemble_eb(const InterfacePair& pair, const MortarConfig& config);
/// Exact integration on the common refinement of two collinear, affine 1D meshes.
/// Throws invalid-geometry otherwise.
[[nodiscard]] MortarMatrices assemble_sb_1d(const InterfacePair& pair, const MortarConfig& config);
/// Dispatches on config.scheme.
[[nodiscard]] MortarMatrices assemble(const InterfacePair& pair, const MortarConfig& config);

/// Solves D E = M by sparse factorization. Throws SingularDError naming the
/// slave nodes whose rows of D are empty, solver-failure if D cannot be factored.
[[nodiscard]] MortarOperator compute_E(const MortarMatrices& matrices);

/// u_slave = E u_master.
[[nodiscard]] Eigen::VectorXd interface_transfer(const MortarOperator& op, const Eigen::VectorXd& u_master);

struct ConsistencyReport {
  double row_sum_defect = 0.0;  ///< max_i |sum_k E[i,k] - 1|, infinite if D is singular
  double dropped_fraction = 0.0;
  std::vector<Index> uncovered_slaves;
  std::vector<int> empty_slave_rows;
};

[[nodiscard]] ConsistencyReport consistency_report(const MortarMatrices& matrices);

/// "row col value" triples (0-based) after a header line "% rows cols nnz".
void write_coo(std::ostream& out, const SparseMatrix& matrix);
[[nodiscard]] SparseMatrix read_coo(std::istream& in);

}  // namespace mrbf
