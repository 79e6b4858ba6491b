#include "mrbf/errors.hpp"
#include "mrbf/mortar.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace mrbf {

MortarOperator::MortarOperator(Eigen::MatrixXd dense) : dense_(std::move(dense)) {}
MortarOperator::MortarOperator(SparseMatrix sparse) : sparse_(std::move(sparse)) {}

Index MortarOperator::rows() const { return static_cast<Index>(dense_ ? dense_->rows() : sparse_->rows()); }
Index MortarOperator::cols() const { return static_cast<Index>(dense_ ? dense_->cols() : sparse_->cols()); }

Eigen::MatrixXd MortarOperator::to_dense() const { return dense_ ? *dense_ : Eigen::MatrixXd(*sparse_); }

SparseMatrix MortarOperator::to_sparse() const { return sparse_ ? *sparse_ : dense_->sparseView(); }

Eigen::VectorXd MortarOperator::apply(const Eigen::VectorXd& u) const {
  if (u.size() != cols()) {
    raise(ErrorCode::DimensionMismatch, "master vector has " + std::to_string(u.size()) + " entries, operator expects " +
                                            std::to_string(cols()));
  }
  return dense_ ? Eigen::VectorXd(*dense_ * u) : Eigen::VectorXd(*sparse_ * u);
}

Eigen::VectorXd MortarOperator::apply_transpose(const Eigen::VectorXd& v) const {
  if (v.size() != rows()) raise(ErrorCode::DimensionMismatch, "slave vector length does not match operator");
  return dense_ ? Eigen::VectorXd(dense_->transpose() * v) : Eigen::VectorXd(sparse_->transpose() * v);
}

Eigen::VectorXd MortarOperator::row_sums() const { return apply(Eigen::VectorXd::Ones(cols())); }

namespace {

std::vector<int> empty_rows(const SparseMatrix& d) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(d.rows());
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) mass[it.row()] += std::abs(it.value());
  }
  std::vector<int> out;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

MortarOperator compute_E(const MortarMatrices& matrices) {
  const SparseMatrix& d = matrices.D;
  const SparseMatrix& m = matrices.M;
  if (d.rows() != d.cols() || d.rows() != m.rows()) raise(ErrorCode::DimensionMismatch, "D and M do not match");
  if (auto rows = empty_rows(d); !rows.empty()) throw SingularDError(std::move(rows));

  const bool dense = static_cast<double>(m.rows()) * static_cast<double>(m.cols()) <= MortarOperator::kDenseLimit;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(d);
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
    if (dense) return MortarOperator(Eigen::MatrixXd(ldlt.solve(Eigen::MatrixXd(m))));
    SparseMatrix e = ldlt.solve(m);
    e.prune(1e-15, 1.0);
    return MortarOperator(std::move(e));
  }
  // D is symmetric but not positive definite (partially covered rows): fall back to LU.
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(d);
  if (lu.info() != Eigen::Success) {
    raise(ErrorCode::SolverFailure, "factorization of D failed: " + lu.lastErrorMessage());
  }
  const Eigen::MatrixXd e = lu.solve(Eigen::MatrixXd(m));
  if (!e.allFinite()) raise(ErrorCode::SolverFailure, "solve with D produced non-finite values");
  if (dense) return MortarOperator(e);
  return MortarOperator(SparseMatrix(e.sparseView(1.0, 1e-15)));
}

Eigen::VectorXd interface_transfer(const MortarOperator& op, const Eigen::VectorXd& u_master) {
  return op.apply(u_master);
}

ConsistencyReport consistency_report(const MortarMatrices& matrices) {
  ConsistencyReport r;
  r.dropped_fraction = matrices.stats.dropped_fraction();
  r.uncovered_slaves = matrices.stats.uncovered_slaves;
  try {
    const MortarOperator e = compute_E(matrices);
    r.row_sum_defect = (e.row_sums().array() - 1.0).abs().maxCoeff();
  } catch (const SingularDError& err) {
    r.row_sum_defect = std::numeric_limits<double>::infinity();
    r.empty_slave_rows = err.slave_nodes();
  } catch (const Error&) {
    r.row_sum_defect = std::numeric_limits<double>::infinity();
  }
  return r;
}

void write_coo(std::ostream& out, const SparseMatrix& matrix) {
  out << "% " << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  char buf[32];
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  }
}

SparseMatrix read_coo(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with('%')) raise(ErrorCode::FormatError, "missing COO header");
  std::istringstream header(line.substr(1));
  long rows = 0;
  long cols = 0;
  long nnz = 0;
  if (!(header >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
    raise(ErrorCode::FormatError, "malformed COO header");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0;
    long j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) raise(ErrorCode::FormatError, "COO data ends after " + std::to_string(k) + " entries");
    if (i < 0 || i >= rows || j < 0 || j >= cols) raise(ErrorCode::FormatError, "COO index out of range");
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }
  SparseMatrix out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace mrbf
