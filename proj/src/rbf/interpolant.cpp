#include "mrbf/rbf.hpp"

#include "mrbf/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mrbf {

namespace {

using Wide = long double;

using WidePoint = RbfInterpolant::WidePoint;

WidePoint widen(const Vec3& x) { return x.cast<Wide>(); }

Wide distance(const WidePoint& a, const WidePoint& b) { return (a - b).norm(); }

Wide kernel_wide(const RbfKernel& kernel, Wide r) {
  const Wide eps = kernel.epsilon;
  switch (kernel.family) {
    case KernelFamily::Gaussian: {
      const Wide q = r / eps;
      return std::exp(-q * q);
    }
    case KernelFamily::InvMultiquadric:
      return 1.0L / std::sqrt(r * r + eps * eps);
    case KernelFamily::WendlandC2: {
      const Wide q = r / eps;
      if (q >= 1.0L) return 0.0L;
      const Wide s = 1.0L - q;
      return s * s * s * s * (1.0L + 4.0L * q);
    }
  }
  return 0.0L;
}

}  // namespace

double RbfInterpolant::max_condition() {
  return 1.0 / (100.0 * static_cast<double>(std::numeric_limits<Wide>::epsilon()));
}

RbfInterpolant RbfInterpolant::fit(const RbfKernel& kernel, std::vector<Vec3> points, const Eigen::MatrixXd& data,
                                   const Options& options) {
  std::vector<WidePoint> wide;
  wide.reserve(points.size());
  for (const auto& p : points) wide.push_back(widen(p));
  return fit(kernel, std::move(wide), data, options);
}

RbfInterpolant RbfInterpolant::fit(const RbfKernel& kernel, std::vector<WidePoint> points,
                                   const Eigen::MatrixXd& data, const Options& options) {
  if (!(kernel.epsilon > 0.0)) raise(ErrorCode::InvalidArgument, "kernel shape parameter must be positive");
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m == 0) raise(ErrorCode::InvalidArgument, "interpolant needs at least one point");
  if (data.rows() != m) {
    raise(ErrorCode::DimensionMismatch, "data has " + std::to_string(data.rows()) + " rows for " +
                                            std::to_string(m) + " interpolation points");
  }
  if (options.pou_columns < 0 || options.pou_columns > data.cols()) {
    raise(ErrorCode::InvalidArgument, "pou_columns out of range");
  }

  WideMatrix phi(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    phi(i, i) = kernel_wide(kernel, 0.0L);
    for (Eigen::Index j = 0; j < i; ++j) {
      const Wide v = kernel_wide(kernel, distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]));
      phi(i, j) = v;
      phi(j, i) = v;
    }
  }

  const Eigen::PartialPivLU<WideMatrix> lu(phi);
  const Wide rcond = lu.rcond();
  const double cond = rcond > 0.0L ? static_cast<double>(1.0L / rcond) : std::numeric_limits<double>::infinity();
  if (options.reject_ill_conditioned && !(cond <= max_condition())) {
    throw IllConditionedKernelError(options.element, cond);
  }

  RbfInterpolant out;
  out.kernel_ = kernel;
  out.points_.reserve(points.size());
  for (const auto& p : points) {
    out.points_.push_back(p.cast<double>());
    out.centroid_ += p;
  }
  out.centroid_ /= static_cast<Wide>(m);
  out.offset_sq_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.offset_sq_[i] = (points[static_cast<std::size_t>(i)] - out.centroid_).squaredNorm();
  }
  out.wide_points_ = std::move(points);
  out.weights_ = lu.solve(data.cast<Wide>());
  if (options.pou_columns > 0) {
    out.rescale_ = out.weights_.leftCols(options.pou_columns).rowwise().sum();
  } else {
    out.rescale_ = lu.solve(WideVector::Ones(m));
  }
  out.pou_columns_ = options.pou_columns;
  out.cond_ = cond;
  return out;
}

void RbfInterpolant::kernel_row(const Vec3& x, bool normalize, WideVector& row) const {
  const auto m = static_cast<Eigen::Index>(wide_points_.size());
  row.resize(m);
  const WidePoint xw = widen(x);
  if (normalize && kernel_.family == KernelFamily::Gaussian) {
    // |x - p|^2 = |a|^2 - 2 a.b + |b|^2 with a = x - c, b = p - c; |a|^2 is dropped.
    const Wide eps_sq = static_cast<Wide>(kernel_.epsilon) * kernel_.epsilon;
    const WidePoint a = xw - centroid_;
    Wide top = -std::numeric_limits<Wide>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const WidePoint b = wide_points_[static_cast<std::size_t>(i)] - centroid_;
      row[i] = (2.0L * a.dot(b) - offset_sq_[i]) / eps_sq;
      top = std::max(top, row[i]);
    }
    for (Eigen::Index i = 0; i < m; ++i) row[i] = std::exp(row[i] - top);
    return;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    row[i] = kernel_wide(kernel_, distance(xw, wide_points_[static_cast<std::size_t>(i)]));
  }
}

Eigen::MatrixXd RbfInterpolant::evaluate(std::span<const Vec3> queries) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(queries.size()), weights_.cols());
  WideVector row;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    kernel_row(queries[q], false, row);
    out.row(static_cast<Eigen::Index>(q)) = (row.transpose() * weights_).cast<double>();
  }
  return out;
}

bool RbfInterpolant::evaluate_rescaled_at(const Vec3& x, Eigen::Ref<Eigen::VectorXd> out) const {
  WideVector row;
  kernel_row(x, true, row);
  const Eigen::Matrix<Wide, 1, Eigen::Dynamic> numer = row.transpose() * weights_;
  const Wide denom = pou_columns_ > 0 ? numer.head(pou_columns_).sum() : row.dot(rescale_);
  if (!(std::abs(denom) >= kRescaleFloor)) return false;
  out = (numer / denom).cast<double>().transpose();
  return true;
}

Eigen::MatrixXd RbfInterpolant::evaluate_rescaled(std::span<const Vec3> queries) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(queries.size()), weights_.cols());
  Eigen::VectorXd row(weights_.cols());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (!evaluate_rescaled_at(queries[q], row)) {
      raise(ErrorCode::RescaleBreakdown, "rescaling denominator vanishes at query " + std::to_string(q));
    }
    out.row(static_cast<Eigen::Index>(q)) = row.transpose();
  }
  return out;
}

MasterInterpolant fit_master_interpolant(const Mesh& mesh, Index elem, const PointLayout& layout, KernelFamily family,
                                         const FitOptions& options) {
  if (elem < 0 || elem >= mesh.num_elements()) raise(ErrorCode::InvalidArgument, "element id out of range");
  const ElementKind kind = mesh.kind();
  MasterInterpolant out;
  out.element = elem;
  out.kind = kind;
  out.n_basis = node_count(kind);
  out.n_probes = support_probe_count(kind);
  out.reference_points = interpolation_points(kind, layout);

  const auto m = static_cast<Eigen::Index>(out.reference_points.size());
  const auto coords = mesh.element_coords(elem);
  std::vector<RbfInterpolant::WidePoint> physical;
  physical.reserve(out.reference_points.size());
  Eigen::MatrixXd data(m, out.n_basis + out.n_probes);
  for (Eigen::Index i = 0; i < m; ++i) {
    const RefCoord& xi = out.reference_points[static_cast<std::size_t>(i)];
    // Affine combination with weights renormalized in extended precision:
    // the point stays in the plane of the nodes of a flat element.
    const ShapeVector n = shape_values(kind, xi);
    const Wide total = n.cast<Wide>().sum();
    physical.push_back(coords.cast<Wide>() * (n.cast<Wide>() / total));
    data.row(i).head(out.n_basis) = n.transpose();
    data.row(i).tail(out.n_probes) = support_probe_values(kind, xi).transpose();
  }

  const RbfKernel kernel{family, options.epsilon.value_or(element_circumdiameter(mesh, elem))};
  RbfInterpolant::Options fit_options;
  fit_options.pou_columns = out.n_basis;
  fit_options.reject_ill_conditioned = options.reject_ill_conditioned;
  fit_options.element = elem;
  out.interp = RbfInterpolant::fit(kernel, std::move(physical), data, fit_options);
  return out;
}

Eigen::MatrixXd evaluate_rescaled(const MasterInterpolant& master, std::span<const Vec3> queries) {
  return master.interp.evaluate_rescaled(queries).leftCols(master.n_basis);
}

double rmse(const RbfInterpolant& interp, int column, std::span<const Vec3> probes,
            const std::function<double(const Vec3&)>& exact) {
  if (probes.empty()) raise(ErrorCode::InvalidArgument, "rmse needs at least one probe point");
  if (column < 0 || column >= interp.num_columns()) raise(ErrorCode::InvalidArgument, "rmse column out of range");
  Eigen::VectorXd row(interp.num_columns());
  double sum = 0.0;
  for (const auto& p : probes) {
    if (!interp.evaluate_rescaled_at(p, row)) return std::numeric_limits<double>::infinity();
    const double d = row[column] - exact(p);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(probes.size()));
}

double condition_estimate(const RbfInterpolant& interp) { return interp.condition_estimate(); }

InterpolationDiagnostics diagnose(const Mesh& mesh, const MasterInterpolant& master,
                                  std::span<const RefCoord> reference_probes, double unstable_threshold) {
  std::vector<Vec3> probes;
  probes.reserve(reference_probes.size());
  for (const auto& xi : reference_probes) probes.push_back(map_to_physical(mesh, master.element, xi));
  InterpolationDiagnostics d;
  for (int j = 0; j < master.n_basis; ++j) {
    // Exact values looked up by position: probes[k] is the image of reference_probes[k].
    std::size_t k = 0;
    const auto exact = [&](const Vec3&) { return shape_values(master.kind, reference_probes[k++])[j]; };
    d.rmse = std::max(d.rmse, rmse(master.interp, j, probes, exact));
  }
  d.condition_estimate = master.interp.condition_estimate();
  d.unstable = d.condition_estimate > unstable_threshold;
  return d;
}

}  // namespace mrbf
