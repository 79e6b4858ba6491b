#pragma once

#include "mrbf/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mrbf {

enum class KernelFamily { Gaussian, InvMultiquadric, WendlandC2 };

[[nodiscard]] std::string_view to_string(KernelFamily family);
/// Accepts "ga", "imq", "wendland" (case-sensitive).
[[nodiscard]] KernelFamily kernel_family_from_string(std::string_view name);

struct RbfKernel {
  KernelFamily family = KernelFamily::Gaussian;
  double epsilon = 1.0;  ///< shape parameter, a length
};

/// phi(r, eps):
///   Gaussian          exp(-r^2 / eps^2)
///   InvMultiquadric   (r^2 + eps^2)^(-1/2)
///   WendlandC2        (1 - r/eps)_+^4 (1 + 4 r/eps), exactly 0 for r >= eps
[[nodiscard]] double kernel_eval(const RbfKernel& kernel, double r);

enum class LayoutVariant { UniformGrid, SineModified };

struct PointLayout {
  LayoutVariant variant = LayoutVariant::UniformGrid;
  int n_per_edge = 6;
};

inline constexpr int kMaxPointsPerEdge = 10;

[[nodiscard]] std::string_view to_string(LayoutVariant variant);

/// Number of interpolation points: n (segment), n(n+1)/2 (triangle), n^2 (quad).
[[nodiscard]] int layout_point_count(ElementKind kind, const PointLayout& layout);

/// Interpolation points in reference coordinates. The uniform grid has
/// n_per_edge points per edge with the element vertices included; the
/// modified layout applies sin(pi/2 * xi) componentwise on [-1,1] (and the
/// equivalent map sin^2(pi/2 * t) on the unit triangle). Throws
/// invalid-argument for n < 2 and parameter-out-of-range for n > 10.
[[nodiscard]] std::vector<RefCoord> interpolation_points(ElementKind kind, const PointLayout& layout);

/// Direct-method RBF interpolant, optionally rescaled by the interpolant of 1.
///
/// Weights are computed and stored in extended precision (long double): the
/// globally supported kernels produce kernel matrices with condition numbers
/// up to ~1e16 for the point counts used on quadrilaterals.
class RbfInterpolant {
 public:
  using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  using WidePoint = Eigen::Matrix<long double, 3, 1>;

  struct Options {
    /// Columns [0, pou_columns) are a partition of unity at the data points.
    /// When nonzero, the rescaling weights are the sum of those weight
    /// columns and the rescaled values of those columns sum to exactly 1.
    int pou_columns = 0;
    /// Reject fits whose condition estimate exceeds max_condition().
    bool reject_ill_conditioned = true;
    /// Reported in IllConditionedKernelError.
    long element = -1;
  };

  /// Fits weights for every column of `data` (rows = points).
  [[nodiscard]] static RbfInterpolant fit(const RbfKernel& kernel, std::vector<Vec3> points,
                                          const Eigen::MatrixXd& data, const Options& options);
  [[nodiscard]] static RbfInterpolant fit(const RbfKernel& kernel, std::vector<Vec3> points,
                                          const Eigen::MatrixXd& data) {
    return fit(kernel, std::move(points), data, Options{});
  }
  /// Same with points given in extended precision (e.g. mapped from a
  /// reference element without rounding them off the element's plane).
  [[nodiscard]] static RbfInterpolant fit(const RbfKernel& kernel, std::vector<WidePoint> points,
                                          const Eigen::MatrixXd& data, const Options& options);

  /// 1 / (100 * unit roundoff of the working precision).
  [[nodiscard]] static double max_condition();
  /// Denominators of smaller magnitude signal a rescale breakdown.
  static constexpr double kRescaleFloor = 1e-12;

  [[nodiscard]] const RbfKernel& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const std::vector<Vec3>& points() const noexcept { return points_; }
  [[nodiscard]] int num_points() const noexcept { return static_cast<int>(points_.size()); }
  [[nodiscard]] int num_columns() const noexcept { return static_cast<int>(weights_.cols()); }
  [[nodiscard]] Eigen::MatrixXd weights() const { return weights_.cast<double>(); }
  [[nodiscard]] Eigen::VectorXd rescale_weights() const { return rescale_.cast<double>(); }
  /// 1-norm condition estimate of the kernel matrix, from its LU factors.
  [[nodiscard]] double condition_estimate() const noexcept { return cond_; }

  /// Plain interpolant Pi_f at each query point (rows = queries).
  [[nodiscard]] Eigen::MatrixXd evaluate(std::span<const Vec3> queries) const;

  /// Rescaled values Pi_f(x) / Pi_1(x) of every column at x. Returns false
  /// (leaving `out` unspecified) when |Pi_1(x)| < kRescaleFloor.
  bool evaluate_rescaled_at(const Vec3& x, Eigen::Ref<Eigen::VectorXd> out) const;

  /// Rescaled values at every query; throws rescale-breakdown if any query breaks down.
  [[nodiscard]] Eigen::MatrixXd evaluate_rescaled(std::span<const Vec3> queries) const;

 private:
  // Kernel values between x and every interpolation point. With `normalize`,
  // Gaussian rows drop the factor exp(-|x - c|^2 / eps^2) (c = centroid of the
  // points) and are divided by their largest entry. Both factors cancel in
  // the rescaled ratio; far-off queries then neither underflow nor pick up
  // rounding from the large common part of the squared distances.
  void kernel_row(const Vec3& x, bool normalize, WideVector& row) const;

  RbfKernel kernel_;
  std::vector<Vec3> points_;
  std::vector<WidePoint> wide_points_;
  WidePoint centroid_ = WidePoint::Zero();
  WideVector offset_sq_;  // |p_m - c|^2
  WideMatrix weights_;
  WideVector rescale_;
  int pou_columns_ = 0;
  double cond_ = 1.0;
};

/// Interpolant of the nodal basis of one master element.
///
/// Columns [0, n_basis) interpolate the element's shape functions, the next
/// support_probe_count(kind) columns interpolate the auxiliary support probes
/// (see support_probe_values).
struct MasterInterpolant {
  Index element = -1;
  ElementKind kind = ElementKind::Seg2;
  int n_basis = 0;
  int n_probes = 0;
  std::vector<RefCoord> reference_points;
  RbfInterpolant interp;
};

struct FitOptions {
  /// Overrides the default eps = element circumdiameter.
  std::optional<double> epsilon;
  bool reject_ill_conditioned = true;
};

/// Fits the RBF interpolant of the basis of master element `elem`. The points
/// of `layout` are mapped to physical space and eps defaults to the element
/// circumdiameter. Throws ill-conditioned-kernel-matrix when the kernel
/// matrix is numerically singular.
[[nodiscard]] MasterInterpolant fit_master_interpolant(const Mesh& mesh, Index elem, const PointLayout& layout,
                                                      KernelFamily family, const FitOptions& options = {});

/// Rescaled master basis values N^Pi[i, j] = Pi N_j(query_i).
[[nodiscard]] Eigen::MatrixXd evaluate_rescaled(const MasterInterpolant& master,
                                                std::span<const Vec3> queries);

struct InterpolationDiagnostics {
  double rmse = 0.0;
  double condition_estimate = 0.0;
  bool unstable = false;
};

/// sqrt(mean_n (rescaled(column)(probe_n) - exact(probe_n))^2) for one column.
[[nodiscard]] double rmse(const RbfInterpolant& interp, int column, std::span<const Vec3> probes,
                          const std::function<double(const Vec3&)>& exact);

[[nodiscard]] double condition_estimate(const RbfInterpolant& interp);

/// RMSE (worst basis function) plus conditioning of a master interpolant,
/// probing at the images of `reference_probes`.
[[nodiscard]] InterpolationDiagnostics diagnose(const Mesh& mesh, const MasterInterpolant& master,
                                                std::span<const RefCoord> reference_probes,
                                                double unstable_threshold = RbfInterpolant::max_condition());

/// First n points of the Halton sequence in [-1,1]^d (bases 2, 3), d = 1 or 2.
[[nodiscard]] std::vector<RefCoord> halton_points(int n, int dim);

}  // namespace mrbf
