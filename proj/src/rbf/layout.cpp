#include "mrbf/rbf.hpp"

#include "mrbf/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mrbf {

std::string_view to_string(LayoutVariant variant) {
  return variant == LayoutVariant::UniformGrid ? "uniform" : "modified";
}

namespace {

void check_layout(const PointLayout& layout) {
  if (layout.n_per_edge < 2) {
    raise(ErrorCode::InvalidArgument, "interpolation layout needs at least 2 points per edge");
  }
  if (layout.n_per_edge > kMaxPointsPerEdge) {
    raise(ErrorCode::ParameterOutOfRange, "n_M = " + std::to_string(layout.n_per_edge) + " exceeds the cap of " +
                                              std::to_string(kMaxPointsPerEdge));
  }
}

// Edge coordinate i of n on [-1, 1].
double edge_coord(int i, int n, LayoutVariant variant) {
  const double t = (i == n - 1) ? 1.0 : -1.0 + 2.0 * i / (n - 1);
  return variant == LayoutVariant::SineModified ? std::sin(0.5 * std::numbers::pi * t) : t;
}

// Same on [0, 1]: sin(pi/2 (2t - 1)) rewritten for the unit interval.
double unit_coord(int i, int n, LayoutVariant variant) {
  const double t = (i == n - 1) ? 1.0 : static_cast<double>(i) / (n - 1);
  if (variant == LayoutVariant::UniformGrid) return t;
  const double s = std::sin(0.5 * std::numbers::pi * t);
  return s * s;
}

}  // namespace

int layout_point_count(ElementKind kind, const PointLayout& layout) {
  check_layout(layout);
  const int n = layout.n_per_edge;
  if (reference_dimension(kind) == 1) return n;
  return is_simplex(kind) ? n * (n + 1) / 2 : n * n;
}

std::vector<RefCoord> interpolation_points(ElementKind kind, const PointLayout& layout) {
  check_layout(layout);
  const int n = layout.n_per_edge;
  std::vector<RefCoord> pts;
  pts.reserve(static_cast<std::size_t>(layout_point_count(kind, layout)));
  if (reference_dimension(kind) == 1) {
    for (int i = 0; i < n; ++i) pts.emplace_back(edge_coord(i, n, layout.variant), 0.0);
  } else if (is_simplex(kind)) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i + j < n; ++i) {
        pts.emplace_back(unit_coord(i, n, layout.variant), unit_coord(j, n, layout.variant));
      }
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) pts.emplace_back(edge_coord(i, n, layout.variant), edge_coord(j, n, layout.variant));
    }
  }
  return pts;
}

std::vector<RefCoord> halton_points(int n, int dim) {
  if (n < 1 || dim < 1 || dim > 2) raise(ErrorCode::InvalidArgument, "halton_points: bad request");
  const auto radical_inverse = [](int i, int base) {
    double f = 1.0;
    double r = 0.0;
    for (; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  std::vector<RefCoord> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    pts.emplace_back(2.0 * radical_inverse(i, 2) - 1.0, dim == 2 ? 2.0 * radical_inverse(i, 3) - 1.0 : 0.0);
  }
  return pts;
}

}  // namespace mrbf
