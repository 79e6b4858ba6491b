#include "mrbf/errors.hpp"
#include "mrbf/rbf.hpp"
#include "mrbf/structured.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace mrbf;

namespace {

constexpr KernelFamily kFamilies[] = {KernelFamily::Gaussian, KernelFamily::InvMultiquadric,
                                      KernelFamily::WendlandC2};

Mesh reference_segment(ElementKind kind) {
  std::vector<Vec3> nodes;
  for (const auto& xi : ReferenceElement::of(kind).node_ref_coords) nodes.emplace_back(xi.x(), 0.0, 0.0);
  std::vector<Index> conn(nodes.size());
  for (std::size_t i = 0; i < conn.size(); ++i) conn[i] = static_cast<Index>(i);
  return {2, kind, std::move(nodes), std::move(conn)};
}

Mesh reference_quad(ElementKind kind) {
  std::vector<Vec3> nodes;
  for (const auto& xi : ReferenceElement::of(kind).node_ref_coords) nodes.emplace_back(xi.x(), xi.y(), 0.0);
  std::vector<Index> conn(nodes.size());
  for (std::size_t i = 0; i < conn.size(); ++i) conn[i] = static_cast<Index>(i);
  return {3, kind, std::move(nodes), std::move(conn)};
}

// Quad4 on the plane z = 1 + x/2 + y/4. Node coordinates are exact binary
// fractions so that the element is planar in floating point too.
Mesh tilted_quad(Vec3& normal) {
  normal = Vec3(-0.5, -0.25, 1.0).normalized();
  return {3,
          ElementKind::Quad4,
          {Vec3(0, 0, 1), Vec3(1, 0, 1.5), Vec3(1.25, 1, 1.875), Vec3(0, 0.75, 1.1875)},
          {0, 1, 2, 3}};
}

}  // namespace

TEST(Kernel, TableValues) {
  EXPECT_EQ(kernel_eval({KernelFamily::Gaussian, 0.7}, 0.0), 1.0);
  EXPECT_EQ(kernel_eval({KernelFamily::WendlandC2, 0.7}, 0.0), 1.0);
  EXPECT_EQ(kernel_eval({KernelFamily::WendlandC2, 0.7}, 0.7), 0.0);
  EXPECT_EQ(kernel_eval({KernelFamily::InvMultiquadric, 2.0}, 0.0), 0.5);
  EXPECT_NEAR(kernel_eval({KernelFamily::Gaussian, 2.0}, 1.0), std::exp(-0.25), 1e-16);
  // (1 - 1/2)^4 (1 + 2)
  EXPECT_NEAR(kernel_eval({KernelFamily::WendlandC2, 2.0}, 1.0), 3.0 / 16.0, 1e-16);
}

TEST(Kernel, WendlandVanishesOutsideSupport) {
  for (double r = 1.0; r < 10.0; r += 0.37) {
    EXPECT_EQ(kernel_eval({KernelFamily::WendlandC2, 1.0}, r), 0.0);
  }
}

TEST(Layout, Counts) {
  EXPECT_EQ(layout_point_count(ElementKind::Seg3, {LayoutVariant::UniformGrid, 6}), 6);
  EXPECT_EQ(layout_point_count(ElementKind::Tri3, {LayoutVariant::UniformGrid, 4}), 10);
  EXPECT_EQ(interpolation_points(ElementKind::Quad4, {LayoutVariant::UniformGrid, 6}).size(), 36U);
  EXPECT_EQ(interpolation_points(ElementKind::Tri3, {LayoutVariant::SineModified, 5}).size(), 15U);
}

TEST(Layout, Examples) {
  const auto uni = interpolation_points(ElementKind::Seg2, {LayoutVariant::UniformGrid, 3});
  ASSERT_EQ(uni.size(), 3U);
  EXPECT_EQ(uni[0].x(), -1.0);
  EXPECT_EQ(uni[1].x(), 0.0);
  EXPECT_EQ(uni[2].x(), 1.0);
  const auto mod = interpolation_points(ElementKind::Seg2, {LayoutVariant::SineModified, 3});
  EXPECT_EQ(mod[0].x(), -1.0);
  EXPECT_EQ(mod[1].x(), 0.0);
  EXPECT_EQ(mod[2].x(), 1.0);
  const auto mod5 = interpolation_points(ElementKind::Seg2, {LayoutVariant::SineModified, 5});
  EXPECT_NEAR(mod5[1].x(), std::sin(-0.25 * std::numbers::pi), 1e-15);
}

TEST(Layout, NodesAreSubsetOfUniformGrid) {
  for (const auto kind : {ElementKind::Seg2, ElementKind::Seg3, ElementKind::Tri3, ElementKind::Quad4,
                          ElementKind::Quad8}) {
    const auto pts = interpolation_points(kind, {LayoutVariant::UniformGrid, 5});
    for (const auto& node : ReferenceElement::of(kind).node_ref_coords) {
      const bool found = std::any_of(pts.begin(), pts.end(), [&](const RefCoord& p) { return (p - node).norm() < 1e-15; });
      EXPECT_TRUE(found) << to_string(kind);
    }
    for (const auto& p : interpolation_points(kind, {LayoutVariant::SineModified, 5})) {
      EXPECT_TRUE(inside_reference(kind, p, 1e-15));
    }
  }
}

TEST(Layout, Limits) {
  try {
    (void)interpolation_points(ElementKind::Seg2, {LayoutVariant::UniformGrid, 11});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParameterOutOfRange);
  }
  try {
    (void)interpolation_points(ElementKind::Seg2, {LayoutVariant::UniformGrid, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Interpolant, SinglePoint) {
  Eigen::MatrixXd data(1, 2);
  data << 1.0, 3.5;
  const auto interp = RbfInterpolant::fit({KernelFamily::Gaussian, 1.0}, {Vec3(0.2, 0.0, 0.0)}, data);
  EXPECT_EQ(interp.weights()(0, 0), 1.0);
  EXPECT_EQ(interp.weights()(0, 1), 3.5);
  EXPECT_EQ(interp.condition_estimate(), 1.0);
}

TEST(Interpolant, ReproducesFittedDataAtPoints) {
  const Mesh seg = reference_segment(ElementKind::Seg3);
  const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::UniformGrid, 6}, KernelFamily::Gaussian);
  const auto& pts = master.interp.points();
  const Eigen::MatrixXd plain = master.interp.evaluate(pts);
  const Eigen::MatrixXd rescaled = evaluate_rescaled(master, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto n = shape_values(ElementKind::Seg3, master.reference_points[i]);
    for (int j = 0; j < 3; ++j) {
      EXPECT_LE(std::abs(plain(static_cast<Eigen::Index>(i), j) - n[j]), 1e-10);
      EXPECT_LE(std::abs(rescaled(static_cast<Eigen::Index>(i), j) - n[j]), 1e-10);
    }
  }
}

TEST(Interpolant, InterpolationConditionAllKernels) {
  const Mesh quad = reference_quad(ElementKind::Quad8);
  for (const auto family : kFamilies) {
    for (const auto variant : {LayoutVariant::UniformGrid, LayoutVariant::SineModified}) {
      const auto master = fit_master_interpolant(quad, 0, {variant, 4}, family);
      if (master.interp.condition_estimate() > 1e10) continue;
      const Eigen::MatrixXd plain = master.interp.evaluate(master.interp.points());
      for (std::size_t i = 0; i < master.reference_points.size(); ++i) {
        const auto n = shape_values(ElementKind::Quad8, master.reference_points[i]);
        for (int j = 0; j < 8; ++j) EXPECT_LE(std::abs(plain(static_cast<Eigen::Index>(i), j) - n[j]), 1e-10);
      }
    }
  }
}

TEST(Interpolant, Seg3GaussianRmseOnHaltonPoints) {
  const Mesh seg = reference_segment(ElementKind::Seg3);
  const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::UniformGrid, 6}, KernelFamily::Gaussian);
  const auto probes = halton_points(40, 1);
  const auto d = diagnose(seg, master, probes);
  // Reference value from an independent 50-digit solve of the same problem.
  EXPECT_NEAR(d.rmse, 8.96383740352e-4, 1e-12);
  EXPECT_FALSE(d.unstable);
  EXPECT_GT(d.condition_estimate, 1.0);
}

TEST(Interpolant, RmseOfOwnDataIsZero) {
  const Mesh seg = reference_segment(ElementKind::Seg2);
  const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::UniformGrid, 5}, KernelFamily::InvMultiquadric);
  std::size_t k = 0;
  const auto exact = [&](const Vec3&) { return shape_values(ElementKind::Seg2, master.reference_points[k++])[1]; };
  EXPECT_LE(rmse(master.interp, 1, master.interp.points(), exact), 1e-10);
}

TEST(Interpolant, GaussianConditionGrowsWithPointCount) {
  const Mesh seg = reference_segment(ElementKind::Seg2);
  double previous = 0.0;
  for (int n = 3; n <= 8; ++n) {
    const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::UniformGrid, n}, KernelFamily::Gaussian);
    EXPECT_GT(condition_estimate(master.interp), previous) << "n_M=" << n;
    previous = condition_estimate(master.interp);
  }
}

TEST(Interpolant, IllConditionedKernelRejected) {
  const Mesh quad = reference_quad(ElementKind::Quad4);
  try {
    (void)fit_master_interpolant(quad, 0, {LayoutVariant::UniformGrid, 10}, KernelFamily::Gaussian);
    FAIL();
  } catch (const IllConditionedKernelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::IllConditionedKernel);
    EXPECT_EQ(e.element(), 0);
    EXPECT_GT(e.condition_estimate(), RbfInterpolant::max_condition());
  }
  FitOptions lax;
  lax.reject_ill_conditioned = false;
  EXPECT_NO_THROW((void)fit_master_interpolant(quad, 0, {LayoutVariant::UniformGrid, 10}, KernelFamily::Gaussian, lax));
}

TEST(Interpolant, RescaledPartitionOfUnity) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (const auto kind : {ElementKind::Seg2, ElementKind::Seg3}) {
    const Mesh seg = reference_segment(kind);
    for (const auto family : kFamilies) {
      const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::SineModified, 6}, family);
      Eigen::VectorXd row(master.interp.num_columns());
      for (int k = 0; k < 200; ++k) {
        if (!master.interp.evaluate_rescaled_at(Vec3(u(rng), 0.3 * u(rng), 0.0), row)) continue;
        EXPECT_LE(std::abs(row.head(master.n_basis).sum() - 1.0), 1e-12);
      }
    }
  }
  for (const auto kind : {ElementKind::Quad4, ElementKind::Quad8}) {
    const Mesh quad = reference_quad(kind);
    for (const auto family : kFamilies) {
      const auto master = fit_master_interpolant(quad, 0, {LayoutVariant::UniformGrid, 5}, family);
      Eigen::VectorXd row(master.interp.num_columns());
      for (int k = 0; k < 200; ++k) {
        if (!master.interp.evaluate_rescaled_at(Vec3(u(rng), u(rng), 0.5 * u(rng)), row)) continue;
        EXPECT_LE(std::abs(row.head(master.n_basis).sum() - 1.0), 1e-12);
      }
    }
  }
}

TEST(Interpolant, ConstantDataReproducedExactly) {
  const Mesh seg = reference_segment(ElementKind::Seg2);
  for (const auto family : kFamilies) {
    std::vector<Vec3> pts;
    for (const auto& xi : interpolation_points(ElementKind::Seg2, {LayoutVariant::UniformGrid, 7})) {
      pts.push_back(map_to_physical(seg, 0, xi));
    }
    const auto interp = RbfInterpolant::fit({family, 2.0}, pts, Eigen::MatrixXd::Ones(7, 1));
    for (double x = -1.2; x <= 1.2; x += 0.05) {
      Eigen::VectorXd row(1);
      if (!interp.evaluate_rescaled_at(Vec3(x, 0.0, 0.0), row)) continue;
      EXPECT_LE(std::abs(row[0] - 1.0), 1e-12) << to_string(family);
    }
  }
}

TEST(Interpolant, WendlandBreaksDownFarAway) {
  const Mesh seg = reference_segment(ElementKind::Seg2);
  const auto master = fit_master_interpolant(seg, 0, {LayoutVariant::UniformGrid, 4}, KernelFamily::WendlandC2);
  const std::vector<Vec3> far{Vec3(8.0, 0.0, 0.0)};
  try {
    (void)evaluate_rescaled(master, far);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RescaleBreakdown);
  }
}

TEST(Interpolant, GaussianNormalTranslationInvariance) {
  Vec3 n;
  const Mesh quad = tilted_quad(n);
  const auto master = fit_master_interpolant(quad, 0, {LayoutVariant::UniformGrid, 5}, KernelFamily::Gaussian);
  const double eps = master.interp.kernel().epsilon;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = map_to_physical(quad, 0, {u(rng), u(rng)});
    const std::vector<Vec3> base{x};
    const Eigen::MatrixXd ref = evaluate_rescaled(master, base);
    for (const double s : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const std::vector<Vec3> moved{x + s * eps * n};
      const Eigen::MatrixXd row = evaluate_rescaled(master, moved);
      EXPECT_LE((row - ref).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff())) << "s=" << s;
    }
  }
}

TEST(Interpolant, PermutationInvariance) {
  const Mesh quad = reference_quad(ElementKind::Quad4);
  const auto pts_ref = interpolation_points(ElementKind::Quad4, {LayoutVariant::UniformGrid, 4});
  std::vector<std::size_t> order(pts_ref.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(21);
  std::shuffle(order.begin(), order.end(), rng);
  const auto build = [&](bool shuffled) {
    std::vector<Vec3> pts;
    Eigen::MatrixXd data(static_cast<Eigen::Index>(pts_ref.size()), 4);
    for (std::size_t i = 0; i < pts_ref.size(); ++i) {
      const auto& xi = pts_ref[shuffled ? order[i] : i];
      pts.push_back(map_to_physical(quad, 0, xi));
      data.row(static_cast<Eigen::Index>(i)) = shape_values(ElementKind::Quad4, xi).transpose();
    }
    RbfInterpolant::Options opt;
    opt.pou_columns = 4;
    return RbfInterpolant::fit({KernelFamily::InvMultiquadric, 2.0 * std::sqrt(2.0)}, pts, data, opt);
  };
  const auto a = build(false);
  const auto b = build(true);
  const auto probes = halton_points(40, 2);
  std::vector<Vec3> q;
  for (const auto& p : probes) q.emplace_back(p.x(), p.y(), 0.0);
  EXPECT_LE((a.evaluate_rescaled(q) - b.evaluate_rescaled(q)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Interpolant, DefaultEpsilonIsCircumdiameter) {
  const auto surf = square_surface(0.0, 1.0, 2, ElementKind::Quad4, {}, Side::Master);
  const auto master = fit_master_interpolant(surf, 1, {LayoutVariant::UniformGrid, 3}, KernelFamily::Gaussian);
  EXPECT_NEAR(master.interp.kernel().epsilon, std::sqrt(0.5), 1e-15);
  FitOptions opt;
  opt.epsilon = 0.2;
  EXPECT_EQ(fit_master_interpolant(surf, 1, {LayoutVariant::UniformGrid, 3}, KernelFamily::Gaussian, opt)
                .interp.kernel()
                .epsilon,
            0.2);
}
