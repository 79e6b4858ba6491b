#include "mrbf/quadrature.hpp"

#include "mrbf/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace mrbf {

namespace {

// Roots of P_n by Newton iteration; weights 2 / ((1 - x^2) P_n'(x)^2).
QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  if (n == 1) {
    rule.points = {RefCoord(0.0, 0.0)};
    rule.weights = {2.0};
    return rule;
  }
  // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
  const auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = RefCoord(-x, 0.0);
    rule.points[n - 1 - i] = RefCoord(x, 0.0);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = RefCoord(0.0, 0.0);
  return rule;
}

void add_s3(QuadratureRule& r, double w) {
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(w);
}

// Orbit of barycentric (a, a, 1-2a).
void add_s21(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const auto& p : {RefCoord(a, a), RefCoord(a, b), RefCoord(b, a)}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

// Orbit of barycentric (a, b, 1-a-b), all six permutations.
void add_s111(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<std::array<double, 3>, 6> perms{
      {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    r.points.emplace_back(p[0], p[1]);
    r.weights.push_back(w);
  }
}

QuadratureRule triangle_rule(int n) {
  QuadratureRule r;
  switch (n) {
    case 1:
      add_s3(r, 0.5);
      r.degree = 1;
      break;
    case 3:
      add_s21(r, 1.0 / 6.0, 1.0 / 6.0);
      r.degree = 2;
      break;
    case 6:
      add_s21(r, 0.44594849091596488631832925388305, 0.11169079483900573284750350421656);
      add_s21(r, 0.091576213509770743459571463402202, 0.054975871827660933819163162450105);
      r.degree = 4;
      break;
    case 7: {
      const double s = std::sqrt(15.0);
      add_s3(r, 9.0 / 80.0);
      add_s21(r, (6.0 - s) / 21.0, (155.0 - s) / 2400.0);
      add_s21(r, (6.0 + s) / 21.0, (155.0 + s) / 2400.0);
      r.degree = 5;
      break;
    }
    case 12:
      add_s21(r, 0.24928674517091042129163855310702, 0.058393137863189683012644805692790);
      add_s21(r, 0.063089014491502228340331602870819, 0.025422453185103408460468404553434);
      add_s111(r, 0.053145049844816947353249671631398, 0.31035245103378440541660773395655,
               0.041425537809186787596776728210221);
      r.degree = 6;
      break;
    default:
      raise(ErrorCode::InvalidArgument,
            "unsupported triangle rule with " + std::to_string(n) + " points");
  }
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1 || n > kMaxGaussPoints1D) {
    raise(ErrorCode::InvalidArgument, "unsupported Gauss-Legendre point count " + std::to_string(n));
  }
  static const auto table = [] {
    std::array<QuadratureRule, kMaxGaussPoints1D + 1> t;
    for (int k = 1; k <= kMaxGaussPoints1D; ++k) t[k] = compute_gauss_legendre(k);
    return t;
  }();
  return table[n];
}

QuadratureRule gauss_rule(ElementKind kind, int n_points) {
  switch (kind) {
    case ElementKind::Seg2:
    case ElementKind::Seg3:
      return gauss_legendre(n_points);
    case ElementKind::Tri3:
      return triangle_rule(n_points);
    case ElementKind::Quad4:
    case ElementKind::Quad8: {
      const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_points))));
      if (k * k != n_points || k < 1 || k > kMaxGaussPoints1D) {
        raise(ErrorCode::InvalidArgument,
              "quadrilateral rules need a square point count, got " + std::to_string(n_points));
      }
      const QuadratureRule line = gauss_legendre(k);
      QuadratureRule r;
      r.degree = line.degree;
      for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
          r.points.emplace_back(line.points[i][0], line.points[j][0]);
          r.weights.push_back(line.weights[i] * line.weights[j]);
        }
      }
      return r;
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown element kind");
}

QuadratureRule gauss_rule_for_degree(ElementKind kind, int degree) {
  if (is_simplex(kind)) {
    for (int n : {1, 3, 6, 7, 12}) {
      QuadratureRule r = triangle_rule(n);
      if (r.degree >= degree) return r;
    }
    raise(ErrorCode::InvalidArgument, "no triangle rule of degree " + std::to_string(degree));
  }
  const int k = std::max(1, (degree + 2) / 2);
  return gauss_rule(kind, reference_dimension(kind) == 1 ? k : k * k);
}

}  // namespace mrbf
