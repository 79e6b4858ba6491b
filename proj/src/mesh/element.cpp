#include "mrbf/element.hpp"

#include "mrbf/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace mrbf {

namespace {

constexpr double kMaxExtrapolation = 1.5;

void check_evaluation_point(ElementKind kind, const RefCoord& xi) {
  const int dim = reference_dimension(kind);
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(xi[k]) || std::abs(xi[k]) > kMaxExtrapolation) {
      raise(ErrorCode::InvalidArgument,
            "reference coordinate " + std::to_string(xi[k]) + " outside evaluation range for " +
                std::string(to_string(kind)));
    }
  }
}

// Quad8 node signs: corners, then mid-side nodes.
constexpr std::array<std::array<double, 2>, 8> kQuad8Nodes{{
    {-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

ReferenceElement make_reference(ElementKind kind) {
  ReferenceElement ref{kind, {}, polynomial_degree(kind)};
  switch (kind) {
    case ElementKind::Seg2:
      ref.node_ref_coords = {RefCoord(-1, 0), RefCoord(1, 0)};
      break;
    case ElementKind::Seg3:
      ref.node_ref_coords = {RefCoord(-1, 0), RefCoord(0, 0), RefCoord(1, 0)};
      break;
    case ElementKind::Tri3:
      ref.node_ref_coords = {RefCoord(0, 0), RefCoord(1, 0), RefCoord(0, 1)};
      break;
    case ElementKind::Quad4:
    case ElementKind::Quad8:
      for (int i = 0; i < node_count(kind); ++i) {
        ref.node_ref_coords.emplace_back(kQuad8Nodes[i][0], kQuad8Nodes[i][1]);
      }
      break;
  }
  return ref;
}

}  // namespace

int node_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Seg2: return 2;
    case ElementKind::Seg3: return 3;
    case ElementKind::Tri3: return 3;
    case ElementKind::Quad4: return 4;
    case ElementKind::Quad8: return 8;
  }
  raise(ErrorCode::InvalidArgument, "unknown element kind");
}

int reference_dimension(ElementKind kind) {
  return (kind == ElementKind::Seg2 || kind == ElementKind::Seg3) ? 1 : 2;
}

int polynomial_degree(ElementKind kind) {
  return (kind == ElementKind::Seg3 || kind == ElementKind::Quad8) ? 2 : 1;
}

bool is_simplex(ElementKind kind) { return kind == ElementKind::Tri3; }

double reference_measure(ElementKind kind) {
  switch (kind) {
    case ElementKind::Seg2:
    case ElementKind::Seg3: return 2.0;
    case ElementKind::Tri3: return 0.5;
    case ElementKind::Quad4:
    case ElementKind::Quad8: return 4.0;
  }
  raise(ErrorCode::InvalidArgument, "unknown element kind");
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Seg2: return "Seg2";
    case ElementKind::Seg3: return "Seg3";
    case ElementKind::Tri3: return "Tri3";
    case ElementKind::Quad4: return "Quad4";
    case ElementKind::Quad8: return "Quad8";
  }
  return "unknown";
}

ElementKind element_kind_from_string(std::string_view tag) {
  for (ElementKind k : {ElementKind::Seg2, ElementKind::Seg3, ElementKind::Tri3, ElementKind::Quad4,
                        ElementKind::Quad8}) {
    if (tag == to_string(k)) return k;
  }
  raise(ErrorCode::InvalidArgument, "unknown element kind '" + std::string(tag) + "'");
}

const ReferenceElement& ReferenceElement::of(ElementKind kind) {
  static const std::array<ReferenceElement, 5> table{
      make_reference(ElementKind::Seg2), make_reference(ElementKind::Seg3),
      make_reference(ElementKind::Tri3), make_reference(ElementKind::Quad4),
      make_reference(ElementKind::Quad8)};
  return table[static_cast<std::size_t>(kind)];
}

ShapeVector shape_values(ElementKind kind, const RefCoord& xi) {
  check_evaluation_point(kind, xi);
  const double x = xi[0];
  const double y = xi[1];
  ShapeVector n(node_count(kind));
  switch (kind) {
    case ElementKind::Seg2:
      n << 0.5 * (1.0 - x), 0.5 * (1.0 + x);
      break;
    case ElementKind::Seg3:
      n << 0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0);
      break;
    case ElementKind::Tri3:
      n << 1.0 - x - y, x, y;
      break;
    case ElementKind::Quad4:
      for (int i = 0; i < 4; ++i) {
        n[i] = 0.25 * (1.0 + x * kQuad8Nodes[i][0]) * (1.0 + y * kQuad8Nodes[i][1]);
      }
      break;
    case ElementKind::Quad8:
      for (int i = 0; i < 4; ++i) {
        const double a = kQuad8Nodes[i][0];
        const double b = kQuad8Nodes[i][1];
        n[i] = 0.25 * (1.0 + x * a) * (1.0 + y * b) * (x * a + y * b - 1.0);
      }
      for (int i = 4; i < 8; ++i) {
        const double a = kQuad8Nodes[i][0];
        const double b = kQuad8Nodes[i][1];
        n[i] = (a == 0.0) ? 0.5 * (1.0 - x * x) * (1.0 + y * b)
                          : 0.5 * (1.0 + x * a) * (1.0 - y * y);
      }
      break;
  }
  return n;
}

ShapeGradients shape_gradients(ElementKind kind, const RefCoord& xi) {
  check_evaluation_point(kind, xi);
  const double x = xi[0];
  const double y = xi[1];
  const int dim = reference_dimension(kind);
  ShapeGradients g(node_count(kind), dim);
  switch (kind) {
    case ElementKind::Seg2:
      g << -0.5, 0.5;
      break;
    case ElementKind::Seg3:
      g << x - 0.5, -2.0 * x, x + 0.5;
      break;
    case ElementKind::Tri3:
      g << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
      break;
    case ElementKind::Quad4:
      for (int i = 0; i < 4; ++i) {
        const double a = kQuad8Nodes[i][0];
        const double b = kQuad8Nodes[i][1];
        g(i, 0) = 0.25 * a * (1.0 + y * b);
        g(i, 1) = 0.25 * b * (1.0 + x * a);
      }
      break;
    case ElementKind::Quad8:
      for (int i = 0; i < 4; ++i) {
        const double a = kQuad8Nodes[i][0];
        const double b = kQuad8Nodes[i][1];
        g(i, 0) = 0.25 * a * (1.0 + y * b) * (2.0 * x * a + y * b);
        g(i, 1) = 0.25 * b * (1.0 + x * a) * (x * a + 2.0 * y * b);
      }
      for (int i = 4; i < 8; ++i) {
        const double a = kQuad8Nodes[i][0];
        const double b = kQuad8Nodes[i][1];
        if (a == 0.0) {
          g(i, 0) = -x * (1.0 + y * b);
          g(i, 1) = 0.5 * b * (1.0 - x * x);
        } else {
          g(i, 0) = 0.5 * a * (1.0 - y * y);
          g(i, 1) = -y * (1.0 + x * a);
        }
      }
      break;
  }
  return g;
}

int support_probe_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Seg2:
    case ElementKind::Seg3: return 2;
    case ElementKind::Tri3: return 3;
    case ElementKind::Quad4:
    case ElementKind::Quad8: return 4;
  }
  raise(ErrorCode::InvalidArgument, "unknown element kind");
}

ShapeVector support_probe_values(ElementKind kind, const RefCoord& xi) {
  const double x = xi[0];
  const double y = xi[1];
  ShapeVector p(support_probe_count(kind));
  switch (kind) {
    case ElementKind::Seg2:
    case ElementKind::Seg3:
      p << 0.5 * (1.0 - x), 0.5 * (1.0 + x);
      break;
    case ElementKind::Tri3:
      p << 1.0 - x - y, x, y;
      break;
    case ElementKind::Quad4:
    case ElementKind::Quad8:
      p << 0.5 * (1.0 - x), 0.5 * (1.0 + x), 0.5 * (1.0 - y), 0.5 * (1.0 + y);
      break;
  }
  return p;
}

bool inside_reference(ElementKind kind, const RefCoord& xi, double tol) {
  switch (kind) {
    case ElementKind::Seg2:
    case ElementKind::Seg3:
      return std::abs(xi[0]) <= 1.0 + tol;
    case ElementKind::Tri3:
      return xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol;
    case ElementKind::Quad4:
    case ElementKind::Quad8:
      return std::abs(xi[0]) <= 1.0 + tol && std::abs(xi[1]) <= 1.0 + tol;
  }
  return false;
}

}  // namespace mrbf
