#include "mrbf/rbf.hpp"

#include "mrbf/errors.hpp"

#include <cmath>
#include <string>

namespace mrbf {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian:
      return "ga";
    case KernelFamily::InvMultiquadric:
      return "imq";
    case KernelFamily::WendlandC2:
      return "wendland";
  }
  return "?";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "ga") return KernelFamily::Gaussian;
  if (name == "imq") return KernelFamily::InvMultiquadric;
  if (name == "wendland") return KernelFamily::WendlandC2;
  raise(ErrorCode::InvalidArgument, "unknown kernel family '" + std::string(name) + "'");
}

double kernel_eval(const RbfKernel& kernel, double r) {
  const double eps = kernel.epsilon;
  switch (kernel.family) {
    case KernelFamily::Gaussian: {
      const double q = r / eps;
      return std::exp(-q * q);
    }
    case KernelFamily::InvMultiquadric:
      return 1.0 / std::sqrt(r * r + eps * eps);
    case KernelFamily::WendlandC2: {
      const double q = r / eps;
      if (q >= 1.0) return 0.0;
      const double s = 1.0 - q;
      return s * s * s * s * (1.0 + 4.0 * q);
    }
  }
  return 0.0;
}

}  // namespace mrbf
