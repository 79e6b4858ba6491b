#include "mrbf/errors.hpp"

#include <sstream>

namespace mrbf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DegenerateElement: return "degenerate-element";
    case ErrorCode::FormatError: return "format-error";
    case ErrorCode::ParameterOutOfRange: return "parameter-out-of-range";
    case ErrorCode::IllConditionedKernel: return "ill-conditioned-kernel-matrix";
    case ErrorCode::RescaleBreakdown: return "rescale-breakdown";
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::SingularD: return "singular-D";
    case ErrorCode::IndexMap: return "index-map";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::SolverFailure: return "solver-failure";
    case ErrorCode::ConfigError: return "config-error";
  }
  return "unknown";
}

namespace {

std::string ill_conditioned_message(long element, double cond) {
  std::ostringstream os;
  os << "ill-conditioned-kernel-matrix: master element " << element
     << " has condition estimate " << cond;
  return os.str();
}

std::string singular_d_message(const std::vector<int>& nodes) {
  std::ostringstream os;
  os << "singular-D: slave nodes without quadrature support:";
  for (int n : nodes) os << ' ' << n;
  return os.str();
}

}  // namespace

IllConditionedKernelError::IllConditionedKernelError(long element, double condition_estimate)
    : Error(ErrorCode::IllConditionedKernel, ill_conditioned_message(element, condition_estimate)),
      element_(element),
      cond_(condition_estimate) {}

SingularDError::SingularDError(std::vector<int> empty_rows)
    : Error(ErrorCode::SingularD, singular_d_message(empty_rows)), nodes_(std::move(empty_rows)) {}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace mrbf
