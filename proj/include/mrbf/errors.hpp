#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mrbf {

enum class ErrorCode {
  InvalidArgument,
  DegenerateElement,
  FormatError,
  ParameterOutOfRange,
  IllConditionedKernel,
  RescaleBreakdown,
  InvalidGeometry,
  SingularD,
  IndexMap,
  DimensionMismatch,
  SolverFailure,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Base of every exception thrown by the library. The code identifies the
/// failure class so callers (notably the CLI) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class IllConditionedKernelError : public Error {
 public:
  IllConditionedKernelError(long element, double condition_estimate);

  [[nodiscard]] long element() const noexcept { return element_; }
  [[nodiscard]] double condition_estimate() const noexcept { return cond_; }

 private:
  long element_;
  double cond_;
};

class SingularDError : public Error {
 public:
  explicit SingularDError(std::vector<int> empty_rows);

  /// Slave interface node ids whose rows of D carry no quadrature weight.
  [[nodiscard]] const std::vector<int>& slave_nodes() const noexcept { return nodes_; }

 private:
  std::vector<int> nodes_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace mrbf
