#pragma once

#include "mrbf/errors.hpp"
#include "mrbf/mortar.hpp"
#include "mrbf/poisson.hpp"
#include "mrbf/rbf.hpp"
#include "mrbf/structured.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrbf {

enum class Experiment { Interp1D, InterpSurface, KernelStudy, Poisson2D, SchemeCompare };

/// "interp1d", "interp-surface", "kernel-study", "poisson2d", "scheme-compare".
[[nodiscard]] std::string_view to_string(Experiment e);
[[nodiscard]] Experiment experiment_from_string(std::string_view name);

/// Mesh-size ratio h_master / h_slave.
struct Ratio {
  int num = 2;
  int den = 3;
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Height field used for warped surfaces and the curved Poisson interface.
/// Variants: "bump" (a cos(pi x/2) cos(pi y/2)) and "sine" (a sin(pi x) sin(pi y)).
struct WarpSpec {
  double amplitude = 0.1;
  std::string variant = "bump";
  friend bool operator==(const WarpSpec&, const WarpSpec&) = default;
};

[[nodiscard]] SurfaceWarp make_warp(const WarpSpec& spec);

/// Unset optionals select the experiment's default sweep (all schemes,
/// kernels, ...); set ones restrict it.
struct ExperimentConfig {
  Experiment experiment = Experiment::Interp1D;
  int refinements = 5;
  Ratio ratio;
  std::optional<Scheme> scheme;
  std::optional<KernelFamily> kernel;
  std::optional<int> n_m;
  std::optional<int> n_gauss;
  LayoutVariant layout = LayoutVariant::UniformGrid;
  std::string function;  ///< analytic function id, empty for the experiment default
  WarpSpec warp;
  std::string out = ".";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// `key = value` lines; '#' starts a comment. Throws config-error naming the line.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
[[nodiscard]] std::string serialize_config(const ExperimentConfig& config);
[[nodiscard]] ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Throws config-error.
void validate(const ExperimentConfig& config);

/// Analytic test functions by id: "sin4x+x2", "sin4x*cos4y", "sinx+cosy", "one", "linear".
using AnalyticFunction = std::function<double(const Vec3&)>;
[[nodiscard]] AnalyticFunction analytic_function(std::string_view id);

struct SweepRow {
  int level = 0;
  double h_master = 0.0;
  double h_slave = 0.0;
  std::string scheme;
  std::string kernel;  ///< empty for EB/SB
  std::optional<int> n_m;
  int n_gauss = 0;
  double l2_error = 0.0;
  std::optional<double> h1_error;
  std::optional<double> rmse;
  std::optional<double> cond_estimate;
  double assembly_seconds = 0.0;
  double dropped_fraction = 0.0;
  std::string label;  ///< sub-case (element kind, layout, role)
};

struct FieldPoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> z;
  double abs_error = 0.0;
};

/// Observed order of one (label, scheme, kernel, n_M) series.
struct OrderSummary {
  std::string series;
  std::string norm;  ///< "l2" or "h1"
  double order = 0.0;
  double finest_error = 0.0;
};

/// Solver diagnostics of one coupled solve.
struct SolverCheck {
  std::string series;
  int level = 0;
  double constraint_residual = 0.0;
  double path_difference = 0.0;  ///< max |condensed - saddle| over nodal values and multipliers
};

struct ExperimentResult {
  std::vector<SweepRow> rows;
  std::vector<SolverCheck> checks;
  std::vector<OrderSummary> orders;
  std::vector<std::string> notes;  ///< extra report lines
  std::vector<FieldPoint> field;
};

/// Least-squares slope of log(error) against log(h) over the last three points.
[[nodiscard]] double observed_order(std::span<const double> h, std::span<const double> error);

/// Series key of a row: "label scheme kernel nM".
[[nodiscard]] std::string series_name(const SweepRow& row);
/// Observed orders for every series with at least two levels.
[[nodiscard]] std::vector<OrderSummary> summarize_orders(const std::vector<SweepRow>& rows);

/// Median wall time of three calls, in seconds.
[[nodiscard]] double median_seconds(const std::function<void()>& work);

[[nodiscard]] ExperimentResult run_interp_1d(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_interp_surface(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_kernel_study(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_poisson_2d(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_scheme_compare(const ExperimentConfig& config);
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

/// SweepRow columns in declaration order; optionals empty when unset.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_report(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);
/// "x,y[,z],abs_error".
void write_field_csv(std::ostream& out, const std::vector<FieldPoint>& field);

/// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Exit status for a library error: config-error, invalid-argument and
/// parameter-out-of-range are configuration problems, the rest numerical.
[[nodiscard]] int exit_code(ErrorCode code);

/// Command-line entry point: `<experiment> [--config path] [flags]`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mrbf
