#include "mrbf/bench.hpp"
#include "mrbf/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace mrbf {

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) raise(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
  body(f);
  if (!f) raise(ErrorCode::ConfigError, "write failed for '" + path.string() + "'");
}

}  // namespace

int exit_code(ErrorCode code) {
  const bool config = code == ErrorCode::ConfigError || code == ErrorCode::InvalidArgument ||
                      code == ErrorCode::ParameterOutOfRange;
  return config ? kExitConfig : kExitNumerical;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mortar coupling benchmarks"};
  std::string experiment;
  std::string config_path;
  std::string scheme;
  std::string kernel;
  int n_m = 0;
  int n_gauss = 0;
  int levels = 0;
  double warp = 0.0;
  std::string out_dir;
  app.add_option("experiment", experiment, "interp1d | interp-surface | kernel-study | poisson2d | scheme-compare")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--scheme", scheme, "rb | eb | sb");
  app.add_option("--kernel", kernel, "ga | imq | wendland");
  app.add_option("--nm", n_m, "interpolation points per master edge");
  app.add_option("--gauss", n_gauss, "Gauss points per slave element");
  app.add_option("--levels", levels, "refinement levels");
  app.add_option("--warp", warp, "warp amplitude");
  app.add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    config.experiment = experiment_from_string(experiment);
    if (app.count("--scheme")) config.scheme = scheme_from_string(scheme);
    if (app.count("--kernel")) config.kernel = kernel_family_from_string(kernel);
    if (app.count("--nm")) config.n_m = n_m;
    if (app.count("--gauss")) config.n_gauss = n_gauss;
    if (app.count("--levels")) config.refinements = levels;
    if (app.count("--warp")) config.warp.amplitude = warp;
    if (app.count("--out")) config.out = out_dir;
    validate(config);

    const ExperimentResult result = run_experiment(config);

    const std::filesystem::path dir(config.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) raise(ErrorCode::ConfigError, "cannot create '" + dir.string() + "': " + ec.message());
    write_file(dir / "sweep.csv", [&](std::ostream& s) { write_sweep_csv(s, result.rows); });
    write_file(dir / "report.txt", [&](std::ostream& s) { write_report(s, config, result); });
    if (!result.field.empty()) write_file(dir / "field.csv", [&](std::ostream& s) { write_field_csv(s, result.field); });
    write_report(out, config, result);
    return kExitOk;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace mrbf
