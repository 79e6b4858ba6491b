#include "mrbf/bench.hpp"
#include "mrbf/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace mrbf {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Interp1D: return "interp1d";
    case Experiment::InterpSurface: return "interp-surface";
    case Experiment::KernelStudy: return "kernel-study";
    case Experiment::Poisson2D: return "poisson2d";
    case Experiment::SchemeCompare: return "scheme-compare";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  for (const auto e : {Experiment::Interp1D, Experiment::InterpSurface, Experiment::KernelStudy, Experiment::Poisson2D,
                       Experiment::SchemeCompare}) {
    if (to_string(e) == name) return e;
  }
  raise(ErrorCode::ConfigError, "unknown experiment '" + std::string(name) + "'");
}

SurfaceWarp make_warp(const WarpSpec& spec) {
  const double a = spec.amplitude;
  if (spec.variant == "bump") return sine_bump_warp(a);
  if (spec.variant == "sine") {
    return [a](double x, double y) { return a * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); };
  }
  raise(ErrorCode::ConfigError, "unknown warp variant '" + spec.variant + "'");
}

AnalyticFunction analytic_function(std::string_view id) {
  if (id == "sin4x+x2") return [](const Vec3& p) { return std::sin(4 * p.x()) + p.x() * p.x(); };
  if (id == "sin4x*cos4y") return [](const Vec3& p) { return std::sin(4 * p.x()) * std::cos(4 * p.y()); };
  if (id == "sinx+cosy") return [](const Vec3& p) { return std::sin(p.x()) + std::cos(p.y()); };
  if (id == "one") return [](const Vec3&) { return 1.0; };
  if (id == "linear") return [](const Vec3& p) { return 1.0 + 2.0 * p.x() - 0.5 * p.y(); };
  raise(ErrorCode::ConfigError, "unknown function id '" + std::string(id) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) raise(ErrorCode::ConfigError, where + ": '" + text + "' is not a valid number");
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Library parse errors become config errors tagged with the location.
template <class F>
auto as_config(const std::string& where, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    raise(ErrorCode::ConfigError, where + ": " + e.what());
  }
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  if (key == "experiment") {
    c.experiment = experiment_from_string(value);
  } else if (key == "levels") {
    c.refinements = parse_number<int>(value, where);
  } else if (key == "ratio") {
    const auto slash = value.find('/');
    if (slash == std::string::npos) raise(ErrorCode::ConfigError, where + ": ratio must look like p/q");
    c.ratio = {parse_number<int>(trim(value.substr(0, slash)), where),
               parse_number<int>(trim(value.substr(slash + 1)), where)};
  } else if (key == "scheme") {
    c.scheme = as_config(where, [&] { return scheme_from_string(value); });
  } else if (key == "kernel") {
    c.kernel = as_config(where, [&] { return kernel_family_from_string(value); });
  } else if (key == "nm") {
    c.n_m = parse_number<int>(value, where);
  } else if (key == "gauss") {
    c.n_gauss = parse_number<int>(value, where);
  } else if (key == "layout") {
    if (value == "uniform") {
      c.layout = LayoutVariant::UniformGrid;
    } else if (value == "modified") {
      c.layout = LayoutVariant::SineModified;
    } else {
      raise(ErrorCode::ConfigError, where + ": layout must be uniform or modified");
    }
  } else if (key == "function") {
    (void)analytic_function(value);
    c.function = value;
  } else if (key == "warp") {
    c.warp.amplitude = parse_number<double>(value, where);
  } else if (key == "warp_variant") {
    c.warp.variant = value;
  } else if (key == "out") {
    c.out = value;
  } else {
    raise(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::set<std::string> seen;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "config line " + std::to_string(n);
    const auto eq = body.find('=');
    if (eq == std::string::npos) raise(ErrorCode::ConfigError, where + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) raise(ErrorCode::ConfigError, where + ": empty key or value");
    if (!seen.insert(key).second) raise(ErrorCode::ConfigError, where + ": duplicate key '" + key + "'");
    apply(base, key, value, where);
  }
  return base;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment = " << to_string(c.experiment) << '\n';
  out << "levels = " << c.refinements << '\n';
  out << "ratio = " << c.ratio.num << '/' << c.ratio.den << '\n';
  if (c.scheme) out << "scheme = " << to_string(*c.scheme) << '\n';
  if (c.kernel) out << "kernel = " << to_string(*c.kernel) << '\n';
  if (c.n_m) out << "nm = " << *c.n_m << '\n';
  if (c.n_gauss) out << "gauss = " << *c.n_gauss << '\n';
  out << "layout = " << to_string(c.layout) << '\n';
  if (!c.function.empty()) out << "function = " << c.function << '\n';
  out << "warp = " << format_double(c.warp.amplitude) << '\n';
  out << "warp_variant = " << c.warp.variant << '\n';
  out << "out = " << c.out << '\n';
  return out.str();
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& msg) { raise(ErrorCode::ConfigError, msg); };
  if (c.refinements < 1 || c.refinements > 8) fail("levels must be in [1, 8]");
  if (c.ratio.num <= 0 || c.ratio.den <= 0 || c.ratio.num > 16 || c.ratio.den > 16) {
    fail("ratio terms must be in [1, 16]");
  }
  if (c.n_m && (*c.n_m < 2 || *c.n_m > kMaxPointsPerEdge)) {
    fail("nm must be in [2, " + std::to_string(kMaxPointsPerEdge) + "]");
  }
  if (c.n_gauss && (*c.n_gauss < 1 || *c.n_gauss > 32)) fail("gauss must be in [1, 32]");
  if (!std::isfinite(c.warp.amplitude) || std::abs(c.warp.amplitude) > 0.25) fail("warp amplitude must be in [-0.25, 0.25]");
  if (c.warp.variant != "bump" && c.warp.variant != "sine") fail("warp_variant must be bump or sine");
  if (!c.function.empty()) (void)analytic_function(c.function);
  if (c.out.empty()) fail("out must not be empty");
}

}  // namespace mrbf
