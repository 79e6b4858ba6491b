#include "mrbf/bench.hpp"
#include "mrbf/errors.hpp"
#include "mrbf/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace mrbf {

double observed_order(std::span<const double> h, std::span<const double> error) {
  const std::size_t n = std::min(h.size(), error.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t first = n > 3 ? n - 3 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string series_name(const SweepRow& row) {
  std::string s = row.label + " " + row.scheme;
  if (!row.kernel.empty()) s += " " + row.kernel;
  if (row.n_m) s += " nM=" + std::to_string(*row.n_m);
  return s;
}

std::vector<OrderSummary> summarize_orders(const std::vector<SweepRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) {
    const auto key = series_name(r);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<OrderSummary> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    if (g.size() < 2) continue;
    std::vector<double> h;
    std::vector<double> l2;
    std::vector<double> h1;
    for (const auto* r : g) {
      h.push_back(r->h_slave);
      l2.push_back(r->l2_error);
      if (r->h1_error) h1.push_back(*r->h1_error);
    }
    out.push_back({key, "l2", observed_order(h, l2), l2.back()});
    if (h1.size() == h.size()) out.push_back({key, "h1", observed_order(h, h1), h1.back()});
  }
  return out;
}

double median_seconds(const std::function<void()>& work) {
  std::array<double, 3> t{};
  for (auto& s : t) {
    const auto start = std::chrono::steady_clock::now();
    work();
    s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::sort(t.begin(), t.end());
  return t[1];
}

namespace {

constexpr int kDefaultNm = 6;

struct LevelSize {
  int n_master = 0;
  int n_slave = 0;
};

// Element counts with n_master / n_slave = den / num, i.e. h_master / h_slave = num / den.
LevelSize level_size(const Ratio& r, int level, int base) {
  return {r.den * base << level, r.num * base << level};
}

// Slave-side L2 error of the interpolated nodal field against f.
double slave_l2_error(const InterfaceMesh& slave, const Eigen::VectorXd& values, const AnalyticFunction& f) {
  const ElementKind kind = slave.kind();
  const QuadratureRule rule = gauss_rule(kind, reference_dimension(kind) == 1 ? 8 : 64);
  double sum = 0.0;
  for (Index e = 0; e < slave.num_elements(); ++e) {
    const auto nodes = slave.element(e);
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const ShapeVector n = shape_values(kind, rule.points[g]);
      double uh = 0.0;
      for (std::size_t a = 0; a < nodes.size(); ++a) uh += n[static_cast<Eigen::Index>(a)] * values[nodes[a]];
      const double d = uh - f(map_to_physical(slave, e, rule.points[g]));
      sum += rule.weights[g] * jacobian_measure(slave, e, rule.points[g]) * d * d;
    }
  }
  return std::sqrt(sum);
}

// E u without forming E, which is dense.
Eigen::VectorXd transfer(const MortarMatrices& mm, const Eigen::VectorXd& u_master) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(mm.D);
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) return ldlt.solve(mm.M * u_master);
  return interface_transfer(compute_E(mm), u_master);
}

Eigen::VectorXd nodal_values(const InterfaceMesh& mesh, const AnalyticFunction& f) {
  Eigen::VectorXd v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v[i] = f(mesh.node(i));
  return v;
}

// One scheme/kernel variant of a sweep.
struct Variant {
  Scheme scheme = Scheme::RB;
  KernelFamily kernel = KernelFamily::Gaussian;
  int n_m = kDefaultNm;
};

std::vector<Variant> variants(const ExperimentConfig& c, std::vector<Scheme> schemes, std::vector<KernelFamily> kernels,
                              std::vector<int> n_ms) {
  if (c.scheme) schemes = {*c.scheme};
  if (c.kernel) kernels = {*c.kernel};
  if (c.n_m) n_ms = {*c.n_m};
  std::vector<Variant> out;
  for (const Scheme s : schemes) {
    if (s != Scheme::RB) {
      out.push_back({s, KernelFamily::Gaussian, 0});
      continue;
    }
    for (const KernelFamily k : kernels) {
      for (const int n : n_ms) out.push_back({s, k, n});
    }
  }
  return out;
}

MortarConfig mortar_config(const ExperimentConfig& c, const Variant& v, int n_gauss) {
  MortarConfig m;
  m.scheme = v.scheme;
  m.n_gauss = c.n_gauss.value_or(n_gauss);
  m.rbf.family = v.kernel;
  m.rbf.layout = {c.layout, v.n_m > 0 ? v.n_m : kDefaultNm};
  return m;
}

// Transfers f from master to slave nodes with one scheme and records the row.
SweepRow transfer_row(const ExperimentConfig& c, const InterfacePair& pair, const Variant& v, int n_gauss,
                      const AnalyticFunction& f) {
  const MortarConfig mc = mortar_config(c, v, n_gauss);
  SweepRow row;
  row.scheme = std::string(to_string(v.scheme));
  row.n_gauss = mc.n_gauss;
  row.h_master = max_circumdiameter(pair.master);
  row.h_slave = max_circumdiameter(pair.slave);
  MortarMatrices mm;
  row.assembly_seconds = median_seconds([&] { mm = assemble(pair, mc); });
  row.dropped_fraction = mm.stats.dropped_fraction();
  row.l2_error = slave_l2_error(pair.slave, transfer(mm, nodal_values(pair.master, f)), f);
  if (v.scheme == Scheme::RB) {
    row.kernel = std::string(to_string(v.kernel));
    row.n_m = mc.rbf.layout.n_per_edge;
    const auto master = fit_master_interpolant(pair.master, 0, mc.rbf.layout, v.kernel);
    const auto probes = halton_points(40, reference_dimension(pair.master.kind()));
    const auto d = diagnose(pair.master, master, probes);
    row.rmse = d.rmse;
    row.cond_estimate = d.condition_estimate;
  }
  return row;
}

AnalyticFunction function_or(const ExperimentConfig& c, std::string_view fallback) {
  return analytic_function(c.function.empty() ? fallback : std::string_view(c.function));
}

int default_gauss(ElementKind kind) { return minimum_gauss_points(kind); }

}  // namespace

ExperimentResult run_interp_1d(const ExperimentConfig& c) {
  validate(c);
  const AnalyticFunction f = function_or(c, "sin4x+x2");
  ExperimentResult result;
  const auto vs = variants(c, {Scheme::SB1D, Scheme::EB, Scheme::RB},
                           {KernelFamily::Gaussian, KernelFamily::WendlandC2}, {kDefaultNm});
  for (const auto kind : {ElementKind::Seg2, ElementKind::Seg3}) {
    const std::string label(kind == ElementKind::Seg2 ? "seg2" : "seg3");
    for (int level = 0; level < c.refinements; ++level) {
      const auto sz = level_size(c.ratio, level, 2);
      auto [m, s] = interval_pair(-1.0, 1.0, sz.n_master, sz.n_slave, kind);
      const auto pair = make_interface_pair(std::move(m), std::move(s));
      for (const auto& v : vs) {
        SweepRow row = transfer_row(c, pair, v, default_gauss(kind), f);
        row.level = level;
        row.label = label;
        result.rows.push_back(std::move(row));
      }
    }
  }
  result.orders = summarize_orders(result.rows);
  return result;
}

ExperimentResult run_interp_surface(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result;
  const auto vs = variants(c, {Scheme::EB, Scheme::RB}, {KernelFamily::Gaussian}, {4, kDefaultNm});
  for (const auto& v : vs) {
    if (v.scheme == Scheme::SB1D) raise(ErrorCode::ConfigError, "segment-based integration is 1D only");
  }
  const AnalyticFunction flat_f = function_or(c, "sin4x*cos4y");
  for (const auto kind : {ElementKind::Quad4, ElementKind::Quad8}) {
    const std::string label(kind == ElementKind::Quad4 ? "quad4-flat" : "quad8-flat");
    for (int level = 0; level < c.refinements; ++level) {
      const auto sz = level_size(c.ratio, level, 1);
      auto [m, s] = surface_pair(sz.n_master, sz.n_slave, kind, {}, {});
      const auto pair = make_interface_pair(std::move(m), std::move(s));
      for (const auto& v : vs) {
        SweepRow row = transfer_row(c, pair, v, default_gauss(kind), flat_f);
        row.level = level;
        row.label = label;
        result.rows.push_back(std::move(row));
      }
    }
  }
  result.orders = summarize_orders(result.rows);

  // Warped single shots: the same surface meshed independently on both sides.
  const AnalyticFunction warped_f = function_or(c, "sinx+cosy");
  const SurfaceWarp warp = make_warp(c.warp);
  const auto sz = level_size(c.ratio, 2, 1);
  const int fine = std::max(sz.n_master, sz.n_slave);
  const int coarse = std::min(sz.n_master, sz.n_slave);
  for (const auto kind : {ElementKind::Quad4, ElementKind::Quad8}) {
    for (const bool coarse_slave : {true, false}) {
      const int n_master = coarse_slave ? fine : coarse;
      const int n_slave = coarse_slave ? coarse : fine;
      auto [m, s] = surface_pair(n_master, n_slave, kind, warp, warp);
      const auto pair = make_interface_pair(std::move(m), std::move(s));
      const std::string label = std::string(kind == ElementKind::Quad4 ? "quad4" : "quad8") + "-warped-" +
                                (coarse_slave ? "coarse-slave" : "fine-slave");
      double rb = -1.0;
      double eb = -1.0;
      for (const auto& v : vs) {
        if (v.scheme == Scheme::RB && v.n_m != kDefaultNm && vs.size() > 2) continue;
        SweepRow row = transfer_row(c, pair, v, default_gauss(kind), warped_f);
        row.label = label;
        (v.scheme == Scheme::RB ? rb : eb) = row.l2_error;
        result.rows.push_back(std::move(row));
      }
      if (rb >= 0.0 && eb >= 0.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: L2 error RB %.4g / EB %.4g (relative difference %.1f%%)", label.c_str(), rb,
                      eb, 100.0 * std::abs(rb - eb) / eb);
        result.notes.emplace_back(buf);
      }
    }
  }
  return result;
}

namespace {

// Largest distance from the element (sampled densely) to the nearest interpolation point.
double fill_distance(const InterfaceMesh& mesh, const std::vector<RefCoord>& ref_points) {
  std::vector<Vec3> pts;
  for (const auto& xi : ref_points) pts.push_back(map_to_physical(mesh, 0, xi));
  const bool line = reference_dimension(mesh.kind()) == 1;
  const int n = line ? 2001 : 101;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < (line ? 1 : n); ++j) {
      const RefCoord xi(-1.0 + 2.0 * i / (n - 1), line ? 0.0 : -1.0 + 2.0 * j / (n - 1));
      const Vec3 x = map_to_physical(mesh, 0, xi);
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) nearest = std::min(nearest, (x - p).norm());
      worst = std::max(worst, nearest);
    }
  }
  return worst;
}

}  // namespace

ExperimentResult run_kernel_study(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result;
  std::vector<KernelFamily> kernels{KernelFamily::Gaussian, KernelFamily::InvMultiquadric, KernelFamily::WendlandC2};
  if (c.kernel) kernels = {*c.kernel};
  std::vector<int> n_ms;
  for (int n = 3; n <= kMaxPointsPerEdge; ++n) n_ms.push_back(n);
  if (c.n_m) n_ms = {*c.n_m};
  const std::vector<std::pair<std::string, double>> eps_policies{{"h", 0.0}, {"2hX", 2.0}, {"4hX", 4.0}, {"8hX", 8.0}};
  const std::vector<InterfaceMesh> elements{interval_mesh(-1.0, 1.0, 1, ElementKind::Seg3, Side::Master),
                                            square_surface(-1.0, 1.0, 1, ElementKind::Quad8, {}, Side::Master)};
  for (const auto& mesh : elements) {
    const bool line = reference_dimension(mesh.kind()) == 1;
    const auto probes = halton_points(line ? 40 : 100, line ? 1 : 2);
    const std::string kind_label(line ? "seg3" : "quad8");
    int index = 0;
    for (const auto family : kernels) {
      double worst_constant = 0.0;
      for (const auto layout_variant : {LayoutVariant::UniformGrid, LayoutVariant::SineModified}) {
        for (const int n_m : n_ms) {
          const PointLayout layout{layout_variant, n_m};
          const double h_xi = fill_distance(mesh, interpolation_points(mesh.kind(), layout));
          for (const auto& [policy, factor] : eps_policies) {
            FitOptions opts;
            opts.reject_ill_conditioned = false;
            if (factor > 0.0) opts.epsilon = factor * h_xi;
            MasterInterpolant mi;
            SweepRow row;
            row.assembly_seconds = median_seconds([&] { mi = fit_master_interpolant(mesh, 0, layout, family, opts); });
            const auto d = diagnose(mesh, mi, probes);
            if (!std::isfinite(d.rmse)) {
              result.notes.push_back(kind_label + " " + std::string(to_string(family)) + " nM=" + std::to_string(n_m) +
                                     " eps=" + policy + ": rescaling breaks down, row omitted");
              continue;
            }
            row.level = index++;
            row.h_master = element_circumdiameter(mesh, 0);
            row.h_slave = h_xi;
            row.scheme = "rb";
            row.kernel = std::string(to_string(family));
            row.n_m = n_m;
            row.l2_error = d.rmse;
            row.rmse = d.rmse;
            row.cond_estimate = d.condition_estimate;
            row.label = kind_label + "/" + std::string(to_string(layout_variant)) + "/eps=" + policy;
            result.rows.push_back(row);
            // Constant reproduction at the probes.
            if (policy == "h") {
              std::vector<Vec3> x;
              for (const auto& xi : probes) x.push_back(map_to_physical(mesh, 0, xi));
              try {
                const Eigen::MatrixXd vals = evaluate_rescaled(mi, x);
                worst_constant = std::max(worst_constant, (vals.rowwise().sum().array() - 1.0).abs().maxCoeff());
              } catch (const Error&) {
                worst_constant = std::numeric_limits<double>::infinity();
              }
            }
          }
        }
      }
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s %s: max |sum of rescaled basis - 1| at probes = %.3g", kind_label.c_str(),
                    std::string(to_string(family)).c_str(), worst_constant);
      result.notes.emplace_back(buf);
    }
  }
  return result;
}

ExperimentResult run_poisson_2d(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result;
  const auto vs = variants(c, {Scheme::RB, Scheme::EB}, {KernelFamily::Gaussian}, {kDefaultNm});
  const auto run = [&](const PoissonProblem& p, const Variant& v, SweepRow& row) {
    const MortarConfig mc = mortar_config(c, v, 2);
    CoupledSystem sys = assemble_coupled(p, mc);
    const auto pair = make_interface_pair(sys.interfaces[0].mesh, sys.interfaces[1].mesh);
    row.assembly_seconds = median_seconds([&] { (void)assemble(pair, mc); });
    const SolutionFields condensed = solve(sys, SolvePath::Condensed);
    const SolutionFields saddle = solve(sys, SolvePath::Saddle);
    double gap = 0.0;
    for (std::size_t k = 0; k < 2; ++k) gap = std::max(gap, (condensed.u[k] - saddle.u[k]).cwiseAbs().maxCoeff());
    if (condensed.lambda.size() > 0) gap = std::max(gap, (condensed.lambda - saddle.lambda).cwiseAbs().maxCoeff());
    const ErrorReport err = broken_norms(condensed, p);
    row.scheme = std::string(to_string(v.scheme));
    if (v.scheme == Scheme::RB) {
      row.kernel = std::string(to_string(v.kernel));
      row.n_m = mc.rbf.layout.n_per_edge;
    }
    row.n_gauss = mc.n_gauss;
    row.l2_error = err.l2_broken;
    row.h1_error = err.h1_broken;
    row.dropped_fraction = sys.mortar.stats.dropped_fraction();
    row.h_master = max_circumdiameter(sys.interfaces[0].mesh);
    row.h_slave = max_circumdiameter(sys.interfaces[1].mesh);
    result.checks.push_back({series_name(row), row.level, condensed.constraint_residual, gap});
    return condensed;
  };
  for (int level = 0; level < c.refinements; ++level) {
    const auto sz = level_size(c.ratio, level, 2);
    auto sq = split_unit_square(sz.n_master, sz.n_slave);
    const PoissonProblem p = manufactured_problem(std::move(sq.master), std::move(sq.slave));
    for (const auto& v : vs) {
      SweepRow row;
      row.level = level;
      row.label = "flat";
      (void)run(p, v, row);
      result.rows.push_back(std::move(row));
    }
  }
  result.orders = summarize_orders(result.rows);

  // Curved interface single shot with point-wise errors of the first non-SB variant.
  const int level = std::min(2, c.refinements - 1);
  const auto sz = level_size(c.ratio, level, 2);
  auto sq = split_unit_square(sz.n_master, sz.n_slave, c.warp.amplitude);
  const PoissonProblem p = manufactured_problem(std::move(sq.master), std::move(sq.slave));
  bool exported = false;
  for (const auto& v : vs) {
    if (v.scheme == Scheme::SB1D) continue;
    SweepRow row;
    row.level = level;
    row.label = "curved";
    const SolutionFields f = run(p, v, row);
    result.rows.push_back(row);
    if (exported) continue;
    exported = true;
    for (std::size_t k = 0; k < 2; ++k) {
      for (Index i = 0; i < p.domains[k].num_nodes(); ++i) {
        const Vec3& x = p.domains[k].node(i);
        result.field.push_back({x.x(), x.y(), std::nullopt, std::abs(f.u[k][i] - p.exact->value(x.x(), x.y()))});
      }
    }
  }
  return result;
}

ExperimentResult run_scheme_compare(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result;
  auto vs = variants(c, {Scheme::EB, Scheme::RB}, {KernelFamily::Gaussian}, {kDefaultNm});
  std::erase_if(vs, [](const Variant& v) { return v.scheme == Scheme::SB1D; });
  const auto max_entry = [](const SparseMatrix& a, const SparseMatrix& b) {
    return SparseMatrix(a - b).coeffs().cwiseAbs().maxCoeff();
  };
  const auto sweep = [&](const InterfacePair& pair, const MortarMatrices& reference, const std::vector<int>& gauss,
                         const std::string& label) {
    for (const auto& v : vs) {
      std::vector<double> times;
      const std::vector<int> points = c.n_gauss ? std::vector<int>{*c.n_gauss} : gauss;
      for (std::size_t i = 0; i < points.size(); ++i) {
        MortarConfig mc = mortar_config(c, v, points[i]);
        mc.n_gauss = points[i];
        MortarMatrices mm;
        SweepRow row;
        row.assembly_seconds = median_seconds([&] { mm = assemble(pair, mc); });
        row.level = static_cast<int>(i);
        row.h_master = max_circumdiameter(pair.master);
        row.h_slave = max_circumdiameter(pair.slave);
        row.scheme = std::string(to_string(v.scheme));
        if (v.scheme == Scheme::RB) {
          row.kernel = std::string(to_string(v.kernel));
          row.n_m = mc.rbf.layout.n_per_edge;
        }
        row.n_gauss = mc.n_gauss;
        row.l2_error = std::max(max_entry(mm.M, reference.M), max_entry(mm.D, reference.D));
        row.dropped_fraction = mm.stats.dropped_fraction();
        row.label = label;
        times.push_back(row.assembly_seconds);
        result.rows.push_back(std::move(row));
      }
      if (times.size() > 1) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s %s: assembly time x%.2f from %d to %d Gauss points", label.c_str(),
                      std::string(to_string(v.scheme)).c_str(), times.back() / times.front(), points.front(),
                      points.back());
        result.notes.emplace_back(buf);
      }
    }
  };
  {
    const auto sz = level_size(c.ratio, 1, 2);
    auto [m, s] = interval_pair(-1.0, 1.0, sz.n_master, sz.n_slave, ElementKind::Seg2);
    const auto pair = make_interface_pair(std::move(m), std::move(s));
    MortarConfig sb;
    sb.scheme = Scheme::SB1D;
    sweep(pair, assemble_sb_1d(pair, sb), {2, 4, 8, 16}, "seg2-1d-vs-sb");
  }
  {
    const auto sz = level_size(c.ratio, 1, 1);
    auto [m, s] = surface_pair(sz.n_master, sz.n_slave, ElementKind::Quad4, {}, {});
    const auto pair = make_interface_pair(std::move(m), std::move(s));
    MortarConfig eb;
    eb.scheme = Scheme::EB;
    eb.n_gauss = 256;
    sweep(pair, assemble_eb(pair, eb), {4, 9, 16, 36, 64}, "quad4-flat-vs-eb256");
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::Interp1D: return run_interp_1d(c);
    case Experiment::InterpSurface: return run_interp_surface(c);
    case Experiment::KernelStudy: return run_kernel_study(c);
    case Experiment::Poisson2D: return run_poisson_2d(c);
    case Experiment::SchemeCompare: return run_scheme_compare(c);
  }
  raise(ErrorCode::ConfigError, "unknown experiment");
}

}  // namespace mrbf
