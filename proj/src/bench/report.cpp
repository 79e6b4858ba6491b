#include "mrbf/bench.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

namespace mrbf {

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "level,h_master,h_slave,scheme,kernel,n_M,n_gauss,l2_error,h1_error,rmse,cond_estimate,"
         "assembly_seconds,dropped_fraction,label\n";
  for (const auto& r : rows) {
    out << r.level << ',' << num(r.h_master) << ',' << num(r.h_slave) << ',' << r.scheme << ',' << r.kernel << ','
        << opt(r.n_m) << ',' << r.n_gauss << ',' << num(r.l2_error) << ',' << opt(r.h1_error) << ',' << opt(r.rmse)
        << ',' << opt(r.cond_estimate) << ',' << num(r.assembly_seconds) << ',' << num(r.dropped_fraction) << ','
        << r.label << '\n';
  }
}

void write_report(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result) {
  out << "experiment: " << to_string(config.experiment) << "\n\nconfiguration\n";
  out << serialize_config(config) << '\n';
  out << "rows: " << result.rows.size() << '\n';
  if (!result.orders.empty()) {
    out << "\nobserved orders (least squares over the finest three levels, against h_slave)\n";
    for (const auto& o : result.orders) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %-3s order %6.3f  finest %.4e", o.norm.c_str(), o.order, o.finest_error);
      out << buf << "  " << o.series << '\n';
    }
  }
  double worst_dropped = 0.0;
  for (const auto& r : result.rows) worst_dropped = std::max(worst_dropped, r.dropped_fraction);
  out << "\nlargest dropped Gauss point fraction: " << worst_dropped << '\n';
  if (!result.checks.empty()) {
    out << "\nsolver checks (constraint residual, condensed vs saddle max difference)\n";
    for (const auto& c : result.checks) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  level %d  residual %.3e  paths %.3e  ", c.level, c.constraint_residual,
                    c.path_difference);
      out << buf << c.series << '\n';
    }
  }
  if (!result.notes.empty()) {
    out << "\nnotes\n";
    for (const auto& n : result.notes) out << "  " << n << '\n';
  }
}

void write_field_csv(std::ostream& out, const std::vector<FieldPoint>& field) {
  bool has_z = false;
  for (const auto& p : field) has_z = has_z || p.z.has_value();
  out << (has_z ? "x,y,z,abs_error\n" : "x,y,abs_error\n");
  for (const auto& p : field) {
    out << num(p.x) << ',' << num(p.y) << ',';
    if (has_z) out << opt(p.z) << ',';
    out << num(p.abs_error) << '\n';
  }
}

}  // namespace mrbf
