#include "geogami/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "geogami/error.hpp"
#include "geogami/transmission.hpp"
#include "geogami/units.hpp"

namespace geogami::harness {

using nlohmann::json;

namespace {

std::string_view query_name(QueryKind kind) {
  switch (kind) {
    case QueryKind::retraction: return "retraction_mm";
    case QueryKind::motor_angle: return "motor_angle_rad";
    case QueryKind::tension: return "tension_N";
    case QueryKind::motor_torque: return "motor_torque_Nm";
  }
  return "?";
}

double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(Errc::invalid_argument,
                fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Kinematic part of a row, for a corner known to be engaged.
void fill_kinematics(ChainRow& row, double retraction_mm,
                     const transmission::GearboxConfig& gb) {
  row.retraction_mm = retraction_mm;
  row.motor_angle_rad = transmission::motor_angle_for_retraction(retraction_mm, gb);
  row.driver_angle_rad = transmission::driver_angle(row.motor_angle_rad, gb);
  row.spool_angle_rad = retraction_mm / gb.spool_radius_mm;
}

void fill_forces_from_tension(ChainRow& row, double force,
                              const transmission::GearboxConfig& gb) {
  row.force_n = force;
  row.spool_torque_nm = force * gb.spool_radius_mm / kMmPerM;
  row.motor_torque_nm = transmission::motor_torque_for_force(force, gb);
}

}  // namespace

GearboxReport gearbox_report(const locomotion::RobotModel& model,
                             const locomotion::ActuationProgram& program,
                             const GearboxQuery& query,
                             std::optional<int> corner) {
  const auto& gb = model.gearbox;
  if (!std::isfinite(query.value) || query.value < 0.0) {
    throw Error(Errc::invalid_argument,
                fmt::format("{} must be finite and non-negative, got {}",
                            query_name(query.kind), query.value));
  }
  if (corner) transmission::check_corner(*corner);

  GearboxReport report;
  report.query = query;
  report.efficiency = gb.efficiency();
  report.closing_efficiency = transmission::closing_efficiency(1.8, 2.4e-4, gb);

  for (int c = 1; c <= transmission::kCornerCount; ++c) {
    if (corner && c != *corner) continue;
    const auto& side = model.sides[static_cast<std::size_t>(c - 1)];
    const double stiffness =
        compliance::cable_series_stiffness(side, model.law) / side.routing_gain;
    ChainRow row;
    row.corner = c;
    switch (query.kind) {
      case QueryKind::retraction:
        fill_kinematics(row, query.value, gb);
        fill_forces_from_tension(row, stiffness * query.value, gb);
        break;
      case QueryKind::motor_angle: {
        row.motor_angle_rad = query.value;
        row.driver_angle_rad = transmission::driver_angle(query.value, gb);
        row.spool_angle_rad =
            transmission::spool_angle(query.value, c, program.schedule, gb);
        row.retraction_mm =
            transmission::cable_retraction(row.spool_angle_rad, gb);
        fill_forces_from_tension(row, stiffness * row.retraction_mm, gb);
        break;
      }
      case QueryKind::tension:
        fill_kinematics(row, query.value / stiffness, gb);
        fill_forces_from_tension(row, query.value, gb);
        break;
      case QueryKind::motor_torque: {
        const double ts = transmission::spool_torque(query.value, true, gb);
        const double force = transmission::cable_force(ts, gb);
        fill_kinematics(row, force / stiffness, gb);
        row.force_n = force;
        row.spool_torque_nm = ts;
        row.motor_torque_nm = query.value;
        break;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string format_report_text(const GearboxReport& report) {
  std::string out = fmt::format("query: {} = {}\n\n", query_name(report.query.kind),
                                report.query.value);
  out += fmt::format("{:>6} {:>14} {:>14} {:>14} {:>12} {:>14} {:>12} {:>14}\n",
                     "corner", "theta_m[rad]", "theta_d[rad]", "theta_s[rad]",
                     "L[mm]", "tau_s[N*m]", "F[N]", "tau_m[N*m]");
  for (const auto& r : report.rows) {
    out += fmt::format(
        "{:>6} {:>14.6f} {:>14.6f} {:>14.6f} {:>12.6f} {:>14.6e} {:>12.6f} "
        "{:>14.6e}\n",
        r.corner, r.motor_angle_rad, r.driver_angle_rad, r.spool_angle_rad,
        r.retraction_mm, r.spool_torque_nm, r.force_n, r.motor_torque_nm);
  }
  out += fmt::format(
      "\nefficiency: eta = eta_worm * eta_spur = {:.4f}\n"
      "closing efficiency: eta = F * r_s * T_dr / (tau_m * T_w * T_dv)"
      " with F = 1.8 N, tau_m = 2.4e-4 N*m gives {:.4f} (~0.70)\n",
      report.efficiency, report.closing_efficiency);
  return out;
}

std::string format_report_csv(const GearboxReport& report) {
  std::string out =
      "corner,theta_m_rad,theta_d_rad,theta_s_rad,L_mm,tau_s_Nm,F_N,tau_m_Nm\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.corner, r.motor_angle_rad,
                       r.driver_angle_rad, r.spool_angle_rad, r.retraction_mm,
                       r.spool_torque_nm, r.force_n, r.motor_torque_nm);
  }
  return out;
}

RunResult run(const config::RunConfig& cfg,
              std::optional<locomotion::ActuationMode> mode,
              std::optional<bool> origami) {
  config::validate(cfg);
  const auto sim = config::build_simulation(cfg, mode, origami);
  RunResult result;
  result.trace = locomotion::run_program(sim.model, sim.program, sim.initial);
  result.summary = locomotion::summarize(result.trace);
  result.drive_tension_n = transmission::cable_force(
      transmission::spool_torque(sim.program.motor_torque_nm, true,
                                 sim.model.gearbox),
      sim.model.gearbox);
  return result;
}

std::string format_summary(const locomotion::RunSummary& s) {
  std::string out = fmt::format("rolls: {}\ntravel_mm: {:.3f}\n", s.rolls,
                                s.travel_mm);
  out += fmt::format("stalled: {}\n", s.stalled ? "yes" : "no");
  if (s.stall_time_s) out += fmt::format("stall_time_s: {:.6f}\n", *s.stall_time_s);
  out += fmt::format("max_overshoot_deg: {:.4f}\nmax_tension_N: {:.4f}\n",
                     rad_to_deg(s.max_overshoot_rad), s.max_tension_n);
  return out;
}

std::vector<double> parse_range(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) {
    throw Error(Errc::invalid_argument,
                fmt::format("range '{}' must be start:stop:step", spec));
  }
  const double start = parse_number(parts[0], "range start");
  const double stop = parse_number(parts[1], "range stop");
  const double step = parse_number(parts[2], "range step");
  if (step == 0.0) throw Error(Errc::invalid_argument, "range step is zero");
  const double span = (stop - start) / step;
  if (span < -1e-9) {
    throw Error(Errc::invalid_argument,
                fmt::format("range '{}' is empty", spec));
  }
  const auto n = static_cast<long>(std::floor(span + 1e-9)) + 1;
  if (n > 100000) {
    throw Error(Errc::invalid_argument,
                fmt::format("range '{}' has {} points", spec, n));
  }
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::vector<double> parse_values(std::string_view spec) {
  std::vector<double> out;
  for (auto part : split(spec, ',')) out.push_back(parse_number(part, "value"));
  return out;
}

config::RunConfig with_parameter(const config::RunConfig& cfg,
                                 std::string_view path, double value) {
  json doc = config::to_json(cfg);
  json* node = &doc;
  for (auto key : split(path, '.')) {
    const std::string k(key);
    if (node->is_object() && node->contains(k)) {
      node = &(*node)[k];
    } else if (node->is_array() && !k.empty() &&
               std::all_of(k.begin(), k.end(),
                           [](char ch) { return ch >= '0' && ch <= '9'; }) &&
               std::stoul(k) < node->size()) {
      node = &(*node)[std::stoul(k)];
    } else {
      throw Error(Errc::config_error,
                  fmt::format("unknown field '{}'", path));
    }
  }
  if (node->is_number_integer()) {
    if (value != std::floor(value)) {
      throw Error(Errc::config_error,
                  fmt::format("field '{}' is an integer, got {}", path, value));
    }
    *node = static_cast<long long>(value);
  } else if (node->is_number() || node->is_null()) {
    // null appears for an inextensible cable; a number makes it elastic.
    *node = value;
  } else {
    throw Error(Errc::config_error,
                fmt::format("field '{}' is not numeric", path));
  }
  return config::from_json(doc, cfg.base_dir);
}

std::vector<SweepRow> sweep(const config::RunConfig& cfg, std::string_view path,
                            const std::vector<double>& values,
                            std::optional<locomotion::ActuationMode> mode,
                            std::optional<bool> origami, unsigned threads) {
  if (values.empty()) throw Error(Errc::invalid_argument, "empty sweep range");
  // Build every config up front so field errors surface before any run.
  std::vector<config::RunConfig> configs;
  for (double v : values) configs.push_back(with_parameter(cfg, path, v));

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        const auto r = run(configs[i], mode, origami);
        rows[i] = {values[i], r.summary, r.drive_tension_n};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,rolls,travel_mm,max_tension_N,drive_tension_N,stalled\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.value, r.summary.rolls,
                       r.summary.travel_mm, r.summary.max_tension_n,
                       r.drive_tension_n, r.summary.stalled ? 1 : 0);
  }
  return out;
}

}  // namespace geogami::harness
