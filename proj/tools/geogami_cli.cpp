// geogami: command-line front end for the simulator.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "geogami/compliance.hpp"
#include "geogami/config.hpp"
#include "geogami/error.hpp"
#include "geogami/harness.hpp"
#include "geogami/io.hpp"
#include "geogami/units.hpp"

namespace fs = std::filesystem;
using namespace geogami;

namespace {

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

int fail(std::string_view token, const std::string& msg, int code = 1) {
  std::cerr << fmt::format("geogami: error[{}]: {}\n", token, one_line(msg));
  return code;
}

std::optional<bool> parse_on_off(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "on") return true;
  if (s == "off") return false;
  throw Error(Errc::invalid_argument,
              fmt::format("--origami expects on or off, got '{}'", s));
}

std::optional<locomotion::ActuationMode> parse_mode(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return locomotion::actuation_mode_from_string(s);
}

struct FitArgs {
  std::string input;
  int degree = 3;
  std::string output;
  std::string family = "custom";
};

int cmd_fit(const FitArgs& a) {
  const auto family = compliance::joint_family_from_string(a.family);
  const auto data = io::read_measurement_csv(a.input, family);
  const auto fit = compliance::fit_joint_model(data, a.degree);
  const auto doc = io::joint_model_to_json(fit).dump(2) + "\n";
  if (a.output.empty()) {
    std::cout << doc;
  } else {
    io::write_file_atomic(a.output, doc);
  }
  std::cerr << fmt::format(
      "samples: {}\nrange_deg: [{:.3f}, {:.3f}]\nmean_stiffness_N_per_rad: "
      "{:.4f}\nforce_rms_N: {:.3e}\nreturn_rms_deg: {:.3e}\n",
      data.samples.size(), rad_to_deg(fit.model.theta_min),
      rad_to_deg(fit.model.theta_max), fit.model.mean_stiffness, fit.force_rms,
      rad_to_deg(fit.return_rms));
  return 0;
}

struct GearboxArgs {
  std::string config = "paper-table1";
  std::optional<double> retraction, motor_deg, tension, torque;
  std::optional<int> side;
  std::string mode;
  bool csv = false;
};

int cmd_gearbox(const GearboxArgs& a) {
  int given = 0;
  harness::GearboxQuery q;
  if (a.retraction) ++given, q = {harness::QueryKind::retraction, *a.retraction};
  if (a.motor_deg) ++given, q = {harness::QueryKind::motor_angle, deg_to_rad(*a.motor_deg)};
  if (a.tension) ++given, q = {harness::QueryKind::tension, *a.tension};
  if (a.torque) ++given, q = {harness::QueryKind::motor_torque, *a.torque};
  if (given != 1) {
    throw Error(Errc::invalid_argument,
                "give exactly one of --retraction, --motor-deg, --tension, --torque");
  }
  const auto cfg = config::load_config(config::resolve_config(a.config));
  config::validate(cfg);
  const auto sim = config::build_simulation(cfg, parse_mode(a.mode));
  const auto report = harness::gearbox_report(sim.model, sim.program, q, a.side);
  std::cout << (a.csv ? harness::format_report_csv(report)
                      : harness::format_report_text(report));
  return 0;
}

struct SimulateArgs {
  std::string config = "paper-table1";
  std::string mode;
  std::string origami;
  bool plot = false;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto cfg = config::load_config(config::resolve_config(a.config));
  const auto mode = parse_mode(a.mode);
  const auto origami = parse_on_off(a.origami);
  const auto result = harness::run(cfg, mode, origami);
  const fs::path dir = a.out.empty() ? fs::path(cfg.output_dir) : fs::path(a.out);
  io::write_file_atomic(dir / "trace.csv", io::trace_csv(result.trace));
  const auto summary = harness::format_summary(result.summary);
  io::write_file_atomic(dir / "summary.txt", summary);
  if (a.plot) {
    const auto title = fmt::format(
        "{}: {} mode, origami {}", cfg.name,
        locomotion::to_string(
            mode.value_or(locomotion::actuation_mode_from_string(cfg.program.mode))),
        origami.value_or(cfg.program.origami) ? "on" : "off");
    io::write_file_atomic(dir / "trace.svg", io::trace_svg(result.trace, title));
  }
  std::cout << summary;
  return 0;
}

struct SweepArgs {
  std::string config = "paper-table1";
  std::string param;
  std::string values;
  std::string range;
  std::string mode;
  std::string origami;
  std::string out;
  unsigned threads = 0;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.values.empty() == a.range.empty()) {
    throw Error(Errc::invalid_argument, "give exactly one of --values, --range");
  }
  const auto values =
      a.values.empty() ? harness::parse_range(a.range) : harness::parse_values(a.values);
  const auto cfg = config::load_config(config::resolve_config(a.config));
  const auto rows = harness::sweep(cfg, a.param, values, parse_mode(a.mode),
                                   parse_on_off(a.origami), a.threads);
  const auto csv = harness::format_sweep_csv(rows);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    io::write_file_atomic(a.out, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GeoGami mono-actuated origami robot simulator"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a joint model to bench data");
  fit_cmd->add_option("input", fit.input, "Measurement CSV")->required();
  fit_cmd->add_option("--degree", fit.degree, "Polynomial degree")->capture_default_str();
  fit_cmd->add_option("-o,--output", fit.output, "Model JSON (stdout if omitted)");
  fit_cmd->add_option("--family", fit.family, "Joint family tag")->capture_default_str();

  GearboxArgs gb;
  auto* gb_cmd = app.add_subcommand("gearbox", "Evaluate the transmission chain");
  gb_cmd->add_option("--config", gb.config, "Config file or preset name")->capture_default_str();
  gb_cmd->add_option("--retraction", gb.retraction, "Cable retraction [mm]");
  gb_cmd->add_option("--motor-deg", gb.motor_deg, "Motor angle [deg]");
  gb_cmd->add_option("--tension", gb.tension, "Cable tension [N]");
  gb_cmd->add_option("--torque", gb.torque, "Motor torque [N*m]");
  gb_cmd->add_option("--side", gb.side, "Report one corner (1-4)");
  gb_cmd->add_option("--mode", gb.mode, "Engagement schedule for --motor-deg");
  gb_cmd->add_flag("--csv", gb.csv, "Machine-readable CSV");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one actuation program");
  sim_cmd->add_option("--config", sim.config, "Config file or preset name")->capture_default_str();
  sim_cmd->add_option("--mode", sim.mode, "cyclic, pyramid, spindle5 or spindle10");
  sim_cmd->add_option("--origami", sim.origami, "on or off");
  sim_cmd->add_flag("--plot", sim.plot, "Also write trace.svg");
  sim_cmd->add_option("--out", sim.out, "Output directory");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Run one simulation per parameter value");
  sw_cmd->add_option("--config", sw.config, "Config file or preset name")->capture_default_str();
  sw_cmd->add_option("--param", sw.param, "Dotted config field, e.g. gearbox.spool_radius_mm")
      ->required();
  sw_cmd->add_option("--values", sw.values, "Comma-separated values");
  sw_cmd->add_option("--range", sw.range, "start:stop:step");
  sw_cmd->add_option("--mode", sw.mode, "Actuation mode override");
  sw_cmd->add_option("--origami", sw.origami, "on or off");
  sw_cmd->add_option("--out", sw.out, "CSV file (stdout if omitted)");
  sw_cmd->add_option("--threads", sw.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*gb_cmd) return cmd_gearbox(gb);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*sw_cmd) return cmd_sweep(sw);
  } catch (const Error& e) {
    return fail(errc_token(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 1;
}
