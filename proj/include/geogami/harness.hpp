#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geogami/config.hpp"
#include "geogami/locomotion.hpp"

// Experiment plumbing shared by the command-line tool and the tests:
// transmission-chain reports, single runs and parameter sweeps.
namespace geogami::harness {

enum class QueryKind { retraction, motor_angle, tension, motor_torque };

struct GearboxQuery {
  QueryKind kind = QueryKind::retraction;
  double value = 0.0;  // mm, rad, N or N*m
};

/// One corner's transmission chain, motor to cable.
struct ChainRow {
  int corner = 1;
  double motor_angle_rad = 0.0;
  double driver_angle_rad = 0.0;
  double spool_angle_rad = 0.0;
  double retraction_mm = 0.0;
  double spool_torque_nm = 0.0;
  double force_n = 0.0;
  double motor_torque_nm = 0.0;
};

struct GearboxReport {
  GearboxQuery query;
  std::vector<ChainRow> rows;
  double efficiency = 0.0;
  // Efficiency that closes the published torque/force pair for this gearing.
  double closing_efficiency = 0.0;
};

/// Retraction and motor-angle queries evaluate the cable force from the
/// side's elastic tension; tension and torque queries solve back for the
/// retraction that produces that force. Motor-angle queries follow the
/// engagement schedule from zero, the others assume the corner is engaged.
GearboxReport gearbox_report(const locomotion::RobotModel& model,
                             const locomotion::ActuationProgram& program,
                             const GearboxQuery& query,
                             std::optional<int> corner = {});

std::string format_report_text(const GearboxReport& report);
std::string format_report_csv(const GearboxReport& report);

struct RunResult {
  locomotion::SimTrace trace;
  locomotion::RunSummary summary;
  double drive_tension_n = 0.0;  // cable force at the program motor torque
};

RunResult run(const config::RunConfig& cfg,
              std::optional<locomotion::ActuationMode> mode = {},
              std::optional<bool> origami = {});

std::string format_summary(const locomotion::RunSummary& summary);

/// Parses "start:stop:step" (inclusive of stop). Throws for a zero step or an
/// empty range.
std::vector<double> parse_range(std::string_view spec);
/// Parses a comma-separated value list.
std::vector<double> parse_values(std::string_view spec);

/// Returns a copy of `cfg` with the numeric field at the dotted path (e.g.
/// "gearbox.spool_radius_mm" or "sides.0.routing_gain") set to `value`.
config::RunConfig with_parameter(const config::RunConfig& cfg,
                                 std::string_view path, double value);

struct SweepRow {
  double value = 0.0;
  locomotion::RunSummary summary;
  double drive_tension_n = 0.0;
};

/// One run per value; independent runs execute on up to `threads` workers.
std::vector<SweepRow> sweep(const config::RunConfig& cfg,
                            std::string_view path,
                            const std::vector<double>& values,
                            std::optional<locomotion::ActuationMode> mode = {},
                            std::optional<bool> origami = {},
                            unsigned threads = 0);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace geogami::harness
