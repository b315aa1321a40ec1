#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "geogami/body_kinematics.hpp"
#include "geogami/compliance.hpp"
#include "geogami/transmission.hpp"

// Quasi-static event-driven locomotion: the motor advances, the engaged
// corner contracts, the centre of mass moves, and the body rolls by a fixed
// quantum whenever the COM leaves the ground-contact edge.
namespace geogami::locomotion {

using body::Quad;
using body::Vec2;

enum class ActuationMode { cyclic, pyramid, spindle5, spindle10 };
std::string_view to_string(ActuationMode mode);
ActuationMode actuation_mode_from_string(std::string_view name);

enum class ReleaseModel { instant_return, return_angle_limited };
std::string_view to_string(ReleaseModel model);
ReleaseModel release_model_from_string(std::string_view name);

/// Underdamped second-order response overlaid on phi after each roll.
struct DampingPreset {
  double natural_frequency_rad_s = 10.0;
  double damping_ratio = 0.3;

  bool operator==(const DampingPreset&) const = default;
};

struct ActuationProgram {
  double motor_speed_rad_s = 30.0;
  double duration_s = 36.5;
  double time_step_s = 5e-3;
  transmission::EngagementSchedule schedule =
      transmission::EngagementSchedule::cyclic({});
  ReleaseModel release = ReleaseModel::instant_return;
  DampingPreset with_origami{9.0, 0.45};
  DampingPreset without_origami{12.0, 0.15};
  bool origami = true;
  // Accept presets where the origami cap damps less than the bare skeleton.
  bool allow_damping_override = false;
  double max_retraction_mm = 25.1;  // per-corner cable take-up limit
  double roll_quantum_rad = kPi / 2.0;
  double motor_torque_nm = 2.4e-4;

  const DampingPreset& active_damping() const {
    return origami ? with_origami : without_origami;
  }
  void validate() const;
};

/// Static description of one robot: gearbox, masses, sides, contact geometry.
struct RobotModel {
  transmission::GearboxConfig gearbox;
  body::MassLayout layout;
  std::array<compliance::SideAssembly, 4> sides;
  compliance::CompositionLaw law = compliance::CompositionLaw::all_series;
  // Feet sit at ray angle +/- this half angle; 0 gives one vertex per corner.
  double contact_half_angle_rad = 0.0;
  // Radial contraction per radian of joint bend (return-angle release).
  double contraction_per_rad_mm = 14.343;
  compliance::JointModel return_model =
      compliance::default_joint_model(compliance::JointFamily::folding_24mm);

  void validate() const;
};

/// Contact-capable points in the body frame, counterclockwise.
struct SupportPolygon {
  std::vector<Vec2> vertices;
};

SupportPolygon support_polygon(const RobotModel& model, const Quad& radii);

/// The polygon edge crossed by the downward ray from the body centre.
struct ContactEdge {
  int left = 0;   // vertex index on the -x side
  int right = 0;  // vertex index on the +x side
  double left_x = 0.0;
  double right_x = 0.0;
};

/// Throws degenerate_polygon when no contact edge can be resolved.
ContactEdge contact_edge(const body::BodyState& state,
                         const SupportPolygon& polygon);

struct TipCheck {
  bool tipping = false;
  int direction = 0;  // +1 rolls toward +x, -1 toward -x
  double com_x = 0.0;
  double pivot_x = 0.0;  // pivot on the side the COM leans to
};

/// Tipping iff the world COM lies strictly beyond the contact edge.
TipCheck tipping_check(const body::BodyState& state,
                       const body::MassLayout& layout,
                       const SupportPolygon& polygon);

/// Quantised roll about the pivot: phi advances by direction * quantum.
body::BodyState execute_roll(const body::BodyState& state, int direction,
                             double quantum);

enum class EventKind {
  engagement_start,
  engagement_end,
  tip,
  roll_complete,
  stall,
  saturation,
};
std::string_view to_string(EventKind kind);

struct SimEvent {
  EventKind kind = EventKind::tip;
  double time_s = 0.0;
  double motor_angle_rad = 0.0;
  int corner = 0;     // 1-based, 0 when not corner-specific
  int direction = 0;  // tip / roll only
  body::BodyState snapshot;
};

struct RollRecord {
  double time_s = 0.0;
  double delta_rad = 0.0;
};

struct SimState {
  body::BodyState body;
  double motor_angle_rad = 0.0;
  std::optional<int> engaged_corner;  // cyclic mode only
  bool rolled_this_engagement = false;
  bool drive_saturated = false;
  bool stalled = false;
  std::vector<RollRecord> rolls;

  bool operator==(const SimState&) const = default;
};

SimState initial_state(const RobotModel& model, const ActuationProgram& program,
                       const body::BodyState& body);

/// Corners currently pulled by the drive (1-based).
std::vector<int> engaged_corners(const ActuationProgram& program,
                                 const SimState& state);

struct StepResult {
  SimState state;
  std::vector<SimEvent> events;
};

/// Advances the motor by motor_speed * dt, located events within the step
/// in time order.
StepResult step(const RobotModel& model, const ActuationProgram& program,
                const SimState& state, double dt);

struct StallReport {
  double time_s = 0.0;
  double motor_angle_rad = 0.0;
  Quad contraction_mm{};
};

/// Stall: every engaged corner is at its take-up limit and the body is stable.
std::optional<StallReport> detect_stall(const RobotModel& model,
                                        const ActuationProgram& program,
                                        const SimState& state);

/// Deviation of the displayed roll angle from the quantised one, tau seconds
/// after a roll of size delta.
double oscillation_overlay(const DampingPreset& damping, double delta,
                           double tau);
/// Peak overshoot of a single roll of size delta.
double peak_overshoot(const DampingPreset& damping, double delta);

/// Roll angle with all post-tip oscillations superimposed.
double displayed_roll_angle(const SimState& state, const DampingPreset& damping,
                            double time_s);

struct TraceRecord {
  double time_s = 0.0;
  double motor_angle_rad = 0.0;
  double roll_angle_rad = 0.0;  // displayed, with oscillation
  double quantized_roll_rad = 0.0;
  Vec2 com_mm = Vec2::Zero();
  Quad retraction_mm{};
  Quad tension_n{};
  std::optional<EventKind> event;
};

struct SimTrace {
  std::vector<TraceRecord> records;
  std::vector<SimEvent> events;
  SimState final_state;
};

SimTrace run_program(const RobotModel& model, const ActuationProgram& program,
                     const body::BodyState& initial);

struct RunSummary {
  int rolls = 0;
  double travel_mm = 0.0;
  bool stalled = false;
  std::optional<double> stall_time_s;
  double max_overshoot_rad = 0.0;
  double max_tension_n = 0.0;
};

RunSummary summarize(const SimTrace& trace);

}  // namespace geogami::locomotion
