#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geogami/compliance.hpp"
#include "geogami/locomotion.hpp"

// Run configuration as it appears on disk. Angles here are degrees; they are
// converted to radians only when the simulation objects are built.
namespace geogami::config {

inline constexpr int kSchemaVersion = 1;

struct GearboxSpec {
  int worm_teeth = 43;
  int driver_teeth = 5;
  int driven_teeth = 10;
  double spool_radius_mm = 8.0;
  double sector_arc_deg = 90.0;
  double efficiency_worm = 0.78;
  double efficiency_spur = 0.90;
  int corner_count = 4;
  int first_corner = 1;

  bool operator==(const GearboxSpec&) const = default;
};

struct SpindleProfiles {
  std::array<double, 4> pyramid{1.0, 0.2, 1.0, 1.2};
  std::array<double, 4> spindle5{0.5, 0.15, 0.5, 0.6};
  std::array<double, 4> spindle10{2.0, 2.0, 2.0, 2.0};

  bool operator==(const SpindleProfiles&) const = default;
};

struct MassSpec {
  double central_mass_kg = 0.2;
  std::array<double, 4> corner_mass_kg{0.1, 0.1, 0.1, 0.1};
  std::array<double, 4> ray_angle_deg{90.0, 0.0, 270.0, 180.0};
  std::array<double, 4> rest_radius_mm{94.4, 94.4, 94.4, 94.4};

  bool operator==(const MassSpec&) const = default;
};

/// One origami chain entry: exactly one of stiffness / family / model_file.
struct ChainSpec {
  std::optional<double> stiffness;     // N/rad
  std::optional<std::string> family;   // shipped default model
  std::optional<std::string> model_file;  // fitted model JSON, config-relative
  int count = 1;

  bool operator==(const ChainSpec&) const = default;
};

struct SideSpec {
  std::vector<ChainSpec> origami;
  double skeleton_left = 0.6;
  double skeleton_right = 0.6;
  std::optional<double> cable_stiffness;  // empty: inextensible
  double routing_gain = 1.0;
  double radial_factor = 1.0;

  bool operator==(const SideSpec&) const = default;
};

struct GeometrySpec {
  double support_radius_mm = 94.4;
  double contact_half_angle_deg = 2.2;
  double contraction_per_rad_mm = 14.343;
  double initial_roll_deg = 0.0;
  std::string return_model_family = "folding_24mm";

  bool operator==(const GeometrySpec&) const = default;
};

struct DampingSpec {
  double natural_frequency_rad_s = 10.0;
  double damping_ratio = 0.3;

  bool operator==(const DampingSpec&) const = default;
};

struct ProgramSpec {
  std::string mode = "cyclic";
  bool origami = true;
  double motor_speed_rad_s = 30.0;
  double duration_s = 36.5;
  double time_step_s = 5e-3;
  std::string release_model = "instant_return";
  double max_retraction_mm = 25.1;
  double motor_torque_nm = 2.4e-4;
  double cyclic_roll_deg = 90.0;
  double spindle_roll_deg = 45.0;
  DampingSpec with_origami{9.0, 0.45};
  DampingSpec without_origami{12.0, 0.15};
  bool allow_damping_override = false;

  bool operator==(const ProgramSpec&) const = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name = "unnamed";
  GearboxSpec gearbox;
  SpindleProfiles spindles;
  MassSpec mass_layout;
  std::array<SideSpec, 4> sides;
  std::string composition_law = "B";
  GeometrySpec geometry;
  ProgramSpec program;
  std::string output_dir = "out";
  // Directory used to resolve relative model_file paths; not serialised.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& other) const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Parses and validates. Throws Error(config_error) naming the bad field.
RunConfig from_json(const nlohmann::json& doc,
                    const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);

/// Preset directory: $GEOGAMI_PRESET_DIR if set, else the shipped presets.
std::filesystem::path preset_dir();
/// A path to an existing file, or the name of a shipped preset.
std::filesystem::path resolve_config(const std::string& path_or_preset);

compliance::CompositionLaw composition_law(const RunConfig& cfg);
transmission::GearboxConfig gearbox_config(const RunConfig& cfg);
std::array<compliance::SideAssembly, 4> side_assemblies(
    const RunConfig& cfg, bool origami);

struct Simulation {
  locomotion::RobotModel model;
  locomotion::ActuationProgram program;
  body::BodyState initial;
};

/// Builds the simulation objects for the configured (or overridden) mode and
/// origami setting.
Simulation build_simulation(const RunConfig& cfg,
                            std::optional<locomotion::ActuationMode> mode = {},
                            std::optional<bool> origami = {});

/// Cross-field validation: corner counts, referenced files, value ranges.
void validate(const RunConfig& cfg);

}  // namespace geogami::config
