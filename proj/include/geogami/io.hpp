#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "geogami/compliance.hpp"
#include "geogami/locomotion.hpp"

// File formats: measurement CSV, joint-model JSON, trace CSV and SVG plots.
namespace geogami::io {

inline constexpr std::string_view kMeasurementHeader =
    "theta_deg,force_N,return_deg";
inline constexpr std::string_view kTraceHeader =
    "t_s,theta_m_rad,phi_rad,xG_mm,yG_mm,L1_mm,L2_mm,L3_mm,L4_mm,"
    "T1_N,T2_N,T3_N,T4_N,event";

/// Parses averaged bench samples. Lines starting with '#' are collected as
/// rig metadata. Errors name the offending data row (1-based, header
/// excluded).
compliance::JointMeasurementSet parse_measurement_csv(
    std::istream& in, compliance::JointFamily family);
compliance::JointMeasurementSet read_measurement_csv(
    const std::filesystem::path& path, compliance::JointFamily family);

nlohmann::json joint_model_to_json(const compliance::JointFit& fit);
compliance::JointModel joint_model_from_json(const nlohmann::json& doc);
compliance::JointModel load_joint_model(const std::filesystem::path& path);

std::string trace_csv(const locomotion::SimTrace& trace);

/// Two stacked panels, roll angle and motor angle against time.
std::string trace_svg(const locomotion::SimTrace& trace,
                      std::string_view title);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace geogami::io
