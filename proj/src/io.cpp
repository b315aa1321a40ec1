#include "geogami/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "geogami/error.hpp"
#include "geogami/units.hpp"

namespace geogami::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<double> coeffs_from(const json& node, std::string_view what) {
  if (!node.is_array() || node.empty()) {
    throw Error(Errc::parse_error,
                fmt::format("joint model: '{}' must be a non-empty array", what));
  }
  std::vector<double> out;
  for (const auto& v : node) {
    if (!v.is_number()) {
      throw Error(Errc::parse_error,
                  fmt::format("joint model: '{}' must hold numbers", what));
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

compliance::JointMeasurementSet parse_measurement_csv(
    std::istream& in, compliance::JointFamily family) {
  compliance::JointMeasurementSet set;
  set.family = family;
  std::string line;
  bool header_seen = false;
  int row = 0;
  while (std::getline(in, line)) {
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (!set.metadata.empty()) set.metadata += '\n';
      set.metadata += std::string(trim(text.substr(1)));
      continue;
    }
    if (!header_seen) {
      if (text != kMeasurementHeader) {
        throw Error(Errc::parse_error,
                    fmt::format("expected header '{}', got '{}'",
                                kMeasurementHeader, text));
      }
      header_seen = true;
      continue;
    }
    ++row;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      fields.push_back(text.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    double theta_deg = 0.0, force = 0.0, ret_deg = 0.0;
    if (fields.size() != 3 || !parse_double(fields[0], theta_deg) ||
        !parse_double(fields[1], force) || !parse_double(fields[2], ret_deg)) {
      throw Error(Errc::parse_error,
                  fmt::format("malformed row {}: '{}'", row, text));
    }
    set.samples.push_back(
        {deg_to_rad(theta_deg), force, deg_to_rad(ret_deg)});
  }
  if (set.samples.empty()) {
    throw Error(Errc::underdetermined_fit, "no samples");
  }
  return set;
}

compliance::JointMeasurementSet read_measurement_csv(
    const std::filesystem::path& path, compliance::JointFamily family) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error,
                fmt::format("cannot open measurement file '{}'", path.string()));
  }
  return parse_measurement_csv(in, family);
}

json joint_model_to_json(const compliance::JointFit& fit) {
  const auto& m = fit.model;
  return {{"schema", "geogami-joint-model/1"},
          {"family", std::string(compliance::to_string(m.family))},
          {"force_coeffs", m.force.coeffs()},
          {"return_coeffs", m.return_angle.coeffs()},
          {"valid_range_rad", {m.theta_min, m.theta_max}},
          {"mean_stiffness_N_per_rad", m.mean_stiffness},
          {"metadata", m.metadata},
          {"residuals", {{"force_rms_N", fit.force_rms},
                         {"return_rms_rad", fit.return_rms}}}};
}

compliance::JointModel joint_model_from_json(const json& doc) {
  try {
    if (doc.value("schema", "") != "geogami-joint-model/1") {
      throw Error(Errc::parse_error, "joint model: unsupported schema");
    }
    compliance::JointModel m;
    m.family = compliance::joint_family_from_string(
        doc.at("family").get<std::string>());
    m.force = compliance::Polynomial(coeffs_from(doc.at("force_coeffs"), "force_coeffs"));
    m.return_angle = compliance::Polynomial(
        coeffs_from(doc.at("return_coeffs"), "return_coeffs"));
    const auto& range = doc.at("valid_range_rad");
    m.theta_min = range.at(0).get<double>();
    m.theta_max = range.at(1).get<double>();
    m.mean_stiffness =
        compliance::mean_stiffness(m.force, m.theta_min, m.theta_max);
    m.metadata = doc.value("metadata", "");
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, fmt::format("joint model: {}", e.what()));
  }
}

compliance::JointModel load_joint_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error,
                fmt::format("cannot open joint model '{}'", path.string()));
  }
  try {
    return joint_model_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error,
                fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string trace_csv(const locomotion::SimTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace.records) {
    out += fmt::format("{},{},{},{},{}", num(r.time_s), num(r.motor_angle_rad),
                       num(r.roll_angle_rad), num(r.com_mm.x()),
                       num(r.com_mm.y()));
    for (double l : r.retraction_mm) out += "," + num(l);
    for (double t : r.tension_n) out += "," + num(t);
    out += ',';
    if (r.event) out += locomotion::to_string(*r.event);
    out += '\n';
  }
  return out;
}

std::string trace_svg(const locomotion::SimTrace& trace,
                      std::string_view title) {
  constexpr double kWidth = 800.0, kHeight = 600.0;
  constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kGap = 60.0;
  constexpr double kPanel = (kHeight - kTop - kGap - 40.0) / 2.0;

  double t_min = 0.0, t_max = 1.0;
  if (!trace.records.empty()) {
    t_min = trace.records.front().time_s;
    t_max = std::max(trace.records.back().time_s, t_min + 1e-9);
  }

  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
  };
  Series phi{"roll angle phi [deg]", {}};
  Series motor{"motor angle theta_m [rad]", {}};
  for (const auto& r : trace.records) {
    phi.points.emplace_back(r.time_s, rad_to_deg(r.roll_angle_rad));
    motor.points.emplace_back(r.time_s, r.motor_angle_rad);
  }

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" "
      "width=\"{}\" height=\"{}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
      "text-anchor=\"middle\">{}</text>\n",
      kWidth, kHeight, kWidth, kHeight, kWidth / 2.0, title);

  const auto panel = [&](const Series& s, double top, const char* colour) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [t, v] : s.points) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) {
      lo = (std::isfinite(lo) ? lo : 0.0) - 1.0;
      hi = lo + 2.0;
    }
    const double w = kWidth - kLeft - kRight;
    const auto px = [&](double t) {
      return kLeft + (t - t_min) / (t_max - t_min) * w;
    };
    const auto py = [&](double v) {
      return top + kPanel - (v - lo) / (hi - lo) * kPanel;
    };
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
        "stroke=\"black\"/>\n",
        kLeft, top, w, kPanel);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
        "text-anchor=\"end\">{:.4g}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
        "text-anchor=\"end\">{:.4g}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"13\">{}</text>\n",
        kLeft - 6, top + 12, hi, kLeft - 6, top + kPanel, lo, kLeft,
        top - 6, s.label);
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" "
                       "stroke-width=\"1.5\" points=\"",
                       colour);
    for (const auto& [t, v] : s.points) {
      svg += fmt::format("{:.2f},{:.2f} ", px(t), py(v));
    }
    svg += "\"/>\n";
  };
  panel(phi, kTop + 20.0, "#1f77b4");
  panel(motor, kTop + 20.0 + kPanel + kGap, "#d62728");
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
      "text-anchor=\"middle\">time [s] ({:.4g} to {:.4g})</text>\n</svg>\n",
      kLeft + (kWidth - kLeft - kRight) / 2.0, kHeight - 12.0, t_min, t_max);
  return svg;
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::io_error,
                  fmt::format("cannot write '{}'", tmp.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(Errc::io_error,
                  fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(Errc::io_error, fmt::format("cannot rename '{}' to '{}': {}",
                                            tmp.string(), path.string(),
                                            ec.message()));
  }
}

}  // namespace geogami::io
