#include "geogami/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "geogami/error.hpp"
#include "geogami/io.hpp"
#include "geogami/units.hpp"

#ifndef GEOGAMI_PRESET_DIR_DEFAULT
#define GEOGAMI_PRESET_DIR_DEFAULT "presets"
#endif

namespace geogami::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(Errc::config_error, fmt::format("{}: {}", where, what));
}

// Reads the members of one JSON object, rejecting unknown keys.
class Reader {
 public:
  Reader(const json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) bad(where_, "expected an object");
  }

  // Rejects keys that were never asked for.
  void done() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) bad(where_ + "." + key, "unknown field");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;  // keep default
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) bad(path(key), "expected a number");
        out = it->template get<T>();
        if (!std::isfinite(out)) bad(path(key), "must be finite");
      } else if constexpr (std::is_same_v<T, int>) {
        if (!it->is_number_integer()) bad(path(key), "expected an integer");
        out = it->template get<int>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) bad(path(key), "expected a boolean");
        out = it->template get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) bad(path(key), "expected a string");
        out = it->template get<std::string>();
      } else {
        out = it->template get<T>();
      }
    } catch (const json::exception& e) {
      bad(path(key), e.what());
    }
  }

  void get_quad(const std::string& key, std::array<double, 4>& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if (!it->is_array() || it->size() != 4) {
      bad(path(key), "expected an array of 4 numbers");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(*it)[i].is_number()) bad(path(key), "expected numbers");
      out[i] = (*it)[i].get<double>();
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json quad(const std::array<double, 4>& q) { return json::array({q[0], q[1], q[2], q[3]}); }

json damping_json(const DampingSpec& d) {
  return {{"natural_frequency_rad_s", d.natural_frequency_rad_s},
          {"damping_ratio", d.damping_ratio}};
}

void read_damping(const json* node, const std::string& where, DampingSpec& d) {
  if (!node) return;
  Reader r(*node, where);
  r.get("natural_frequency_rad_s", d.natural_frequency_rad_s);
  r.get("damping_ratio", d.damping_ratio);
  r.done();
}

std::array<double, 4> to_rad(const std::array<double, 4>& deg) {
  return {deg_to_rad(deg[0]), deg_to_rad(deg[1]), deg_to_rad(deg[2]),
          deg_to_rad(deg[3])};
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return schema_version == o.schema_version && name == o.name &&
         gearbox == o.gearbox && spindles == o.spindles &&
         mass_layout == o.mass_layout && sides == o.sides &&
         composition_law == o.composition_law && geometry == o.geometry &&
         program == o.program && output_dir == o.output_dir;
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;
  doc["name"] = cfg.name;
  const auto& g = cfg.gearbox;
  doc["gearbox"] = {{"worm_teeth", g.worm_teeth},
                    {"driver_teeth", g.driver_teeth},
                    {"driven_teeth", g.driven_teeth},
                    {"spool_radius_mm", g.spool_radius_mm},
                    {"sector_arc_deg", g.sector_arc_deg},
                    {"efficiency_worm", g.efficiency_worm},
                    {"efficiency_spur", g.efficiency_spur},
                    {"corner_count", g.corner_count},
                    {"first_corner", g.first_corner}};
  doc["spindles"] = {{"pyramid", quad(cfg.spindles.pyramid)},
                     {"spindle5", quad(cfg.spindles.spindle5)},
                     {"spindle10", quad(cfg.spindles.spindle10)}};
  const auto& m = cfg.mass_layout;
  doc["mass_layout"] = {{"central_mass_kg", m.central_mass_kg},
                        {"corner_mass_kg", quad(m.corner_mass_kg)},
                        {"ray_angle_deg", quad(m.ray_angle_deg)},
                        {"rest_radius_mm", quad(m.rest_radius_mm)}};
  json sides = json::array();
  for (const auto& s : cfg.sides) {
    json chain = json::array();
    for (const auto& c : s.origami) {
      json link;
      if (c.stiffness) link["stiffness"] = *c.stiffness;
      if (c.family) link["family"] = *c.family;
      if (c.model_file) link["model_file"] = *c.model_file;
      link["count"] = c.count;
      chain.push_back(std::move(link));
    }
    sides.push_back({{"origami", std::move(chain)},
                     {"skeleton_left", s.skeleton_left},
                     {"skeleton_right", s.skeleton_right},
                     {"cable_stiffness", s.cable_stiffness
                                             ? json(*s.cable_stiffness)
                                             : json(nullptr)},
                     {"routing_gain", s.routing_gain},
                     {"radial_factor", s.radial_factor}});
  }
  doc["sides"] = std::move(sides);
  doc["composition_law"] = cfg.composition_law;
  const auto& geo = cfg.geometry;
  doc["geometry"] = {{"support_radius_mm", geo.support_radius_mm},
                     {"contact_half_angle_deg", geo.contact_half_angle_deg},
                     {"contraction_per_rad_mm", geo.contraction_per_rad_mm},
                     {"initial_roll_deg", geo.initial_roll_deg},
                     {"return_model_family", geo.return_model_family}};
  const auto& p = cfg.program;
  doc["program"] = {{"mode", p.mode},
                    {"origami", p.origami},
                    {"motor_speed_rad_s", p.motor_speed_rad_s},
                    {"duration_s", p.duration_s},
                    {"time_step_s", p.time_step_s},
                    {"release_model", p.release_model},
                    {"max_retraction_mm", p.max_retraction_mm},
                    {"motor_torque_nm", p.motor_torque_nm},
                    {"cyclic_roll_deg", p.cyclic_roll_deg},
                    {"spindle_roll_deg", p.spindle_roll_deg},
                    {"with_origami", damping_json(p.with_origami)},
                    {"without_origami", damping_json(p.without_origami)},
                    {"allow_damping_override", p.allow_damping_override}};
  doc["output"] = {{"dir", cfg.output_dir}};
  return doc;
}

RunConfig from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  {
    Reader root(doc, "config");
    root.get("schema_version", cfg.schema_version);
    if (cfg.schema_version != kSchemaVersion) {
      bad("config.schema_version",
          fmt::format("unsupported version {} (expected {})",
                      cfg.schema_version, kSchemaVersion));
    }
    root.get("name", cfg.name);
    if (const json* node = root.child("gearbox")) {
      Reader r(*node, "config.gearbox");
      auto& g = cfg.gearbox;
      r.get("worm_teeth", g.worm_teeth);
      r.get("driver_teeth", g.driver_teeth);
      r.get("driven_teeth", g.driven_teeth);
      r.get("spool_radius_mm", g.spool_radius_mm);
      r.get("sector_arc_deg", g.sector_arc_deg);
      r.get("efficiency_worm", g.efficiency_worm);
      r.get("efficiency_spur", g.efficiency_spur);
      r.get("corner_count", g.corner_count);
      r.get("first_corner", g.first_corner);
      r.done();
    }
    if (const json* node = root.child("spindles")) {
      Reader r(*node, "config.spindles");
      r.get_quad("pyramid", cfg.spindles.pyramid);
      r.get_quad("spindle5", cfg.spindles.spindle5);
      r.get_quad("spindle10", cfg.spindles.spindle10);
      r.done();
    }
    if (const json* node = root.child("mass_layout")) {
      Reader r(*node, "config.mass_layout");
      auto& m = cfg.mass_layout;
      r.get("central_mass_kg", m.central_mass_kg);
      r.get_quad("corner_mass_kg", m.corner_mass_kg);
      r.get_quad("ray_angle_deg", m.ray_angle_deg);
      r.get_quad("rest_radius_mm", m.rest_radius_mm);
      r.done();
    }
    if (const json* node = root.child("sides")) {
      if (!node->is_array() || node->size() != 4) {
        bad("config.sides", "expected exactly 4 side entries");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        const std::string where = fmt::format("config.sides[{}]", i);
        Reader r((*node)[i], where);
        auto& s = cfg.sides[i];
        s.origami.clear();
        if (const json* chain = r.child("origami")) {
          if (!chain->is_array()) bad(where + ".origami", "expected an array");
          for (std::size_t j = 0; j < chain->size(); ++j) {
            const std::string lw = fmt::format("{}.origami[{}]", where, j);
            Reader lr((*chain)[j], lw);
            ChainSpec c;
            double stiffness = 0.0;
            std::string text;
            if (lr.child("stiffness")) {
              lr.get("stiffness", stiffness);
              c.stiffness = stiffness;
            }
            if (lr.child("family")) {
              lr.get("family", text);
              c.family = text;
            }
            if (lr.child("model_file")) {
              lr.get("model_file", text);
              c.model_file = text;
            }
            lr.get("count", c.count);
            lr.done();
            const int kinds = c.stiffness.has_value() + c.family.has_value() +
                              c.model_file.has_value();
            if (kinds != 1) {
              bad(lw, "needs exactly one of stiffness, family, model_file");
            }
            s.origami.push_back(std::move(c));
          }
        }
        r.get("skeleton_left", s.skeleton_left);
        r.get("skeleton_right", s.skeleton_right);
        if (const json* kc = r.child("cable_stiffness"); kc && !kc->is_null()) {
          if (!kc->is_number()) bad(where + ".cable_stiffness", "expected a number or null");
          s.cable_stiffness = kc->get<double>();
        }
        r.get("routing_gain", s.routing_gain);
        r.get("radial_factor", s.radial_factor);
        r.done();
      }
    }
    root.get("composition_law", cfg.composition_law);
    if (const json* node = root.child("geometry")) {
      Reader r(*node, "config.geometry");
      auto& g = cfg.geometry;
      r.get("support_radius_mm", g.support_radius_mm);
      r.get("contact_half_angle_deg", g.contact_half_angle_deg);
      r.get("contraction_per_rad_mm", g.contraction_per_rad_mm);
      r.get("initial_roll_deg", g.initial_roll_deg);
      r.get("return_model_family", g.return_model_family);
      r.done();
    }
    if (const json* node = root.child("program")) {
      Reader r(*node, "config.program");
      auto& p = cfg.program;
      r.get("mode", p.mode);
      r.get("origami", p.origami);
      r.get("motor_speed_rad_s", p.motor_speed_rad_s);
      r.get("duration_s", p.duration_s);
      r.get("time_step_s", p.time_step_s);
      r.get("release_model", p.release_model);
      r.get("max_retraction_mm", p.max_retraction_mm);
      r.get("motor_torque_nm", p.motor_torque_nm);
      r.get("cyclic_roll_deg", p.cyclic_roll_deg);
      r.get("spindle_roll_deg", p.spindle_roll_deg);
      read_damping(r.child("with_origami"), "config.program.with_origami",
                   p.with_origami);
      read_damping(r.child("without_origami"),
                   "config.program.without_origami", p.without_origami);
      r.get("allow_damping_override", p.allow_damping_override);
      r.done();
    }
    if (const json* node = root.child("output")) {
      Reader r(*node, "config.output");
      r.get("dir", cfg.output_dir);
      r.done();
    }
    root.done();
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error,
                fmt::format("cannot open config '{}'", path.string()));
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error,
                fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(doc, path.parent_path());
}

std::string dump_config(const RunConfig& cfg) {
  return to_json(cfg).dump(2) + "\n";
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("GEOGAMI_PRESET_DIR"); env && *env) {
    return env;
  }
  return GEOGAMI_PRESET_DIR_DEFAULT;
}

std::filesystem::path resolve_config(const std::string& path_or_preset) {
  const std::filesystem::path direct(path_or_preset);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto preset = preset_dir() / (path_or_preset + ".json");
  if (std::filesystem::is_regular_file(preset)) return preset;
  throw Error(Errc::io_error,
              fmt::format("no config file or preset named '{}' (preset dir {})",
                          path_or_preset, preset_dir().string()));
}

compliance::CompositionLaw composition_law(const RunConfig& cfg) {
  if (cfg.composition_law == "A") {
    return compliance::CompositionLaw::parallel_skeleton;
  }
  if (cfg.composition_law == "B") return compliance::CompositionLaw::all_series;
  bad("config.composition_law",
      fmt::format("expected \"A\" or \"B\", got \"{}\"", cfg.composition_law));
}

transmission::GearboxConfig gearbox_config(const RunConfig& cfg) {
  const auto& g = cfg.gearbox;
  transmission::GearboxConfig out;
  out.worm_teeth = g.worm_teeth;
  out.driver_teeth = g.driver_teeth;
  out.driven_teeth = g.driven_teeth;
  out.spool_radius_mm = g.spool_radius_mm;
  out.sector_arc_rad = deg_to_rad(g.sector_arc_deg);
  out.efficiency_worm = g.efficiency_worm;
  out.efficiency_spur = g.efficiency_spur;
  out.corner_count = g.corner_count;
  return out;
}

std::array<compliance::SideAssembly, 4> side_assemblies(const RunConfig& cfg,
                                                        bool origami) {
  std::array<compliance::SideAssembly, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& spec = cfg.sides[i];
    auto& side = out[i];
    side.skeleton_left = spec.skeleton_left;
    side.skeleton_right = spec.skeleton_right;
    side.cable_stiffness = spec.cable_stiffness.value_or(compliance::kRigidCable);
    side.routing_gain = spec.routing_gain;
    side.radial_factor = spec.radial_factor;
    side.rest_radius_mm = cfg.mass_layout.rest_radius_mm[i];
    if (!origami) continue;
    for (const auto& c : spec.origami) {
      compliance::ChainLink link;
      link.count = c.count;
      if (c.stiffness) {
        link.element = *c.stiffness;
      } else if (c.family) {
        link.element = compliance::default_joint_model(
            compliance::joint_family_from_string(*c.family));
      } else {
        link.element = io::load_joint_model(cfg.base_dir / *c.model_file);
      }
      side.origami_chain.push_back(std::move(link));
    }
  }
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.gearbox.corner_count != 4) {
    bad("config.gearbox.corner_count", "must be 4");
  }
  if (cfg.gearbox.first_corner < 1 || cfg.gearbox.first_corner > 4) {
    bad("config.gearbox.first_corner", "must be 1..4");
  }
  try {
    gearbox_config(cfg).validate();
  } catch (const Error& e) {
    bad("config.gearbox", e.what());
  }
  (void)composition_law(cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& c : cfg.sides[i].origami) {
      const std::string where = fmt::format("config.sides[{}].origami", i);
      if (c.count < 1) bad(where, "count must be >= 1");
      if (c.family) {
        try {
          (void)compliance::joint_family_from_string(*c.family);
        } catch (const Error& e) {
          bad(where, e.what());
        }
      }
      if (c.model_file &&
          !std::filesystem::is_regular_file(cfg.base_dir / *c.model_file)) {
        bad(where, fmt::format("model file '{}' does not exist",
                               (cfg.base_dir / *c.model_file).string()));
      }
    }
  }
  (void)compliance::joint_family_from_string(cfg.geometry.return_model_family);
  (void)locomotion::actuation_mode_from_string(cfg.program.mode);
  (void)locomotion::release_model_from_string(cfg.program.release_model);
  for (const auto* profile :
       {&cfg.spindles.pyramid, &cfg.spindles.spindle5, &cfg.spindles.spindle10}) {
    for (double v : *profile) {
      if (!(v >= 0.0)) bad("config.spindles", "multipliers must be >= 0");
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double u_max =
        cfg.program.max_retraction_mm / cfg.sides[i].routing_gain;
    if (!(u_max < cfg.mass_layout.rest_radius_mm[i])) {
      bad("config.program.max_retraction_mm",
          fmt::format("contraction limit {} mm inverts corner {}", u_max, i + 1));
    }
  }
  if (!(cfg.geometry.support_radius_mm > 0.0)) {
    bad("config.geometry.support_radius_mm", "must be positive");
  }
  // Remaining ranges are checked by the model/program validators.
  try {
    const auto sim = build_simulation(cfg);
    sim.model.validate();
    sim.program.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::config_error) throw;
    throw Error(Errc::config_error, e.what());
  }
}

Simulation build_simulation(const RunConfig& cfg,
                            std::optional<locomotion::ActuationMode> mode,
                            std::optional<bool> origami) {
  using locomotion::ActuationMode;
  const ActuationMode m =
      mode.value_or(locomotion::actuation_mode_from_string(cfg.program.mode));
  const bool cap = origami.value_or(cfg.program.origami);

  Simulation sim;
  auto& model = sim.model;
  model.gearbox = gearbox_config(cfg);
  const auto& ml = cfg.mass_layout;
  model.layout.central_mass_kg = ml.central_mass_kg;
  model.layout.corner_mass_kg = ml.corner_mass_kg;
  model.layout.ray_angle_rad = to_rad(ml.ray_angle_deg);
  model.layout.rest_radius_mm = ml.rest_radius_mm;
  model.sides = side_assemblies(cfg, cap);
  model.law = composition_law(cfg);
  model.contact_half_angle_rad = deg_to_rad(cfg.geometry.contact_half_angle_deg);
  model.contraction_per_rad_mm = cfg.geometry.contraction_per_rad_mm;
  model.return_model = compliance::default_joint_model(
      compliance::joint_family_from_string(cfg.geometry.return_model_family));

  auto& prog = sim.program;
  const auto& p = cfg.program;
  prog.motor_speed_rad_s = p.motor_speed_rad_s;
  prog.duration_s = p.duration_s;
  prog.time_step_s = p.time_step_s;
  prog.release = locomotion::release_model_from_string(p.release_model);
  prog.with_origami = {p.with_origami.natural_frequency_rad_s,
                       p.with_origami.damping_ratio};
  prog.without_origami = {p.without_origami.natural_frequency_rad_s,
                          p.without_origami.damping_ratio};
  prog.origami = cap;
  prog.allow_damping_override = p.allow_damping_override;
  prog.max_retraction_mm = p.max_retraction_mm;
  prog.motor_torque_nm = p.motor_torque_nm;
  switch (m) {
    case ActuationMode::cyclic:
      prog.schedule = transmission::EngagementSchedule::cyclic(
          model.gearbox, cfg.gearbox.first_corner);
      prog.roll_quantum_rad = deg_to_rad(p.cyclic_roll_deg);
      break;
    case ActuationMode::pyramid:
      prog.schedule =
          transmission::EngagementSchedule::fixed_spindle(cfg.spindles.pyramid);
      prog.roll_quantum_rad = deg_to_rad(p.spindle_roll_deg);
      break;
    case ActuationMode::spindle5:
      prog.schedule =
          transmission::EngagementSchedule::fixed_spindle(cfg.spindles.spindle5);
      prog.roll_quantum_rad = deg_to_rad(p.spindle_roll_deg);
      break;
    case ActuationMode::spindle10:
      prog.schedule = transmission::EngagementSchedule::fixed_spindle(
          cfg.spindles.spindle10);
      prog.roll_quantum_rad = deg_to_rad(p.spindle_roll_deg);
      break;
  }

  sim.initial.roll_angle_rad = deg_to_rad(cfg.geometry.initial_roll_deg);
  sim.initial.support_radius_mm = cfg.geometry.support_radius_mm;
  return sim;
}

}  // namespace geogami::config
