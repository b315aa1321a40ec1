#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "geogami/config.hpp"
#include "geogami/error.hpp"
#include "geogami/io.hpp"
#include "support.hpp"

using namespace geogami;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_error_of(const json& doc) {
  try {
    config::from_json(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config_error);
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, PresetsLoadAndValidate) {
  for (const char* name : {"paper-table1", "symmetric-test"}) {
    const auto cfg = geogami::testing::preset(name);
    EXPECT_EQ(cfg.name, name);
    EXPECT_NO_THROW(config::validate(cfg)) << name;
  }
}

TEST(Config, Table1Values) {
  const auto cfg = geogami::testing::preset("paper-table1");
  EXPECT_EQ(cfg.gearbox.worm_teeth, 43);
  EXPECT_EQ(cfg.gearbox.driver_teeth, 5);
  EXPECT_EQ(cfg.gearbox.driven_teeth, 10);
  EXPECT_DOUBLE_EQ(cfg.gearbox.spool_radius_mm, 8.0);
  EXPECT_DOUBLE_EQ(cfg.program.max_retraction_mm, 25.1);
  EXPECT_DOUBLE_EQ(*cfg.sides[0].origami[0].stiffness, 0.096);
  EXPECT_DOUBLE_EQ(cfg.sides[2].skeleton_left, 0.6);
  EXPECT_EQ(cfg.composition_law, "B");
  const auto sim = config::build_simulation(cfg);
  EXPECT_NEAR(sim.model.gearbox.sector_arc_rad, kTwoPi, 1e-15);
  EXPECT_NEAR(sim.program.roll_quantum_rad, kPi / 2.0, 1e-15);
}

TEST(Config, RoundTrip) {
  for (const char* name : {"paper-table1", "symmetric-test"}) {
    const auto cfg = geogami::testing::preset(name);
    const auto again = config::from_json(json::parse(config::dump_config(cfg)));
    EXPECT_EQ(cfg, again);
    EXPECT_EQ(config::dump_config(cfg), config::dump_config(again));
  }
  const config::RunConfig defaults;
  EXPECT_EQ(config::from_json(config::to_json(defaults)), defaults);
}

TEST(Config, RejectsUnknownField) {
  auto doc = config::to_json(geogami::testing::preset("paper-table1"));
  doc["gearbox"]["worm_teth"] = 40;
  EXPECT_NE(config_error_of(doc).find("gearbox.worm_teth"), std::string::npos);
}

TEST(Config, RejectsWrongType) {
  auto doc = config::to_json(config::RunConfig{});
  doc["program"]["duration_s"] = "long";
  EXPECT_NE(config_error_of(doc).find("duration_s"), std::string::npos);
  doc = config::to_json(config::RunConfig{});
  doc["gearbox"]["worm_teeth"] = 4.5;
  EXPECT_NE(config_error_of(doc).find("worm_teeth"), std::string::npos);
}

TEST(Config, RejectsSchemaVersion) {
  auto doc = config::to_json(config::RunConfig{});
  doc["schema_version"] = 2;
  EXPECT_FALSE(config_error_of(doc).empty());
}

TEST(Config, CrossFieldValidation) {
  auto cfg = geogami::testing::preset("paper-table1");
  cfg.gearbox.corner_count = 3;
  EXPECT_THROW(config::validate(cfg), Error);

  cfg = geogami::testing::preset("paper-table1");
  cfg.sides[1].origami[0].model_file = "missing.json";
  cfg.sides[1].origami[0].stiffness.reset();
  EXPECT_THROW(config::validate(cfg), Error);

  cfg = geogami::testing::preset("paper-table1");
  cfg.composition_law = "C";
  EXPECT_THROW(config::validate(cfg), Error);

  cfg = geogami::testing::preset("paper-table1");
  cfg.program.max_retraction_mm = 100.0;
  EXPECT_THROW(config::validate(cfg), Error);

  cfg = geogami::testing::preset("paper-table1");
  cfg.program.with_origami.damping_ratio = 0.05;
  EXPECT_THROW(config::validate(cfg), Error);
  cfg.program.allow_damping_override = true;
  EXPECT_NO_THROW(config::validate(cfg));
}

TEST(Config, ChainEntryNeedsExactlyOneSource) {
  auto doc = config::to_json(geogami::testing::preset("paper-table1"));
  doc["sides"][0]["origami"][0]["family"] = "folding_24mm";
  EXPECT_FALSE(config_error_of(doc).empty());
  doc["sides"][0]["origami"][0] = {{"count", 1}};
  EXPECT_FALSE(config_error_of(doc).empty());
}

TEST(Config, LawSelection) {
  auto cfg = geogami::testing::preset("paper-table1");
  EXPECT_EQ(config::composition_law(cfg), compliance::CompositionLaw::all_series);
  cfg.composition_law = "A";
  EXPECT_EQ(config::composition_law(cfg),
            compliance::CompositionLaw::parallel_skeleton);
}

TEST(Config, OrigamiOffDropsChains) {
  const auto cfg = geogami::testing::preset("paper-table1");
  for (const auto& side : config::side_assemblies(cfg, false)) {
    EXPECT_TRUE(side.origami_chain.empty());
  }
  for (const auto& side : config::side_assemblies(cfg, true)) {
    EXPECT_EQ(side.origami_chain.size(), 1u);
  }
}

TEST(Config, ModelFileResolvesRelativeToConfig) {
  const fs::path dir = fs::temp_directory_path() / "geogami_cfg_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  compliance::JointFit fit;
  fit.model = compliance::default_joint_model(compliance::JointFamily::folding_24mm);
  {
    std::ofstream(dir / "joint.json") << io::joint_model_to_json(fit).dump();
  }
  auto cfg = geogami::testing::preset("paper-table1");
  for (auto& s : cfg.sides) {
    s.origami = {config::ChainSpec{std::nullopt, std::nullopt, "joint.json", 1}};
  }
  {
    std::ofstream(dir / "run.json") << config::dump_config(cfg);
  }
  const auto loaded = config::load_config(dir / "run.json");
  EXPECT_NO_THROW(config::validate(loaded));
  const auto sides = config::side_assemblies(loaded, true);
  EXPECT_NEAR(compliance::origami_stiffness(sides[0]).value(), 0.52, 1e-12);
  fs::remove_all(dir);
}

TEST(Config, PresetResolution) {
  EXPECT_EQ(config::resolve_config("paper-table1").filename(), "paper-table1.json");
  EXPECT_THROW(config::resolve_config("no-such-preset"), Error);
  const auto direct =
      geogami::testing::source_dir() / "presets" / "symmetric-test.json";
  EXPECT_EQ(config::resolve_config(direct.string()), direct);
}

TEST(Config, MalformedJsonFile) {
  const fs::path f = fs::temp_directory_path() / "geogami_bad.json";
  { std::ofstream(f) << "{ not json"; }
  try {
    config::load_config(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
  }
  fs::remove(f);
}
