#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "billiards/config.hpp"
#include "billiards/io.hpp"
#include "test_support.hpp"

using namespace billiards;
using namespace billiards::testing;

namespace {

BilliardError::Code code_of(const json& j) {
  try {
    table_from_json(j);
  } catch (const BilliardError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << j.dump();
  return BilliardError::Code::unsupported;
}

}  // namespace

TEST(Config, PresetReference) {
  for (const auto& name : all_presets()) {
    const Table a = table_from_json({{"preset", name}});
    EXPECT_EQ(to_json(a), to_json(make_preset(name))) << name;
  }
  const Table capped = table_from_json({{"preset", "disk"}, {"tolerances", {{"l_max", 7.5}}}});
  EXPECT_EQ(capped.l_max(), 7.5);
}

TEST(Config, RoundTripThroughFullSchema) {
  for (const auto& name : all_presets()) {
    const json j = to_json(make_preset(name));
    EXPECT_EQ(to_json(table_from_json(j)), j) << name;
  }
}

TEST(Config, EllipseShorthand) {
  const Table t = table_from_json(json::parse(R"({
    "name": "ellipse", "space": "euclidean", "dimension": 2,
    "pieces": [{"shape": "ellipse", "semi_axes": [1.2, 0.8]}]})"));
  EXPECT_EQ(to_json(t), to_json(make_preset("ellipse")));
}

TEST(Config, Errors) {
  const json base = json::parse(R"({"space": "euclidean", "dimension": 2,
                                    "pieces": [{"shape": "ball", "center": [0, 0], "radius": 1}]})");
  EXPECT_NO_THROW(table_from_json(base));
  auto with = [&](const std::string& ptr, const json& v) {
    json j = base;
    j[json::json_pointer(ptr)] = v;
    return j;
  };
  EXPECT_EQ(code_of(with("/colour", "red")), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/dimension", 4)), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/space", "lorentzian")), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/pieces/0/side", "inside")), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/pieces/0/shape", "cube")), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/pieces/0/radius", "one")), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(with("/tolerances", json{{"hit_tol", -1.0}})), BilliardError::Code::invalid_table);
  EXPECT_EQ(code_of(json{{"preset", "square"}}), BilliardError::Code::invalid_argument);
  EXPECT_EQ(code_of(json::array()), BilliardError::Code::invalid_argument);
  json overlap = base;
  overlap["pieces"].push_back({{"shape", "ball"}, {"side", "obstacle"}, {"center", {0.8, 0}}, {"radius", 0.5}});
  EXPECT_EQ(code_of(overlap), BilliardError::Code::invalid_table);
}

TEST(Config, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "billiards_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "good.json") << "// comments are allowed\n{\"preset\": \"torus-two-balls\"}\n";
    std::ofstream(dir / "bad.json") << "{\"preset\": ";
  }
  EXPECT_EQ(load_table_config((dir / "good.json").string()).name(), "torus-two-balls");
  EXPECT_THROW(load_table_config((dir / "bad.json").string()), BilliardError);
  EXPECT_THROW(load_table_config((dir / "missing.json").string()), BilliardError);
  for (const auto& e : std::filesystem::directory_iterator(BILLIARDS_SOURCE_DIR "/demos/configs")) {
    EXPECT_NO_THROW(load_table_config(e.path().string())) << e.path();
  }
}

TEST(Io, ChordAndReportSerialization) {
  const Table disk = make_preset("disk");
  const auto c = causality_map(disk, {{1, 0}, {-1, 0}});
  const json j = to_json(disk.space(), *c);
  EXPECT_NEAR(j["length"].get<double>(), 2.0, 1e-15);
  EXPECT_EQ(j["exit"]["q"].size(), 2u);
  EXPECT_EQ(j["entry_stratum"], "transversal_in");
  const json m = to_json(mean_free_path(disk, 1000, 1, 1));
  EXPECT_TRUE(m.contains("prediction"));
  EXPECT_TRUE(m["space"]["estimate"].contains("stderr"));
}
