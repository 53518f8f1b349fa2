#include <gtest/gtest.h>

#include "dirdep/harness.hpp"

using namespace dirdep;

namespace {

ScenarioConfig small_scenario(const std::string& model, CalibrationMode mode, std::uint64_t N,
                              std::uint64_t B) {
  ScenarioConfig c{.label = model, .model = parse_model(model), .statistics = {}};
  c.n = 20;
  c.statistics = {StatisticSpec::parse("dcor:energy:0.5"), StatisticSpec::parse("dcor:log")};
  c.N = N;
  c.B = B;
  c.mode = mode;
  c.seed = 42;
  return c;
}

}  // namespace

TEST(RoundedPercent, HalfUpFromCounts) {
  EXPECT_EQ(rounded_percent(0, 500), 0u);
  EXPECT_EQ(rounded_percent(25, 500), 5u);
  EXPECT_EQ(rounded_percent(27, 500), 5u);   // 5.4
  EXPECT_EQ(rounded_percent(28, 500), 6u);   // 5.6
  EXPECT_EQ(rounded_percent(45, 2000), 2u);  // 2.25
  EXPECT_EQ(rounded_percent(50, 2000), 3u);  // 2.5 rounds up
  EXPECT_EQ(rounded_percent(500, 500), 100u);
}

TEST(PowerStudy, DeterministicAcrossJobCounts) {
  const auto c = small_scenario("BvM(1)", CalibrationMode::full_bootstrap, 60, 49);
  const auto a = run_power_study(c, 1), b = run_power_study(c, 4);
  EXPECT_EQ(emit_table(a, TableFormat::csv), emit_table(b, TableFormat::csv));
  const auto w = small_scenario("VMC(1)", CalibrationMode::warp_speed, 200, 0);
  EXPECT_EQ(emit_table(run_power_study(w, 1), TableFormat::csv),
            emit_table(run_power_study(w, 3), TableFormat::csv));
}

TEST(PowerStudy, SeedChangesResults) {
  auto c = small_scenario("BvM(1)", CalibrationMode::full_bootstrap, 60, 49);
  const auto a = run_power_study(c, 1);
  c.seed = 43;
  const auto b = run_power_study(c, 1);
  EXPECT_NE(emit_table(a, TableFormat::csv), emit_table(b, TableFormat::csv));
}

TEST(PowerStudy, ReplicateMatchesStandaloneTest) {
  // Replicate r is reproducible from the documented seed derivation alone.
  auto c = small_scenario("BvM(1)", CalibrationMode::full_bootstrap, 5, 99);
  c.statistics = {StatisticSpec::parse("dcor:energy:1")};
  const auto table = run_power_study(c, 1);
  std::uint64_t rejections = 0;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const auto rs = derive_seed(c.seed, r);
    SampleEngine eng(derive_seed(rs, 0));
    const auto s = sample_joint(c.model, c.n, eng);
    const auto res = test_independence(c.statistics[0], s.x, s.y, c.B, derive_seed(rs, 1));
    if (res.p_value <= c.alpha) ++rejections;
  }
  EXPECT_EQ(table.rows[0].rejections, rejections);
}

TEST(PowerStudy, WarpSpeedAgreesWithFullBootstrap) {
  auto full = small_scenario("VMC(1)", CalibrationMode::full_bootstrap, 2000, 200);
  full.n = 50;
  full.statistics = {StatisticSpec::parse("dcor:energy:0.25")};
  auto warp = full;
  warp.mode = CalibrationMode::warp_speed;
  const double a = run_power_study(full, 1).rows[0].rate();
  const double b = run_power_study(warp, 1).rows[0].rate();
  EXPECT_NEAR(a, b, 0.04);
}

TEST(PowerStudy, SizeUnderIndependence) {
  auto c = small_scenario("product(VM(0,1),VM(pi,0.1))", CalibrationMode::full_bootstrap, 600, 99);
  const auto t = run_power_study(c, 1);
  for (const auto& r : t.rows) {
    EXPECT_GE(r.rate(), 0.025) << r.label;
    EXPECT_LE(r.rate(), 0.08) << r.label;
  }
}

TEST(PowerStudy, IncompatibleStatisticRejected) {
  auto c = small_scenario("VMC(1)", CalibrationMode::full_bootstrap, 10, 9);
  c.statistics = {StatisticSpec::ccor()};
  EXPECT_THROW(run_power_study(c, 1), ConfigError);
}

TEST(EmitTable, CsvRoundTrip) {
  auto c = small_scenario("Mix(VM(0,1),VM(pi,0.1),0.5)", CalibrationMode::full_bootstrap, 40, 19);
  c.label = "label, with \"quotes\"";
  const auto t = run_power_study(c, 1);
  const auto csv = emit_table(t, TableFormat::csv);
  const auto back = read_power_csv(csv);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i], t.rows[i]);
    EXPECT_EQ(back.rows[i].rate(), t.rows[i].rate());
  }
  EXPECT_EQ(emit_table(back, TableFormat::csv), csv);
}

TEST(EmitTable, TextPivotsScenariosAgainstStatistics) {
  PowerTable t;
  for (const char* s : {"A", "B"}) {
    for (const char* l : {"D1", "Dk"}) {
      PowerRow r;
      r.scenario = s;
      r.label = l;
      r.statistic = l;
      r.n = 20;
      r.N = 500;
      r.rejections = 28;
      t.rows.push_back(r);
    }
  }
  const auto text = emit_table(t, TableFormat::text);
  EXPECT_NE(text.find("D1"), std::string::npos);
  EXPECT_NE(text.find("A "), std::string::npos);
  EXPECT_NE(text.find("    6"), std::string::npos);
  EXPECT_THROW(emit_table(PowerTable{}, TableFormat::text), ConfigError);
}

TEST(StudyConfig, DefaultsOverridesAndDerivedSeeds) {
  const auto doc = nlohmann::json::parse(R"j({
    "name": "t", "n": 30, "N": 100, "B": 50, "seed": 9, "statistics": ["dcor:energy:1"],
    "scenarios": [
      {"model": "BvM(1)"},
      {"label": "second", "model": "PB(0.5)", "n": 40, "seed": 5, "mode": "warp_speed",
       "statistics": ["ccor", "trig:1"]}
    ]})j");
  const auto s = parse_study(doc);
  ASSERT_EQ(s.scenarios.size(), 2u);
  EXPECT_EQ(s.scenarios[0].label, "BvM(1)");
  EXPECT_EQ(s.scenarios[0].n, 30u);
  EXPECT_EQ(s.scenarios[0].seed, derive_seed(9, 0));
  EXPECT_EQ(s.scenarios[1].n, 40u);
  EXPECT_EQ(s.scenarios[1].seed, 5u);
  EXPECT_EQ(s.scenarios[1].mode, CalibrationMode::warp_speed);
  EXPECT_EQ(s.scenarios[1].statistics.size(), 2u);
}

TEST(StudyConfig, SchemaViolationsNameTheField) {
  auto expect_field = [](const char* text, const char* field) {
    try {
      parse_study(nlohmann::json::parse(text));
      ADD_FAILURE() << "accepted " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_field(R"j({"statistics":["dcor"],"scenarios":[{"model":"BvM(1)","nn":3}]})j", "scenarios[0].nn");
  expect_field(R"j({"statistics":["dcor"],"scenarios":[{"model":"BvM(1)","n":"x"}]})j", "scenarios[0].n");
  expect_field(R"j({"statistics":["dcor"],"scenarios":[{"model":"Nope(1)"}]})j", "scenarios[0].model");
  expect_field(R"j({"statistics":["dcor"],"scenarios":[{"label":"x"}]})j", "scenarios[0].model");
  expect_field(R"j({"statistics":["dcor"],"scenarios":[]})j", "scenarios");
  expect_field(R"j({"statistics":["dcor"],"mode":"fast","scenarios":[{"model":"BvM(1)"}]})j", "mode");
  expect_field(R"j({"statistics":["bogus"],"scenarios":[{"model":"BvM(1)"}]})j", "statistics");
  expect_field(R"j({"statistics":["dcor"],"extra":1,"scenarios":[{"model":"BvM(1)"}]})j", "extra");
  expect_field(R"j({"statistics":["dcor"],"alpha":2,"scenarios":[{"model":"BvM(1)"}]})j", "alpha");
}

TEST(StudyConfig, MissingFileIsConfigError) {
  EXPECT_THROW(load_study("/nonexistent/study.cfg"), ConfigError);
}
