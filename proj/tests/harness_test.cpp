#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "molsmooth/error.hpp"
#include "molsmooth/harness.hpp"
#include "molsmooth/render.hpp"
#include "molsmooth/smoothing.hpp"
#include "support.hpp"

using namespace molsmooth;
using testing_support::small_config;
using testing_support::TempDir;

namespace fs = std::filesystem;

TEST(ConditionMatrix, CoversEveryCellOnce) {
  const ExperimentConfig config;
  for (std::uint64_t seed : {0ull, 1ull, 20220601ull}) {
    const auto conds = condition_matrix(seed, config);
    ASSERT_EQ(conds.size(), 10u);
    std::set<std::pair<int, int>> cells;
    for (const StimulusCondition& c : conds) {
      cells.insert({static_cast<int>(c.gms), c.vms_trail});
      EXPECT_GE(c.speed_level, 1);
      EXPECT_LE(c.speed_level, 4);
      EXPECT_GE(c.reaction.t_start, 5.0);
      EXPECT_LE(c.reaction.t_start, 10.0);
      // Reaction starts on a render frame.
      EXPECT_DOUBLE_EQ(c.reaction.t_start * 120, std::round(c.reaction.t_start * 120));
      EXPECT_EQ(c.reaction.duration(), 11.0);
    }
    EXPECT_EQ(cells.size(), 10u);
  }
}

TEST(ConditionMatrix, DeterministicAndSeedDependent) {
  const ExperimentConfig config;
  const auto a = condition_matrix(77, config);
  const auto b = condition_matrix(77, config);
  const auto c = condition_matrix(78, config);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name(), b[i].name());
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].reaction.t_start, b[i].reaction.t_start);
    EXPECT_EQ(a[i].reaction.target, b[i].reaction.target);
    differs |= a[i].name() != c[i].name();
  }
  EXPECT_TRUE(differs);
}

TEST(ConditionMatrix, SpeedLevelsUniform) {
  ExperimentConfig config;
  config.scene.molecule_count = 16;
  std::map<int, int> counts;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    for (const StimulusCondition& c : condition_matrix(seed * 2654435761ull, config)) {
      ++counts[c.speed_level];
      ++total;
    }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [level, n] : counts) EXPECT_NEAR(static_cast<double>(n) / total, 0.25, 0.03) << level;
}

TEST(ConditionMatrix, Names) {
  StimulusCondition c;
  c.gms = GmsLevel::on;
  c.vms_trail = 2;
  c.speed_level = 3;
  EXPECT_EQ(c.name(), "gms1_trail2_speed3");
}

TEST(SpeedModel, PublishedFits) {
  const SpeedModel base = speed_model(SpeedMode::baseline);
  const SpeedModel gms = speed_model(SpeedMode::gms);
  const SpeedModel vms = speed_model(SpeedMode::vms_trail2);
  EXPECT_NEAR(estimated_speed(0, base), 30.4, 1e-12);
  EXPECT_NEAR(estimated_speed(50, base), 60.4, 1e-12);
  EXPECT_NEAR(estimated_speed(100, base), 90.4, 1e-12);
  EXPECT_NEAR(estimated_speed(100, gms), 79.3, 1e-12);
  EXPECT_NEAR(estimated_speed(0, gms), 19.3, 1e-12);
  EXPECT_NEAR(estimated_speed(50, vms), 49.8, 1e-12);
  EXPECT_NEAR(estimated_speed(100, vms), 69.8, 1e-12);
  EXPECT_THROW(estimated_speed(-0.1, base), InvalidInput);
  EXPECT_THROW(estimated_speed(100.5, base), InvalidInput);
  EXPECT_THROW(estimated_speed(std::nan(""), base), InvalidInput);
}

TEST(SpeedModel, CompensationIdentity) {
  EXPECT_DOUBLE_EQ(compensate_speed(0), 1.5);
  EXPECT_DOUBLE_EQ(compensate_speed(99), 150.0);
  EXPECT_NEAR(compensate_speed(99) / 99, 1.515, 1e-3);
  const SpeedModel base = speed_model(SpeedMode::baseline);
  const SpeedModel vms = speed_model(SpeedMode::vms_trail2);
  for (int k = 0; k <= 1000; ++k) {
    const double s = k / 10.0;
    EXPECT_NEAR(vms.extrapolate(compensate_speed(s)), estimated_speed(s, base), 1e-9) << s;
  }
  EXPECT_THROW(compensate_speed(101), InvalidInput);
}

TEST(SpeedModel, ModeNamesAndRecommendation) {
  EXPECT_EQ(parse_speed_mode("vms2"), SpeedMode::vms_trail2);
  EXPECT_EQ(parse_speed_mode("gms"), SpeedMode::gms);
  EXPECT_THROW(parse_speed_mode("fast"), InvalidInput);
  EXPECT_EQ(speed_percent(1, 4), 0.0);
  EXPECT_EQ(speed_percent(4, 4), 100.0);
  EXPECT_NEAR(speed_percent(2, 4), 100.0 / 3, 1e-12);
  const Recommendation slow = recommend(10), fast = recommend(80);
  EXPECT_EQ(slow.trail_length, 2);
  EXPECT_EQ(slow.gms, GmsLevel::off);
  EXPECT_EQ(fast.gms, GmsLevel::on);
  EXPECT_DOUBLE_EQ(fast.compensated_speed, 121.5);
}

TEST(Calibration, WindowShrinksWithSpeed) {
  ExperimentConfig config;
  config.scene.molecule_count = 300;
  const Calibration slow = calibrate(config, 1, 0.0, 5);
  const Calibration fast = calibrate(config, 4, 0.0, 5);
  ASSERT_EQ(slow.windows.size(), 5u);
  EXPECT_EQ(slow.windows[0], (std::pair<int, int>{0, 1}));
  for (std::size_t k = 1; k < 5; ++k) EXPECT_GT(slow.windows[k].second, fast.windows[k].second);
  EXPECT_GT(calibrate(config, 2, 0.0, 5).mean_displacement,
            calibrate(config, 2, 1.0, 5).mean_displacement);
  EXPECT_THROW(calibrate(config, 5, 0.0, 5), InvalidInput);
}

TEST(Manifest, JsonRoundTrip) {
  const ExperimentConfig config = small_config();
  const auto conds = condition_matrix(4, config);
  StimulusManifest m = plan_stimulus(config, conds[3]);
  m.frame_hashes = {"00000000000000ff", "0123456789abcdef"};
  const nlohmann::json j = m;
  EXPECT_EQ(j.at("schema"), kManifestSchema);
  const StimulusManifest back = j.get<StimulusManifest>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.condition.seed, conds[3].seed);
  EXPECT_EQ(back.condition.reaction.target, conds[3].reaction.target);
  nlohmann::json wrong = j;
  wrong["schema"] = "other/9";
  EXPECT_THROW(wrong.get<StimulusManifest>(), ConfigError);
}

TEST(Plan, PhasesAndCalibration) {
  const ExperimentConfig config;
  const auto conds = condition_matrix(20220601, config);
  for (const StimulusCondition& c : conds) {
    const StimulusManifest m = plan_stimulus(config, c);
    EXPECT_EQ(m.render_frames, 2400u);
    EXPECT_EQ(m.render_phases.bond_start - m.render_phases.attract_start, 600);
    EXPECT_EQ(m.render_phases.bond_end - m.render_phases.bond_start, 120);
    EXPECT_EQ(m.render_phases.repulse_end - m.render_phases.bond_end, 600);
    EXPECT_EQ(m.output_phases.bond_end - m.output_phases.bond_start, 30);
    EXPECT_NE(m.color_a, m.color_b);
    EXPECT_TRUE(m.reactants_in_view) << m.name;
    EXPECT_EQ(m.n_window % 2, 1);
    EXPECT_EQ(m.n_window == 1, c.vms_trail == 0);
  }
}

TEST(Generate, TrailZeroEqualsUnblurredComposite) {
  const ExperimentConfig config = small_config();
  auto conds = condition_matrix(31, config);
  StimulusCondition c = conds[0];
  c.gms = GmsLevel::off;
  c.vms_trail = 0;
  TempDir tmp("gen0");
  GenerateOptions opt;
  opt.threads = 1;
  const StimulusManifest m = generate_stimulus(config, c, tmp.path(), opt);
  ASSERT_EQ(m.frame_hashes.size(), 60u);
  const auto files = list_frames(tmp.path());
  ASSERT_EQ(files.size(), 60u);
  ASSERT_TRUE(fs::exists(tmp.path() / "manifest.json"));

  const StimulusScene scene = stimulus_scene(config, c);
  const Renderer r(scene.population, Camera(scene.population.box, 160, 90), config.render.shading);
  for (std::size_t k = 0; k < files.size(); k += 7) {
    const auto pos = molecule_positions(scene.population, scene.context, c.reaction, 4 * k / 120.0);
    const Image8 expect = to_srgb8(screen_blend(r.render(pos, RenderLayer::context_with_focus_mask),
                                                r.render(pos, RenderLayer::focus_only)));
    const Image8 got = read_image(files[k]);
    ASSERT_EQ(got.bytes, expect.bytes) << k;
    EXPECT_EQ(m.frame_hashes[k], hash_hex(hash_image(expect)));
  }
}

TEST(Generate, ReproducibleFromManifestAcrossThreadCounts) {
  const ExperimentConfig config = small_config();
  const auto conds = condition_matrix(32, config);
  StimulusCondition c = conds[0];
  c.vms_trail = 3;
  TempDir tmp("gen3");
  GenerateOptions opt;
  opt.threads = 3;
  opt.write_layers = true;
  const StimulusManifest m = generate_stimulus(config, c, tmp.path(), opt);
  EXPECT_GT(m.n_window, 1);
  EXPECT_EQ(list_frames(tmp.path() / "layers" / "context").size(), 240u);
  EXPECT_EQ(list_frames(tmp.path() / "layers" / "focus").size(), 240u);

  const StimulusManifest loaded = read_json(tmp.path() / "manifest.json").get<StimulusManifest>();
  EXPECT_EQ(loaded.frame_hashes, m.frame_hashes);
  EXPECT_TRUE(verify_manifest(loaded, 1).empty());
  EXPECT_TRUE(verify_manifest(loaded, 2).empty());

  StimulusManifest tampered = loaded;
  tampered.frame_hashes[5] = "0000000000000000";
  EXPECT_EQ(verify_manifest(tampered, 1), std::vector<std::size_t>{5});
}

TEST(Generate, BlurWidensMovingContext) {
  const ExperimentConfig config = small_config();
  auto conds = condition_matrix(33, config);
  StimulusCondition sharp = conds[0];
  sharp.gms = GmsLevel::off;
  sharp.speed_level = 4;
  sharp.vms_trail = 0;
  StimulusCondition blurred = sharp;
  blurred.vms_trail = 4;
  GenerateOptions opt;
  opt.threads = 1;
  opt.write_frames = false;
  TempDir tmp("blur");
  const auto a = generate_stimulus(config, sharp, tmp.path() / "a", opt);
  const auto b = generate_stimulus(config, blurred, tmp.path() / "b", opt);
  std::size_t same = 0;
  for (std::size_t k = 0; k < a.frame_hashes.size(); ++k) same += a.frame_hashes[k] == b.frame_hashes[k];
  EXPECT_LT(same, a.frame_hashes.size() / 10);
  EXPECT_TRUE(list_frames(tmp.path() / "a").empty());
}

TEST(Generate, RejectsBadConditions) {
  const ExperimentConfig config = small_config();
  StimulusCondition c = condition_matrix(1, config)[0];
  c.speed_level = 9;
  EXPECT_THROW(plan_stimulus(config, c), InvalidInput);
  c = condition_matrix(1, config)[0];
  c.vms_trail = 6;
  EXPECT_THROW(plan_stimulus(config, c), InvalidInput);
  c = condition_matrix(1, config)[0];
  c.reaction.partner_b = 100000;
  EXPECT_THROW(plan_stimulus(config, c), InvalidInput);
}

TEST(Batch, DryRunWritesOnlyIndex) {
  const ExperimentConfig config;
  TempDir a("dry_a"), b("dry_b");
  BatchOptions opt;
  opt.dry_run = true;
  const auto ia = batch(config, a.path(), opt);
  const auto ib = batch(config, b.path(), opt);
  EXPECT_EQ(ia, ib);
  EXPECT_EQ(ia.at("schema"), kIndexSchema);
  ASSERT_EQ(ia.at("stimuli").size(), 10u);
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(a.path())) {
    ++entries;
    EXPECT_EQ(e.path().filename(), "index.json");
  }
  EXPECT_EQ(entries, 1u);
  EXPECT_EQ(read_json(a.path() / "index.json"), ia);
}

TEST(Batch, SmallBatchWritesEveryCell) {
  ExperimentConfig config = small_config();
  config.render.width = 64;
  config.render.height = 36;
  config.harness.duration_s = 1.0;
  config.reaction.start_max_s = 0.25;
  TempDir tmp("batch");
  BatchOptions opt;
  opt.generate.threads = 1;
  const auto index = batch(config, tmp.path(), opt);
  std::set<std::string> dirs;
  for (const auto& s : index.at("stimuli")) {
    const fs::path dir = tmp.path() / s.at("dir").get<std::string>();
    dirs.insert(dir.filename().string());
    EXPECT_EQ(list_frames(dir).size(), 30u);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  }
  EXPECT_EQ(dirs.size(), 10u);
}
