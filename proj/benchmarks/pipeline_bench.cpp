#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "molsmooth/config.hpp"
#include "molsmooth/image_io.hpp"
#include "molsmooth/motion.hpp"
#include "molsmooth/render.hpp"
#include "molsmooth/scene.hpp"
#include "molsmooth/smoothing.hpp"

using namespace molsmooth;

namespace {

struct Scene {
  ExperimentConfig config;
  ScenePopulation population = build_scene(config.scene, 1);
  BrownianMotion motion{NoiseField(1), MotionParams{}, config.scene.box};
  Renderer renderer{population, Camera(config.scene.box, config.render.width, config.render.height)};

  std::vector<Vec3> positions(double t) const {
    std::vector<Vec3> p(population.molecules.size());
    for (MoleculeId i = 0; i < p.size(); ++i) p[i] = motion.position(i, t);
    return p;
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

FrameBuffer noise_frame(int w, int h) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  FrameBuffer f(w, h);
  for (float& v : f.channels()) v = u(gen);
  return f;
}

}  // namespace

static void BM_RenderContext(benchmark::State& state) {
  const Scene& s = scene();
  const auto pos = s.positions(3.0);
  FrameBuffer out;
  for (auto _ : state) s.renderer.render(pos, RenderLayer::context_with_focus_mask, out);
}
BENCHMARK(BM_RenderContext)->Unit(benchmark::kMillisecond);

static void BM_AccumulateDense(benchmark::State& state) {
  const FrameBuffer f = noise_frame(1024, 576);
  FrameAccumulator acc(1024, 576);
  for (auto _ : state) acc.add(f);
}
BENCHMARK(BM_AccumulateDense)->Unit(benchmark::kMillisecond);

static void BM_AccumulateSparse(benchmark::State& state) {
  const Scene& s = scene();
  const auto pos = s.positions(3.0);
  FrameBuffer frame;
  Coverage cov;
  const RgbF bg = s.renderer.background(RenderLayer::context_with_focus_mask);
  s.renderer.render(pos, RenderLayer::context_with_focus_mask, frame, nullptr, &cov);
  FrameAccumulator acc(frame.width(), frame.height(), bg);
  for (auto _ : state) acc.add(frame, 1, nullptr, &cov);
}
BENCHMARK(BM_AccumulateSparse)->Unit(benchmark::kMillisecond);

static void BM_ScreenBlend(benchmark::State& state) {
  FrameBuffer a = noise_frame(1024, 576);
  const FrameBuffer b = noise_frame(1024, 576);
  for (auto _ : state) screen_blend_into(a, b);
}
BENCHMARK(BM_ScreenBlend)->Unit(benchmark::kMillisecond);

static void BM_ToSrgb8(benchmark::State& state) {
  const FrameBuffer f = noise_frame(1024, 576);
  for (auto _ : state) benchmark::DoNotOptimize(to_srgb8(f));
}
BENCHMARK(BM_ToSrgb8)->Unit(benchmark::kMillisecond);

static void BM_WritePng(benchmark::State& state) {
  const Scene& s = scene();
  const Image8 img = to_srgb8(s.renderer.render(s.positions(3.0), RenderLayer::full));
  const auto path = std::filesystem::temp_directory_path() / "molsmooth_bench.png";
  for (auto _ : state) write_png(path, img, static_cast<int>(state.range(0)));
  std::filesystem::remove(path);
}
BENCHMARK(BM_WritePng)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);
