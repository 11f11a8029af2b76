#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "molsmooth/config.hpp"
#include "molsmooth/frame.hpp"
#include "molsmooth/scene.hpp"

namespace testing_support {

// Tiny but complete experiment: 2 s at 120 fps, 160x90 frames.
inline molsmooth::ExperimentConfig small_config() {
  molsmooth::ExperimentConfig c;
  c.scene.molecule_count = 80;
  c.render.width = 160;
  c.render.height = 90;
  c.harness.duration_s = 2.0;
  c.reaction.start_min_s = 0.25;
  c.reaction.start_max_s = 0.5;
  c.reaction.attract_s = 0.5;
  c.reaction.bond_s = 0.25;
  c.reaction.repulse_s = 0.5;
  return c;
}

// Hand-built population: one single-atom type per colour, identity rotations.
inline molsmooth::ScenePopulation sphere_population(const std::vector<double>& radii,
                                                    const std::vector<molsmooth::Rgb8>& colors,
                                                    std::pair<std::uint32_t, std::uint32_t> focus) {
  molsmooth::ScenePopulation pop;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    pop.types.push_back({static_cast<int>(i), colors[i], {{{0.0, 0.0, 0.0}, radii[i]}}});
    molsmooth::Molecule m;
    m.id = static_cast<std::uint32_t>(i);
    m.type_id = static_cast<int>(i);
    pop.molecules.push_back(m);
  }
  pop.focus_pair = focus;
  pop.d_mol = radii.empty() ? 0.0 : 2.0 * radii.front();
  return pop;
}

inline molsmooth::FrameBuffer random_frame(int w, int h, std::mt19937_64& gen) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  molsmooth::FrameBuffer f(w, h);
  for (float& v : f.channels()) v = u(gen);
  return f;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("molsmooth_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace testing_support
