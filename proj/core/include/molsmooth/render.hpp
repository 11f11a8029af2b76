#pragma once

#include <span>
#include <vector>

#include "molsmooth/frame.hpp"
#include "molsmooth/geometry.hpp"
#include "molsmooth/parallel.hpp"
#include "molsmooth/scene.hpp"

namespace molsmooth {

/// Orthographic camera looking down -z. The scene box is fitted into the
/// viewport with square pixels and centred, so every box position projects
/// inside the image. Larger z is nearer to the viewer.
class Camera {
public:
  Camera(const Box& box, int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  /// Pixels per scene unit.
  double scale() const noexcept { return scale_; }

  /// Continuous pixel coordinates; (0,0) is the top-left corner of the image.
  double screen_x(double x) const noexcept { return origin_x_ + (x - box_.min.x) * scale_; }
  double screen_y(double y) const noexcept { return origin_y_ + (box_.max.y - y) * scale_; }

  const Box& box() const noexcept { return box_; }

private:
  Box box_;
  int width_;
  int height_;
  double scale_;
  double origin_x_;
  double origin_y_;
};

struct RenderSettings {
  RgbF background{0.003f, 0.003f, 0.005f};  ///< linear light, context layer and full renders
  double ambient = 0.18;
  double diffuse = 0.82;
  Vec3 light_dir{-0.4, 0.5, 0.77};  ///< towards the light
};

enum class RenderLayer {
  focus_only,               ///< reaction partners on black
  context_with_focus_mask,  ///< everything, partners drawn black with depth
  full,                     ///< single-pass reference render
};

/// Sphere-impostor rasterizer. Each atom is a screen-space disc with a depth
/// and normal reconstructed from the sphere equation, Lambert shaded and
/// depth tested. Rows are processed in fixed bands and spheres in molecule
/// order, so output is identical for every thread count.
class Renderer {
public:
  Renderer(const ScenePopulation& population, Camera camera, RenderSettings settings = {});

  const Camera& camera() const noexcept { return camera_; }
  const RenderSettings& settings() const noexcept { return settings_; }
  RgbF background(RenderLayer layer) const noexcept {
    return layer == RenderLayer::focus_only ? RgbF{} : settings_.background;
  }

  /// `positions[i]` is the origin of molecule i. `out` is resized if needed.
  /// If `coverage` is given it receives, per row, the pixel range touched by
  /// sprites; everything outside it is background().
  void render(std::span<const Vec3> positions, RenderLayer layer, FrameBuffer& out,
              ThreadPool* pool = nullptr, Coverage* coverage = nullptr) const;

  FrameBuffer render(std::span<const Vec3> positions, RenderLayer layer,
                     ThreadPool* pool = nullptr) const;

private:
  struct Sprite {
    float cx, cy;    // pixel-space centre
    float radius;    // pixels
    float depth;     // scene z of the centre
    float world_r;   // scene units
    RgbF color;
    bool mask;       // drawn pure black, still depth tested
  };

  const ScenePopulation* population_;
  Camera camera_;
  RenderSettings settings_;
  Vec3 light_;
  std::vector<RgbF> type_colors_;  // linear
};

/// Convenience wrapper around Renderer for one frame.
FrameBuffer render_frame(const ScenePopulation& population, std::span<const Vec3> positions,
                         RenderLayer layer, const Camera& camera,
                         const RenderSettings& settings = {});

}  // namespace molsmooth
