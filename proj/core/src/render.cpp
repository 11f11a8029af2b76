#include "molsmooth/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "molsmooth/error.hpp"

namespace molsmooth {

namespace {

constexpr int kBandRows = 16;

}  // namespace

Camera::Camera(const Box& box, int width, int height) : box_(box), width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvalidInput("viewport must be non-empty");
  const Vec3 e = box.extent();
  if (!(e.x > 0.0 && e.y > 0.0)) throw InvalidInput("scene box must have positive extent");
  scale_ = std::min(width / e.x, height / e.y);
  origin_x_ = 0.5 * (width - e.x * scale_);
  origin_y_ = 0.5 * (height - e.y * scale_);
}

Renderer::Renderer(const ScenePopulation& population, Camera camera, RenderSettings settings)
    : population_(&population),
      camera_(camera),
      settings_(settings),
      light_(normalized(settings.light_dir)) {
  for (const MoleculeType& t : population.types)
    type_colors_.push_back({srgb8_to_linear(t.color.r), srgb8_to_linear(t.color.g),
                            srgb8_to_linear(t.color.b)});
}

FrameBuffer Renderer::render(std::span<const Vec3> positions, RenderLayer layer,
                             ThreadPool* pool) const {
  FrameBuffer out;
  render(positions, layer, out, pool);
  return out;
}

void Renderer::render(std::span<const Vec3> positions, RenderLayer layer, FrameBuffer& out,
                      ThreadPool* pool, Coverage* coverage) const {
  const ScenePopulation& pop = *population_;
  if (positions.size() != pop.molecules.size())
    throw InvalidInput("render needs one position per molecule");
  const int width = camera_.width();
  const int height = camera_.height();
  if (out.width() != width || out.height() != height) out = FrameBuffer(width, height);
  if (coverage != nullptr) coverage->assign(static_cast<std::size_t>(height), RowSpan{});

  const auto [focus_a, focus_b] = pop.focus_pair;
  const RgbF background = this->background(layer);
  const double scale = camera_.scale();

  std::vector<Sprite> sprites;
  sprites.reserve(pop.molecules.size() * 4);
  for (const Molecule& m : pop.molecules) {
    const bool focus = m.id == focus_a || m.id == focus_b;
    if (layer == RenderLayer::focus_only && !focus) continue;
    const bool mask = focus && layer == RenderLayer::context_with_focus_mask;
    const RgbF color = mask ? RgbF{} : type_colors_[m.type_id];
    for (const Atom& atom : pop.types[m.type_id].atoms) {
      const Vec3 c = positions[m.id] + rotate(m.orientation, atom.offset);
      sprites.push_back({static_cast<float>(camera_.screen_x(c.x)),
                         static_cast<float>(camera_.screen_y(c.y)),
                         static_cast<float>(atom.radius * scale), static_cast<float>(c.z),
                         static_cast<float>(atom.radius), color, mask});
    }
  }

  const int bands = (height + kBandRows - 1) / kBandRows;
  std::vector<std::vector<std::uint32_t>> bins(bands);
  for (std::uint32_t s = 0; s < sprites.size(); ++s) {
    const Sprite& sp = sprites[s];
    const int y0 = std::max(0, static_cast<int>(std::floor(sp.cy - sp.radius)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(sp.cy + sp.radius)));
    if (y0 > y1 || sp.cx + sp.radius < 0.0f || sp.cx - sp.radius > width) continue;
    for (int b = y0 / kBandRows; b <= y1 / kBandRows; ++b) bins[b].push_back(s);
  }

  const Vec3 light = light_;
  const double ambient = settings_.ambient;
  const double diffuse = settings_.diffuse;

  auto raster_band = [&](std::size_t band) {
    const int row0 = static_cast<int>(band) * kBandRows;
    const int row1 = std::min(height, row0 + kBandRows);
    std::vector<float> depth(static_cast<std::size_t>(row1 - row0) * width,
                             -std::numeric_limits<float>::infinity());
    for (int y = row0; y < row1; ++y) {
      float* row = out.row(y);
      for (int x = 0; x < width; ++x) {
        row[3 * x] = background.r;
        row[3 * x + 1] = background.g;
        row[3 * x + 2] = background.b;
      }
    }
    for (std::uint32_t s : bins[band]) {
      const Sprite& sp = sprites[s];
      const float r2 = sp.radius * sp.radius;
      const float inv_r = 1.0f / sp.radius;
      const int ya = std::max(row0, static_cast<int>(std::floor(sp.cy - sp.radius)));
      const int yb = std::min(row1 - 1, static_cast<int>(std::ceil(sp.cy + sp.radius)));
      const int xa = std::max(0, static_cast<int>(std::floor(sp.cx - sp.radius)));
      const int xb = std::min(width - 1, static_cast<int>(std::ceil(sp.cx + sp.radius)));
      for (int y = ya; y <= yb; ++y) {
        const float dy = (static_cast<float>(y) + 0.5f) - sp.cy;
        const float dy2 = dy * dy;
        if (dy2 > r2) continue;
        if (coverage != nullptr) {
          RowSpan& span = (*coverage)[static_cast<std::size_t>(y)];
          if (span.empty()) span = {xa, xb + 1};
          span.begin = std::min(span.begin, xa);
          span.end = std::max(span.end, xb + 1);
        }
        float* row = out.row(y);
        float* zrow = depth.data() + static_cast<std::size_t>(y - row0) * width;
        for (int x = xa; x <= xb; ++x) {
          const float dx = (static_cast<float>(x) + 0.5f) - sp.cx;
          const float d2 = dx * dx + dy2;
          if (d2 > r2) continue;
          const float nz = std::sqrt(std::max(0.0f, 1.0f - d2 / r2));
          const float z = sp.depth + sp.world_r * nz;
          if (!(z > zrow[x])) continue;
          zrow[x] = z;
          float* px = row + 3 * x;
          if (sp.mask) {
            px[0] = px[1] = px[2] = 0.0f;
            continue;
          }
          // Screen y grows downwards, scene y upwards.
          const double lambert =
              std::max(0.0, dx * inv_r * light.x - dy * inv_r * light.y + nz * light.z);
          const double shade = ambient + diffuse * lambert;
          px[0] = static_cast<float>(std::min(1.0, sp.color.r * shade));
          px[1] = static_cast<float>(std::min(1.0, sp.color.g * shade));
          px[2] = static_cast<float>(std::min(1.0, sp.color.b * shade));
        }
      }
    }
  };

  if (pool != nullptr) {
    pool->for_each_chunk(static_cast<std::size_t>(bands), 1, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) raster_band(i);
    });
  } else {
    for (int b = 0; b < bands; ++b) raster_band(static_cast<std::size_t>(b));
  }
}

FrameBuffer render_frame(const ScenePopulation& population, std::span<const Vec3> positions,
                         RenderLayer layer, const Camera& camera, const RenderSettings& settings) {
  return Renderer(population, camera, settings).render(positions, layer);
}

}  // namespace molsmooth
