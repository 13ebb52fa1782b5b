#include "psiart/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "psiart/error.hpp"
#include "psiart/imagefeat.hpp"
#include "psiart/som.hpp"

namespace psiart {

std::string_view to_string(BrushShape b) {
  switch (b) {
    case BrushShape::Dot: return "dot";
    case BrushShape::Square: return "square";
    case BrushShape::Stroke: return "stroke";
  }
  return "?";
}

BrushShape brush_from_string(std::string_view name) {
  if (name == "dot") return BrushShape::Dot;
  if (name == "square") return BrushShape::Square;
  if (name == "stroke") return BrushShape::Stroke;
  fail(ErrorKind::InvalidInput, "unknown brush shape: " + std::string(name));
}

void ExecutionConfig::validate() const {
  if (palette_size < 2) fail(ErrorKind::InvalidInput, "palette_size must be >= 2");
  if (brush_radius < 1) fail(ErrorKind::InvalidInput, "brush_radius must be >= 1");
}

FaceTemplate build_face_template(const DomainMemory& faces, int min_faces) {
  FaceTemplate t;
  t.luminance.assign(static_cast<std::size_t>(t.width) * t.height, 0.0);
  int count = 0;
  for (const auto& e : faces.entries) {
    if (!e.is_whole_image()) continue;
    const auto gray = grayscale(e.image);
    const auto scaled =
        resize_plane(gray, e.image.width(), e.image.height(), t.width, t.height);
    for (std::size_t i = 0; i < scaled.size(); ++i) t.luminance[i] += scaled[i];
    ++count;
  }
  if (count < min_faces) {
    fail(ErrorKind::InsufficientData, "face template needs " + std::to_string(min_faces) +
                                          " whole faces, found " + std::to_string(count));
  }
  for (double& v : t.luminance) v /= count;
  return t;
}

namespace {

double color_d2(const std::array<double, 3>& a, Rgb b) {
  const double dr = a[0] - b.r, dg = a[1] - b.g, db = a[2] - b.b;
  return dr * dr + dg * dg + db * db;
}

std::size_t nearest(const std::vector<Rgb>& palette, const std::array<double, 3>& c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const double d = color_d2(c, palette[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

std::vector<Rgb> kmeans_palette(const RasterImage& img, int palette_size, std::uint64_t seed,
                                int iterations) {
  std::set<Rgb> unique(img.pixels().begin(), img.pixels().end());
  std::vector<Rgb> distinct(unique.begin(), unique.end());
  if (static_cast<int>(distinct.size()) <= palette_size) return distinct;

  // Seeded sampling of distinct colours (partial Fisher-Yates).
  Rng rng(seed);
  for (int i = 0; i < palette_size; ++i) {
    std::swap(distinct[static_cast<std::size_t>(i)],
              distinct[static_cast<std::size_t>(i) + rng.below(distinct.size() - i)]);
  }
  std::vector<std::array<double, 3>> centres;
  for (int i = 0; i < palette_size; ++i) {
    const Rgb& c = distinct[static_cast<std::size_t>(i)];
    centres.push_back({double(c.r), double(c.g), double(c.b)});
  }

  const auto px = img.pixels();
  std::vector<std::size_t> assign(px.size(), 0);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < px.size(); ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < centres.size(); ++k) {
        const double d = color_d2(centres[k], px[i]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      assign[i] = best;
    }
    std::vector<std::array<double, 3>> sums(centres.size(), {0, 0, 0});
    std::vector<std::size_t> counts(centres.size(), 0);
    for (std::size_t i = 0; i < px.size(); ++i) {
      auto& s = sums[assign[i]];
      s[0] += px[i].r;
      s[1] += px[i].g;
      s[2] += px[i].b;
      ++counts[assign[i]];
    }
    for (std::size_t k = 0; k < centres.size(); ++k) {
      if (counts[k] == 0) continue;  // empty cluster keeps its centre
      for (int c = 0; c < 3; ++c) centres[k][c] = sums[k][c] / counts[k];
    }
  }
  std::vector<Rgb> palette;
  for (const auto& c : centres) palette.push_back({to_byte(c[0]), to_byte(c[1]), to_byte(c[2])});
  return palette;
}

namespace {

bool in_footprint(BrushShape brush, int r, int dx, int dy) {
  switch (brush) {
    case BrushShape::Dot: return dx * dx + dy * dy < r * r;
    case BrushShape::Square: return std::abs(dx) <= r - 1 && std::abs(dy) <= r - 1;
    case BrushShape::Stroke: return std::abs(dx) <= 2 * r - 1 && std::abs(dy) <= r - 1;
  }
  return false;
}

}  // namespace

RasterImage execute(const RasterImage& mental, const ExecutionConfig& cfg) {
  cfg.validate();
  const auto palette = kmeans_palette(mental, cfg.palette_size, cfg.seed);
  const int w = mental.width();
  const int h = mental.height();
  const int r = cfg.brush_radius;
  const int reach = cfg.brush == BrushShape::Stroke ? 2 * r - 1 : r - 1;

  // The first stamp overwrites this base, so it never shows.
  RasterImage canvas(w, h, palette.front());
  for (int cy = 0; cy < h; cy += r) {
    for (int cx = 0; cx < w; cx += r) {
      std::array<double, 3> mean{0, 0, 0};
      int n = 0;
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const int x = cx + dx, y = cy + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          if (!in_footprint(cfg.brush, r, dx, dy)) continue;
          const Rgb& p = mental.at(x, y);
          mean[0] += p.r;
          mean[1] += p.g;
          mean[2] += p.b;
          ++n;
        }
      }
      for (double& m : mean) m /= n;
      const Rgb colour = palette[nearest(palette, mean)];
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const int x = cx + dx, y = cy + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          if (in_footprint(cfg.brush, r, dx, dy)) canvas.at(x, y) = colour;
        }
      }
    }
  }
  return canvas;
}

InternalEvaluation internal_eval(const RasterImage& executed, const RasterImage& mental,
                                 double accept_threshold) {
  if (executed.width() != mental.width() || executed.height() != mental.height()) {
    fail(ErrorKind::InvalidInput, "internal evaluation needs equally sized images");
  }
  const auto ha = color_histogram(executed, ColorSpace::HSV);
  const auto hb = color_histogram(mental, ColorSpace::HSV);
  double l1 = 0.0;
  for (int i = 0; i < kHistogramLength; ++i) l1 += std::abs(ha.bins[i] - hb.bins[i]);

  double lum = 0.0;
  const auto pa = executed.pixels();
  const auto pb = mental.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) lum += std::abs(luma(pa[i]) - luma(pb[i]));
  lum /= static_cast<double>(pa.size());

  const double distance = 0.5 * (l1 / 6.0) + 0.5 * (lum / 255.0);
  const double score = std::clamp(1.0 - distance, 0.0, 1.0);
  return {score, score >= accept_threshold};
}

std::size_t distinct_colors(const RasterImage& img) {
  return std::set<Rgb>(img.pixels().begin(), img.pixels().end()).size();
}

}  // namespace psiart
