#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "psiart/image.hpp"
#include "psiart/memory.hpp"

namespace psiart {

enum class BrushShape { Dot, Square, Stroke };
std::string_view to_string(BrushShape b);
BrushShape brush_from_string(std::string_view name);

struct ExecutionConfig {
  int palette_size = 8;
  BrushShape brush = BrushShape::Square;
  int brush_radius = 2;
  std::uint64_t seed = 7;

  void validate() const;
};

inline constexpr int kFaceTemplateSize = 64;

struct FaceTemplate {
  int width = kFaceTemplateSize;
  int height = kFaceTemplateSize;
  std::vector<double> luminance;  // row-major, 0..255
};

// Mean grayscale of the whole-image face entries resampled to 64x64. Needs at
// least `min_faces` of them.
FaceTemplate build_face_template(const DomainMemory& faces, int min_faces = 5);

// Seeded k-means palette (20 Lloyd iterations). When the image has no more
// distinct colours than palette_size, the palette is exactly those colours.
std::vector<Rgb> kmeans_palette(const RasterImage& img, int palette_size,
                                std::uint64_t seed, int iterations = 20);

// Simulated painting: the canvas is covered by brush stamps on a grid of
// spacing brush_radius, each filled with the palette colour nearest to the
// mean of the mental image under its footprint.
RasterImage execute(const RasterImage& mental, const ExecutionConfig& cfg);

struct InternalEvaluation {
  double score = 0.0;
  bool pass = false;
};

// score = 1 - (0.5 * hsv_l1 / 6 + 0.5 * mean |luma diff| / 255).
InternalEvaluation internal_eval(const RasterImage& executed, const RasterImage& mental,
                                 double accept_threshold = 0.7);

std::size_t distinct_colors(const RasterImage& img);

}  // namespace psiart
