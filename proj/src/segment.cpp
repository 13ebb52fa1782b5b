#include "psiart/segment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psiart/error.hpp"

namespace psiart {

int max_depth_for(double resolution_level) {
  return 1 + static_cast<int>(std::lround(3.0 * std::clamp(resolution_level, 0.0, 1.0)));
}

double rgb_variance_sum(const RasterImage& img, const Rect& r) {
  double sum[3] = {0, 0, 0};
  double sq[3] = {0, 0, 0};
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const Rgb& p = img.at(x, y);
      const double v[3] = {double(p.r), double(p.g), double(p.b)};
      for (int c = 0; c < 3; ++c) {
        sum[c] += v[c];
        sq[c] += v[c] * v[c];
      }
    }
  }
  const double n = r.area();
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double mean = sum[c] / n;
    total += std::max(0.0, sq[c] / n - mean * mean);
  }
  return total;
}

namespace {

void split(const RasterImage& img, const Rect& r, int depth, int max_depth,
           const SegmentConfig& cfg, std::vector<std::pair<Rect, int>>& leaves) {
  const int hw = r.w / 2;
  const int hh = r.h / 2;
  const bool can_split = depth < max_depth && hw >= cfg.min_region && hh >= cfg.min_region;
  if (!can_split || rgb_variance_sum(img, r) <= cfg.variance_threshold) {
    leaves.emplace_back(r, depth);
    return;
  }
  split(img, {r.x, r.y, hw, hh}, depth + 1, max_depth, cfg, leaves);
  split(img, {r.x + hw, r.y, r.w - hw, hh}, depth + 1, max_depth, cfg, leaves);
  split(img, {r.x, r.y + hh, hw, r.h - hh}, depth + 1, max_depth, cfg, leaves);
  split(img, {r.x + hw, r.y + hh, r.w - hw, r.h - hh}, depth + 1, max_depth, cfg, leaves);
}

}  // namespace

std::vector<Region> segment_image(const RasterImage& img, double resolution_level,
                                  const SegmentConfig& config) {
  if (img.width() < config.min_image || img.height() < config.min_image) {
    fail(ErrorKind::InvalidInput, "image must be at least " +
                                      std::to_string(config.min_image) + "x" +
                                      std::to_string(config.min_image));
  }
  std::vector<std::pair<Rect, int>> leaves;
  split(img, {0, 0, img.width(), img.height()}, 0, max_depth_for(resolution_level), config,
        leaves);
  std::sort(leaves.begin(), leaves.end(), [](const auto& a, const auto& b) {
    if (a.first.y != b.first.y) return a.first.y < b.first.y;
    return a.first.x < b.first.x;
  });
  std::vector<Region> out;
  out.reserve(leaves.size());
  for (const auto& [rect, depth] : leaves) {
    Region region;
    region.rect = rect;
    region.patch = img.crop(rect);
    region.features = extract_features(region.patch, img.width(), img.height());
    region.depth = depth;
    out.push_back(std::move(region));
  }
  return out;
}

}  // namespace psiart
