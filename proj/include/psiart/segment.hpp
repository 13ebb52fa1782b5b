#pragma once

#include <vector>

#include "psiart/image.hpp"
#include "psiart/imagefeat.hpp"

namespace psiart {

struct Region {
  Rect rect;
  RasterImage patch{1, 1};
  FeatureBundle features;
  int depth = 0;
};

struct SegmentConfig {
  // Sum of per-channel variances (0..255 scale) above which a node splits.
  double variance_threshold = 1500.0;
  int min_region = 8;
  int min_image = 64;
};

// Quadtree depth limit for a resolution level: 1 + round(3 * rl).
int max_depth_for(double resolution_level);

double rgb_variance_sum(const RasterImage& img, const Rect& r);

// Quadtree decomposition; leaves are returned sorted by (y, x) of their origin.
std::vector<Region> segment_image(const RasterImage& img, double resolution_level,
                                  const SegmentConfig& config = {});

}  // namespace psiart
