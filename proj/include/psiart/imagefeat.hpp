#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "psiart/image.hpp"

namespace psiart {

enum class ColorSpace { RGB, HSV, LAB };

inline constexpr int kBinsPerChannel = 10;
inline constexpr int kHistogramLength = 3 * kBinsPerChannel;
inline constexpr int kGaborLength = 12;
inline constexpr int kHaarLength = 12;
inline constexpr int kDetailLength = 3 * kHistogramLength + kGaborLength + kHaarLength;
static_assert(kDetailLength == 114);

// The five per-patch descriptors, in detail-vector order.
enum class DescriptorKind { Rgb = 0, Hsv = 1, Lab = 2, Gabor = 3, Haar = 4 };
inline constexpr std::array<DescriptorKind, 5> kAllDescriptorKinds = {
    DescriptorKind::Rgb, DescriptorKind::Hsv, DescriptorKind::Lab,
    DescriptorKind::Gabor, DescriptorKind::Haar};

std::string_view to_string(DescriptorKind kind);
DescriptorKind descriptor_kind_from_string(std::string_view name);
int descriptor_length(DescriptorKind kind);

struct ColorHistogram {
  ColorSpace space = ColorSpace::RGB;
  // Channel-major: bins [0,10) channel 0, [10,20) channel 1, [20,30) channel 2.
  std::array<double, kHistogramLength> bins{};
};

struct GaborDescriptor {
  // Scale-major: index = scale * 3 + orientation.
  std::array<double, kGaborLength> energies{};
};

struct HaarDescriptor {
  std::array<double, kHaarLength> responses{};
};

struct GeneralFeatures {
  double bbox_w = 0;
  double bbox_h = 0;
  double mean_luminance = 0;

  std::array<double, 3> as_array() const { return {bbox_w, bbox_h, mean_luminance}; }
};

struct FeatureBundle {
  ColorHistogram rgb{ColorSpace::RGB, {}};
  ColorHistogram hsv{ColorSpace::HSV, {}};
  ColorHistogram lab{ColorSpace::LAB, {}};
  GaborDescriptor gabor;
  HaarDescriptor haar;
  GeneralFeatures general;

  std::vector<double> descriptor(DescriptorKind kind) const;
  // rgb | hsv | lab | gabor | haar, 114 values.
  std::vector<double> detail_vector() const;
};

// --- colour conversion -------------------------------------------------------

// H in [0,360), S and V in [0,1].
std::array<double, 3> rgb_to_hsv(Rgb p);
// CIE L*a*b*, D65 white, sRGB linearisation. L in [0,100].
std::array<double, 3> rgb_to_lab(Rgb p);

struct ChannelRange {
  double lo;
  double hi;
};
// Binning ranges per channel for a space.
std::array<ChannelRange, 3> channel_ranges(ColorSpace space);
// floor(10 (v - lo) / (hi - lo)) clamped to [0, 9].
int bin_index(double v, ChannelRange range);

// --- descriptors -------------------------------------------------------------

ColorHistogram color_histogram(const RasterImage& img, ColorSpace space);

// Gabor bank parameters. Kernels are real (phase 0), zero-mean corrected and
// scaled to unit L1 norm; the image is luma / 255.
inline constexpr std::array<double, 4> kGaborSigmas = {1.0, 2.0, 4.0, 8.0};
inline constexpr std::array<double, 3> kGaborThetasDeg = {0.0, 60.0, 120.0};
inline constexpr double kGaborGamma = 0.5;

struct GaborKernel {
  int radius = 0;  // support is (2 radius + 1)^2
  std::vector<double> taps;
};
GaborKernel gabor_kernel(double sigma, double theta_rad);

GaborDescriptor gabor_descriptor(const RasterImage& img);

// A Haar template on a 24x24 unit lattice laid over the patch. Pixel bounds of
// a lattice coordinate g along an axis of length n are g * n / 24 (integer
// division), so adjacent sub-rectangles tile without gaps.
struct HaarCell {
  int x0, y0, x1, y1;  // lattice units, half-open
};
struct HaarTemplate {
  const char* name;
  std::vector<HaarCell> positive;
  std::vector<HaarCell> negative;
};
inline constexpr int kHaarLattice = 24;
const std::array<HaarTemplate, kHaarLength>& haar_templates();
Rect haar_cell_rect(const HaarCell& cell, int width, int height);

// Summed-area table with a zero first row and column: (w+1) x (h+1).
class IntegralImage {
 public:
  explicit IntegralImage(std::span<const double> plane, int width, int height);
  double sum(const Rect& r) const;

 private:
  int stride_;
  std::vector<double> table_;
};

// Response = (S+ - S- * |P+| / |P-|) / (area * 255). The negative sum is
// rescaled to the positive area so constant patches cancel exactly.
HaarDescriptor haar_descriptor(const RasterImage& img);

GeneralFeatures general_features(const RasterImage& img, int bbox_w, int bbox_h,
                                 int canvas_w, int canvas_h);

// All descriptors for a patch cut from a canvas of the given size.
FeatureBundle extract_features(const RasterImage& patch, int canvas_w,
                               int canvas_h);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace psiart
