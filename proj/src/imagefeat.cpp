#include "psiart/imagefeat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "psiart/error.hpp"

namespace psiart {

std::string_view to_string(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::Rgb: return "rgb";
    case DescriptorKind::Hsv: return "hsv";
    case DescriptorKind::Lab: return "lab";
    case DescriptorKind::Gabor: return "gabor";
    case DescriptorKind::Haar: return "haar";
  }
  return "?";
}

DescriptorKind descriptor_kind_from_string(std::string_view name) {
  for (DescriptorKind k : kAllDescriptorKinds) {
    if (to_string(k) == name) return k;
  }
  fail(ErrorKind::InvalidInput, "unknown descriptor kind: " + std::string(name));
}

int descriptor_length(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::Rgb:
    case DescriptorKind::Hsv:
    case DescriptorKind::Lab: return kHistogramLength;
    case DescriptorKind::Gabor: return kGaborLength;
    case DescriptorKind::Haar: return kHaarLength;
  }
  return 0;
}

std::vector<double> FeatureBundle::descriptor(DescriptorKind kind) const {
  switch (kind) {
    case DescriptorKind::Rgb: return {rgb.bins.begin(), rgb.bins.end()};
    case DescriptorKind::Hsv: return {hsv.bins.begin(), hsv.bins.end()};
    case DescriptorKind::Lab: return {lab.bins.begin(), lab.bins.end()};
    case DescriptorKind::Gabor: return {gabor.energies.begin(), gabor.energies.end()};
    case DescriptorKind::Haar: return {haar.responses.begin(), haar.responses.end()};
  }
  return {};
}

std::vector<double> FeatureBundle::detail_vector() const {
  std::vector<double> out;
  out.reserve(kDetailLength);
  out.insert(out.end(), rgb.bins.begin(), rgb.bins.end());
  out.insert(out.end(), hsv.bins.begin(), hsv.bins.end());
  out.insert(out.end(), lab.bins.begin(), lab.bins.end());
  out.insert(out.end(), gabor.energies.begin(), gabor.energies.end());
  out.insert(out.end(), haar.responses.begin(), haar.responses.end());
  return out;
}

// --- colour conversion -------------------------------------------------------

std::array<double, 3> rgb_to_hsv(Rgb p) {
  const double r = p.r / 255.0;
  const double g = p.g / 255.0;
  const double b = p.b / 255.0;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;
  double h = 0.0;
  if (delta > 0.0) {
    if (max == r) {
      h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (max == g) {
      h = 60.0 * ((b - r) / delta + 2.0);
    } else {
      h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
  }
  const double s = max > 0.0 ? delta / max : 0.0;
  return {h, s, max};
}

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t)
                                   : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::array<double, 3> rgb_to_lab(Rgb p) {
  const double r = srgb_to_linear(p.r / 255.0);
  const double g = srgb_to_linear(p.g / 255.0);
  const double b = srgb_to_linear(p.b / 255.0);
  // sRGB -> XYZ (D65)
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  constexpr double xn = 0.95047;
  constexpr double yn = 1.0;
  constexpr double zn = 1.08883;
  const double fx = lab_f(x / xn);
  const double fy = lab_f(y / yn);
  const double fz = lab_f(z / zn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<ChannelRange, 3> channel_ranges(ColorSpace space) {
  switch (space) {
    case ColorSpace::RGB: return {{{0, 255}, {0, 255}, {0, 255}}};
    case ColorSpace::HSV: return {{{0, 360}, {0, 1}, {0, 1}}};
    case ColorSpace::LAB: return {{{0, 100}, {-128, 127}, {-128, 127}}};
  }
  return {};
}

int bin_index(double v, ChannelRange range) {
  const double t = kBinsPerChannel * (v - range.lo) / (range.hi - range.lo);
  return std::clamp(static_cast<int>(std::floor(t)), 0, kBinsPerChannel - 1);
}

// --- colour histogram ----------------------------------------------------------

ColorHistogram color_histogram(const RasterImage& img, ColorSpace space) {
  ColorHistogram hist{space, {}};
  const auto ranges = channel_ranges(space);
  std::array<std::size_t, kHistogramLength> counts{};
  for (const Rgb& p : img.pixels()) {
    std::array<double, 3> v{};
    switch (space) {
      case ColorSpace::RGB: v = {double(p.r), double(p.g), double(p.b)}; break;
      case ColorSpace::HSV: v = rgb_to_hsv(p); break;
      case ColorSpace::LAB: v = rgb_to_lab(p); break;
    }
    for (int c = 0; c < 3; ++c) {
      ++counts[c * kBinsPerChannel + bin_index(v[c], ranges[c])];
    }
  }
  const double n = static_cast<double>(img.size());
  for (int i = 0; i < kHistogramLength; ++i) hist.bins[i] = counts[i] / n;
  return hist;
}

// --- Gabor -------------------------------------------------------------------

GaborKernel gabor_kernel(double sigma, double theta_rad) {
  GaborKernel k;
  k.radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int side = 2 * k.radius + 1;
  k.taps.resize(static_cast<std::size_t>(side) * side);
  const double lambda = 2.0 * sigma;
  const double ct = std::cos(theta_rad);
  const double st = std::sin(theta_rad);
  double mean = 0.0;
  for (int dy = -k.radius; dy <= k.radius; ++dy) {
    for (int dx = -k.radius; dx <= k.radius; ++dx) {
      const double xr = dx * ct + dy * st;
      const double yr = -dx * st + dy * ct;
      const double envelope = std::exp(
          -(xr * xr + kGaborGamma * kGaborGamma * yr * yr) / (2.0 * sigma * sigma));
      const double v = envelope * std::cos(2.0 * std::numbers::pi * xr / lambda);
      k.taps[(dy + k.radius) * side + (dx + k.radius)] = v;
      mean += v;
    }
  }
  mean /= static_cast<double>(k.taps.size());
  double l1 = 0.0;
  for (double& v : k.taps) {
    v -= mean;
    l1 += std::abs(v);
  }
  for (double& v : k.taps) v /= l1;
  return k;
}

namespace {

const std::array<GaborKernel, kGaborLength>& gabor_bank() {
  static const auto bank = [] {
    std::array<GaborKernel, kGaborLength> out;
    for (std::size_t s = 0; s < kGaborSigmas.size(); ++s) {
      for (std::size_t o = 0; o < kGaborThetasDeg.size(); ++o) {
        out[s * kGaborThetasDeg.size() + o] =
            gabor_kernel(kGaborSigmas[s], kGaborThetasDeg[o] * std::numbers::pi / 180.0);
      }
    }
    return out;
  }();
  return bank;
}

}  // namespace

GaborDescriptor gabor_descriptor(const RasterImage& img) {
  const int w = img.width();
  const int h = img.height();
  std::vector<double> gray = grayscale(img);
  for (double& v : gray) v /= 255.0;

  GaborDescriptor out;
  const auto& bank = gabor_bank();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const GaborKernel& k = bank[i];
    const int side = 2 * k.radius + 1;
    // Edge-replicated padding so every output pixel sees full support.
    const int pw = w + 2 * k.radius;
    const int ph = h + 2 * k.radius;
    std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y) {
      const int sy = std::clamp(y - k.radius, 0, h - 1);
      for (int x = 0; x < pw; ++x) {
        const int sx = std::clamp(x - k.radius, 0, w - 1);
        padded[static_cast<std::size_t>(y) * pw + x] = gray[sy * w + sx];
      }
    }
    double energy = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int ky = 0; ky < side; ++ky) {
          // Correlation with the flipped kernel; the kernel is point-symmetric
          // so this is also the convolution.
          const double* row = &padded[static_cast<std::size_t>(y + ky) * pw + x];
          const double* taps = &k.taps[static_cast<std::size_t>(ky) * side];
          for (int kx = 0; kx < side; ++kx) acc += row[kx] * taps[kx];
        }
        energy += acc * acc;
      }
    }
    out.energies[i] = energy / (static_cast<double>(w) * h);
  }
  return out;
}

// --- Haar ----------------------------------------------------------------------

namespace {

// Places a full-lattice cell inside the window [offset, offset + span).
HaarCell place(HaarCell c, int offset, int span) {
  auto map = [&](int g) { return offset + g * span / kHaarLattice; };
  return {map(c.x0), map(c.y0), map(c.x1), map(c.y1)};
}

HaarTemplate scaled(const char* name, std::vector<HaarCell> pos,
                    std::vector<HaarCell> neg, bool half) {
  const int offset = half ? kHaarLattice / 4 : 0;
  const int span = half ? kHaarLattice / 2 : kHaarLattice;
  for (auto& c : pos) c = place(c, offset, span);
  for (auto& c : neg) c = place(c, offset, span);
  return {name, std::move(pos), std::move(neg)};
}

}  // namespace

const std::array<HaarTemplate, kHaarLength>& haar_templates() {
  // Ordered from the simplest pattern to the most complex, each at full-patch
  // scale and at a centred half-size window.
  static const auto table = [] {
    const std::vector<HaarCell> left{{0, 0, 12, 24}}, right{{12, 0, 24, 24}};
    const std::vector<HaarCell> top{{0, 0, 24, 12}}, bottom{{0, 12, 24, 24}};
    const std::vector<HaarCell> h_outer{{0, 0, 8, 24}, {16, 0, 24, 24}},
        h_mid{{8, 0, 16, 24}};
    const std::vector<HaarCell> v_outer{{0, 0, 24, 8}, {0, 16, 24, 24}},
        v_mid{{0, 8, 24, 16}};
    const std::vector<HaarCell> diag{{0, 0, 12, 12}, {12, 12, 24, 24}},
        anti{{12, 0, 24, 12}, {0, 12, 12, 24}};
    const std::vector<HaarCell> centre{{6, 6, 18, 18}},
        ring{{0, 0, 24, 6}, {0, 18, 24, 24}, {0, 6, 6, 18}, {18, 6, 24, 18}};
    return std::array<HaarTemplate, kHaarLength>{
        scaled("edge_h/full", left, right, false),
        scaled("edge_h/half", left, right, true),
        scaled("edge_v/full", top, bottom, false),
        scaled("edge_v/half", top, bottom, true),
        scaled("line_h/full", h_outer, h_mid, false),
        scaled("line_h/half", h_outer, h_mid, true),
        scaled("line_v/full", v_outer, v_mid, false),
        scaled("line_v/half", v_outer, v_mid, true),
        scaled("checker/full", diag, anti, false),
        scaled("checker/half", diag, anti, true),
        scaled("centre_surround/full", centre, ring, false),
        scaled("centre_surround/half", centre, ring, true),
    };
  }();
  return table;
}

Rect haar_cell_rect(const HaarCell& cell, int width, int height) {
  const int x0 = cell.x0 * width / kHaarLattice;
  const int x1 = cell.x1 * width / kHaarLattice;
  const int y0 = cell.y0 * height / kHaarLattice;
  const int y1 = cell.y1 * height / kHaarLattice;
  return {x0, y0, x1 - x0, y1 - y0};
}

IntegralImage::IntegralImage(std::span<const double> plane, int width, int height)
    : stride_(width + 1),
      table_(static_cast<std::size_t>(width + 1) * (height + 1), 0.0) {
  for (int y = 0; y < height; ++y) {
    double row = 0.0;
    for (int x = 0; x < width; ++x) {
      row += plane[static_cast<std::size_t>(y) * width + x];
      table_[(y + 1) * stride_ + (x + 1)] = table_[y * stride_ + (x + 1)] + row;
    }
  }
}

double IntegralImage::sum(const Rect& r) const {
  if (r.w <= 0 || r.h <= 0) return 0.0;
  const auto at = [&](int x, int y) { return table_[y * stride_ + x]; };
  return at(r.x + r.w, r.y + r.h) - at(r.x, r.y + r.h) - at(r.x + r.w, r.y) +
         at(r.x, r.y);
}

HaarDescriptor haar_descriptor(const RasterImage& img) {
  const int w = img.width();
  const int h = img.height();
  const auto gray = grayscale(img);
  const IntegralImage integral(gray, w, h);
  const double norm = static_cast<double>(w) * h * 255.0;

  HaarDescriptor out;
  const auto& table = haar_templates();
  for (std::size_t t = 0; t < table.size(); ++t) {
    double pos_sum = 0.0, neg_sum = 0.0;
    long pos_area = 0, neg_area = 0;
    for (const HaarCell& c : table[t].positive) {
      const Rect r = haar_cell_rect(c, w, h);
      pos_sum += integral.sum(r);
      pos_area += r.area();
    }
    for (const HaarCell& c : table[t].negative) {
      const Rect r = haar_cell_rect(c, w, h);
      neg_sum += integral.sum(r);
      neg_area += r.area();
    }
    if (pos_area == 0 || neg_area == 0) {
      out.responses[t] = 0.0;  // template degenerates on tiny patches
      continue;
    }
    const double neg_scaled = neg_sum / static_cast<double>(neg_area) * pos_area;
    out.responses[t] = (pos_sum - neg_scaled) / norm;
  }
  return out;
}

// --- general -------------------------------------------------------------------

GeneralFeatures general_features(const RasterImage& img, int bbox_w, int bbox_h,
                                 int canvas_w, int canvas_h) {
  if (canvas_w <= 0 || canvas_h <= 0) {
    fail(ErrorKind::InvalidInput, "canvas dimensions must be positive");
  }
  if (bbox_w < 0 || bbox_h < 0 || bbox_w > canvas_w || bbox_h > canvas_h) {
    fail(ErrorKind::InvalidInput, "bounding box larger than canvas");
  }
  double sum = 0.0;
  for (const Rgb& p : img.pixels()) sum += luma(p);
  const double mean = sum / static_cast<double>(img.size()) / 255.0;
  return {static_cast<double>(bbox_w) / canvas_w,
          static_cast<double>(bbox_h) / canvas_h, std::clamp(mean, 0.0, 1.0)};
}

FeatureBundle extract_features(const RasterImage& patch, int canvas_w,
                               int canvas_h) {
  FeatureBundle f;
  f.rgb = color_histogram(patch, ColorSpace::RGB);
  f.hsv = color_histogram(patch, ColorSpace::HSV);
  f.lab = color_histogram(patch, ColorSpace::LAB);
  f.gabor = gabor_descriptor(patch);
  f.haar = haar_descriptor(patch);
  f.general = general_features(patch, patch.width(), patch.height(), canvas_w,
                               canvas_h);
  return f;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::InvalidInput, "vector length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace psiart
