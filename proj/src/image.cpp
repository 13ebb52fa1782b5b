#include "psiart/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psiart/error.hpp"

namespace psiart {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::InvalidInput, "image dimensions must be >= 1, got " +
                                      std::to_string(width) + "x" +
                                      std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::InvalidInput, "image dimensions must be >= 1");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorKind::InvalidInput, "pixel count does not match dimensions");
  }
}

RasterImage RasterImage::crop(const Rect& r) const {
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > width_ ||
      r.y + r.h > height_) {
    fail(ErrorKind::InvalidInput, "crop rectangle outside image bounds");
  }
  RasterImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const Rgb* src = &pixels_[index(r.x, r.y + y)];
    std::copy(src, src + r.w, &out.at(0, y));
  }
  return out;
}

void RasterImage::paste(const RasterImage& src, int x, int y) {
  if (x < 0 || y < 0 || x + src.width() > width_ || y + src.height() > height_) {
    fail(ErrorKind::InvalidInput, "paste target outside image bounds");
  }
  for (int row = 0; row < src.height(); ++row) {
    const Rgb* from = &src.at(0, row);
    std::copy(from, from + src.width(), &at(x, y + row));
  }
}

std::vector<double> grayscale(const RasterImage& img) {
  std::vector<double> out;
  out.reserve(img.size());
  for (const Rgb& p : img.pixels()) out.push_back(luma(p));
  return out;
}

namespace {

struct Tap {
  int i0;
  int i1;
  double t;
};

// Pixel-centre mapping; identical sizes give t == 0 and i0 == dst.
std::vector<Tap> taps(int src, int dst) {
  std::vector<Tap> out(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double s = src == dst ? d : (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    out[d] = {i0, i1, s - i0};
  }
  return out;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  RasterImage out(width, height);
  const auto tx = taps(img.width(), width);
  const auto ty = taps(img.height(), height);
  for (int y = 0; y < height; ++y) {
    const Tap& vy = ty[y];
    for (int x = 0; x < width; ++x) {
      const Tap& vx = tx[x];
      const Rgb& a = img.at(vx.i0, vy.i0);
      const Rgb& b = img.at(vx.i1, vy.i0);
      const Rgb& c = img.at(vx.i0, vy.i1);
      const Rgb& d = img.at(vx.i1, vy.i1);
      auto mix = [&](auto member) {
        const double top = (1 - vx.t) * (a.*member) + vx.t * (b.*member);
        const double bottom = (1 - vx.t) * (c.*member) + vx.t * (d.*member);
        return to_byte((1 - vy.t) * top + vy.t * bottom);
      };
      out.at(x, y) = {mix(&Rgb::r), mix(&Rgb::g), mix(&Rgb::b)};
    }
  }
  return out;
}

std::vector<double> resize_plane(std::span<const double> plane, int width,
                                 int height, int out_width, int out_height) {
  if (plane.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorKind::InvalidInput, "plane size does not match dimensions");
  }
  if (width == out_width && height == out_height) {
    return {plane.begin(), plane.end()};
  }
  std::vector<double> out(static_cast<std::size_t>(out_width) * out_height);
  const auto tx = taps(width, out_width);
  const auto ty = taps(height, out_height);
  for (int y = 0; y < out_height; ++y) {
    const Tap& vy = ty[y];
    for (int x = 0; x < out_width; ++x) {
      const Tap& vx = tx[x];
      auto px = [&](int xi, int yi) {
        return plane[static_cast<std::size_t>(yi) * width + xi];
      };
      const double top = (1 - vx.t) * px(vx.i0, vy.i0) + vx.t * px(vx.i1, vy.i0);
      const double bottom =
          (1 - vx.t) * px(vx.i0, vy.i1) + vx.t * px(vx.i1, vy.i1);
      out[static_cast<std::size_t>(y) * out_width + x] =
          (1 - vy.t) * top + vy.t * bottom;
    }
  }
  return out;
}

}  // namespace psiart
