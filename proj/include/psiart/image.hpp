#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psiart {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int area() const { return w * h; }
  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool overlaps(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Row-major 8-bit RGB raster. Width and height are always >= 1.
class RasterImage {
 public:
  RasterImage(int width, int height, Rgb fill = {});
  RasterImage(int width, int height, std::vector<Rgb> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const Rgb> pixels() const { return pixels_; }
  std::span<Rgb> pixels() { return pixels_; }

  RasterImage crop(const Rect& r) const;
  void paste(const RasterImage& src, int x, int y);

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

// ITU-R BT.601 luma on the 0..255 scale.
inline double luma(Rgb p) {
  return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
}

// Per-pixel luma, row-major, 0..255.
std::vector<double> grayscale(const RasterImage& img);

// Bilinear resampling with pixel-centre alignment. Same-size resampling is the
// identity.
RasterImage resize_bilinear(const RasterImage& img, int width, int height);

// Bilinear resampling of a single-channel plane.
std::vector<double> resize_plane(std::span<const double> plane, int width,
                                 int height, int out_width, int out_height);

}  // namespace psiart
