#include <doctest.h>

#include "psiart/error.hpp"
#include "psiart/render.hpp"
#include "test_support.hpp"

using namespace psiart;

namespace {

DomainMemory faces_of(const std::vector<RasterImage>& imgs) {
  std::vector<SourceImage> src;
  for (std::size_t i = 0; i < imgs.size(); ++i) src.push_back({std::to_string(i), imgs[i]});
  MemoryConfig cfg;
  cfg.domain_som.epochs = 2;
  return build_domain("faces", extract_patches("faces", src, CropPolicy::whole_image()), cfg);
}

RasterImage ramp(int w, int h) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = static_cast<std::uint8_t>(x * 255 / (w - 1));
      img.at(x, y) = {v, v, v};
    }
  }
  return img;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("template of identical faces is that face resampled") {
  const auto f = fixtures::face(4, 64);
  const auto t = build_face_template(faces_of(std::vector<RasterImage>(5, f)));
  const auto g = grayscale(f);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(t.luminance[i] == doctest::Approx(g[i]).epsilon(1e-12));
}

TEST_CASE("black and white faces average to mid gray") {
  std::vector<RasterImage> imgs;
  for (int i = 0; i < 6; ++i) imgs.push_back(RasterImage(32, 32, i % 2 ? Rgb{255, 255, 255} : Rgb{0, 0, 0}));
  const auto t = build_face_template(faces_of(imgs));
  CHECK(t.width == 64);
  for (double v : t.luminance) CHECK(v == doctest::Approx(127.5));
}

TEST_CASE("template equals the per-pixel mean oracle") {
  const auto& dm = *test::corpus_memory().domain("faces");
  const auto& t = test::corpus_face();
  std::vector<double> mean(64 * 64, 0.0);
  for (const auto& e : dm.entries) {
    const auto g = grayscale(e.image);  // fixture faces are already 64x64
    for (std::size_t i = 0; i < g.size(); ++i) mean[i] += g[i] / 30.0;
  }
  for (std::size_t i = 0; i < mean.size(); ++i) CHECK(t.luminance[i] == doctest::Approx(mean[i]).epsilon(1e-9));
}

TEST_CASE("too few faces is InsufficientData") {
  try {
    build_face_template(faces_of(std::vector<RasterImage>(4, fixtures::face(1))));
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("two-colour image survives a lossless execution") {
  RasterImage img(20, 12, {10, 20, 30});
  for (int x = 0; x < 10; ++x) img.at(x, 5) = {200, 100, 0};
  const auto out = execute(img, {2, BrushShape::Dot, 1, 9});
  CHECK(out == img);
  CHECK(internal_eval(out, img).score == 1.0);
}

TEST_CASE("palette bound on a ramp") {
  const auto img = ramp(64, 16);
  const auto out = execute(img, {2, BrushShape::Dot, 1, 3});
  CHECK(distinct_colors(out) == 2);
  for (auto brush : {BrushShape::Dot, BrushShape::Square, BrushShape::Stroke}) {
    for (int k : {2, 3, 5, 8}) {
      for (int r : {1, 2, 3}) CHECK(distinct_colors(execute(img, {k, brush, r, 1})) <= static_cast<std::size_t>(k));
    }
  }
}

TEST_CASE("execution is deterministic") {
  const auto& img = test::corpus().input;
  const ExecutionConfig cfg{6, BrushShape::Stroke, 3, 77};
  CHECK(execute(img, cfg) == execute(img, cfg));
}

TEST_CASE("identity limit as palette and brush shrink") {
  const auto img = fixtures::face(2, 32);
  const auto k = static_cast<int>(distinct_colors(img));
  const auto out = execute(img, {k, BrushShape::Dot, 1, 1});
  CHECK(out == img);
  CHECK(internal_eval(out, img).score == 1.0);
  const double coarse = internal_eval(execute(img, {4, BrushShape::Square, 3, 1}), img).score;
  CHECK(coarse < 1.0);
}

TEST_CASE("internal evaluation") {
  const auto img = fixtures::face(3, 64);
  const auto self = internal_eval(img, img);
  CHECK(self.score == 1.0);
  CHECK(self.pass);
  RasterImage inv = img;
  for (auto& p : inv.pixels()) p = {static_cast<std::uint8_t>(255 - p.r), static_cast<std::uint8_t>(255 - p.g),
                                    static_cast<std::uint8_t>(255 - p.b)};
  CHECK(internal_eval(inv, img).score < self.score);

  // Oracle recomputing both terms.
  const auto exec = execute(img, {3, BrushShape::Square, 2, 5});
  const auto ha = color_histogram(exec, ColorSpace::HSV), hb = color_histogram(img, ColorSpace::HSV);
  double l1 = 0;
  for (int i = 0; i < 30; ++i) l1 += std::abs(ha.bins[i] - hb.bins[i]);
  double lum = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) lum += std::abs(luma(exec.at(x, y)) - luma(img.at(x, y)));
  }
  lum /= 64 * 64;
  const double want = 1.0 - (0.5 * l1 / 6.0 + 0.5 * lum / 255.0);
  CHECK(internal_eval(exec, img).score == doctest::Approx(want).epsilon(1e-12));
  CHECK(internal_eval(exec, img).score == internal_eval(img, exec).score);
  CHECK_THROWS_AS(internal_eval(img, RasterImage(10, 10)), Error);
}

TEST_CASE("execution config validation") {
  CHECK_THROWS_AS(execute(RasterImage(4, 4), {1, BrushShape::Dot, 1, 0}), Error);
  CHECK_THROWS_AS(execute(RasterImage(4, 4), {2, BrushShape::Dot, 0, 0}), Error);
  CHECK(brush_from_string("stroke") == BrushShape::Stroke);
  CHECK_THROWS_AS(brush_from_string("sponge"), Error);
}

}  // TEST_SUITE
