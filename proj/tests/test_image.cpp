#include <doctest.h>

#include <fstream>

#include "psiart/error.hpp"
#include "psiart/image.hpp"
#include "psiart/image_io.hpp"
#include "test_support.hpp"

using namespace psiart;

TEST_SUITE("image") {

TEST_CASE("construction validates dimensions") {
  CHECK_THROWS_AS(RasterImage(0, 3), Error);
  CHECK_THROWS_AS(RasterImage(2, 2, std::vector<Rgb>(3)), Error);
  RasterImage img(3, 2, {1, 2, 3});
  CHECK(img.size() == 6);
  CHECK(img.at(2, 1) == Rgb{1, 2, 3});
}

TEST_CASE("crop and paste round trip") {
  Rng rng(1);
  const auto img = test::random_image(rng, 10, 8);
  const auto c = img.crop({2, 3, 4, 5});
  CHECK(c.width() == 4);
  CHECK(c.at(0, 0) == img.at(2, 3));
  RasterImage copy(10, 8);
  copy.paste(img, 0, 0);
  CHECK(copy == img);
  CHECK_THROWS_AS(img.crop({8, 0, 4, 2}), Error);
}

TEST_CASE("same-size bilinear resize is the identity") {
  Rng rng(2);
  const auto img = test::random_image(rng, 9, 7);
  CHECK(resize_bilinear(img, 9, 7) == img);
  const auto big = resize_bilinear(RasterImage(2, 2, {40, 50, 60}), 7, 5);
  for (const auto& p : big.pixels()) CHECK(p == Rgb{40, 50, 60});
}

TEST_CASE("grayscale uses BT.601 luma") {
  const auto g = grayscale(RasterImage(1, 1, {255, 0, 0}));
  CHECK(g[0] == doctest::Approx(0.299 * 255));
}

TEST_CASE("png and ppm round trip") {
  test::TempDir dir("io");
  Rng rng(3);
  const auto img = test::random_image(rng, 13, 6);
  write_png(dir.path() / "a.png", img);
  write_ppm(dir.path() / "a.ppm", img);
  CHECK(decode_image(dir.path() / "a.png") == img);
  CHECK(decode_image(dir.path() / "a.ppm") == img);
  CHECK(is_image_file(dir.path() / "a.png"));
  CHECK(decode_image_bytes(encode_png(img)) == img);
}

TEST_CASE("format is sniffed from content, not extension") {
  test::TempDir dir("sniff");
  const RasterImage img(4, 4, {9, 8, 7});
  write_png(dir.path() / "disguised.jpg", img);
  CHECK(decode_image(dir.path() / "disguised.jpg") == img);
}

TEST_CASE("undecodable or missing input is rejected") {
  test::TempDir dir("bad");
  {
    std::ofstream(dir.path() / "x.png") << "not an image";
  }
  try {
    decode_image(dir.path() / "x.png");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
  try {
    decode_image(dir.path() / "missing.png");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
  auto bytes = encode_png(RasterImage(8, 8));
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_image_bytes(bytes), Error);
}

}  // TEST_SUITE
