#include "psiart/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psiart/error.hpp"
#include "psiart/image_io.hpp"
#include "psiart/som.hpp"

namespace psiart::fixtures {

namespace {

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb jitter(Rng& rng, Rgb c, double amount) {
  auto j = [&](std::uint8_t v) { return to_byte(v + (rng.uniform() * 2 - 1) * amount); };
  return {j(c.r), j(c.g), j(c.b)};
}

void fill_ellipse(RasterImage& img, double cx, double cy, double rx, double ry, Rgb c,
                  double angle = 0.0) {
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double reach = std::max(rx, ry);
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cx + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(cy + reach)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double u = (dx * ca + dy * sa) / rx, v = (-dx * sa + dy * ca) / ry;
      if (u * u + v * v <= 1.0) img.at(x, y) = c;
    }
  }
}

void add_grain(RasterImage& img, Rng& rng, double amount) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) img.at(x, y) = jitter(rng, img.at(x, y), amount);
  }
}

}  // namespace

RasterImage face(std::uint64_t seed, int size) {
  if (size < 16) fail(ErrorKind::InvalidInput, "fixture face needs size >= 16");
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 1);
  const double s = size / 64.0;
  auto j = [&](double v, double amount) { return (v + (rng.uniform() * 2 - 1) * amount) * s; };

  RasterImage img(size, size, jitter(rng, {70, 90, 120}, 25));
  const Rgb skin = jitter(rng, {215, 170, 140}, 20);
  const Rgb hair = jitter(rng, {60, 40, 25}, 15);
  const double cx = j(32, 1.5), cy = j(34, 1.5);
  fill_ellipse(img, cx, cy - 8 * s, j(21, 1), j(20, 1), hair);
  fill_ellipse(img, cx, cy, j(18, 1), j(23, 1), skin);
  const Rgb eye{30, 25, 25};
  const double eye_y = cy - j(5, 0.7);
  fill_ellipse(img, cx - j(7, 0.6), eye_y, 3.2 * s, 2.2 * s, eye);
  fill_ellipse(img, cx + j(7, 0.6), eye_y, 3.2 * s, 2.2 * s, eye);
  fill_ellipse(img, cx, cy + 3 * s, 1.6 * s, 4.5 * s, {185, 140, 115});
  fill_ellipse(img, cx, cy + j(12, 0.6), j(7, 0.8), 2.0 * s, {150, 60, 60});
  add_grain(img, rng, 6);
  return img;
}

RasterImage flower_bed(std::uint64_t seed, int size) {
  Rng rng(seed * 0xD1B54A32D192ED03ULL + 3);
  RasterImage img(size, size, {60, 120, 50});
  add_grain(img, rng, 20);
  static constexpr Rgb petals[] = {
      {220, 40, 50}, {240, 210, 40}, {150, 60, 180}, {240, 140, 180}, {245, 245, 240}};
  const int count = size * size / 180;
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform() * size, y = rng.uniform() * size;
    const double r = 3 + rng.uniform() * 6;
    fill_ellipse(img, x, y, r, r, jitter(rng, petals[rng.below(5)], 15));
    fill_ellipse(img, x, y, r * 0.35, r * 0.35, jitter(rng, {200, 150, 30}, 15));
  }
  return img;
}

RasterImage leaves(std::uint64_t seed, int size) {
  Rng rng(seed * 0x94D049BB133111EBULL + 5);
  RasterImage img(size, size, {40, 60, 30});
  static constexpr Rgb greens[] = {{50, 110, 40}, {90, 150, 60}, {130, 170, 70}, {170, 140, 50}};
  const int count = size * size / 90;
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform() * size, y = rng.uniform() * size;
    const double len = 5 + rng.uniform() * 8;
    fill_ellipse(img, x, y, len, len * 0.4, jitter(rng, greens[rng.below(4)], 12),
                 rng.uniform() * 3.14159265358979);
  }
  add_grain(img, rng, 8);
  return img;
}

RasterImage noise(std::uint64_t seed, int width, int height) {
  Rng rng(seed);
  RasterImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(x, y) = {static_cast<std::uint8_t>(rng.below(256)),
                      static_cast<std::uint8_t>(rng.below(256)),
                      static_cast<std::uint8_t>(rng.below(256))};
    }
  }
  return img;
}

RasterImage sample_input() { return face(1000, 128); }

Corpus corpus() {
  Corpus c;
  std::vector<SourceImage> faces;
  for (int i = 0; i < 30; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "face_%02d.png", i);
    faces.push_back({name, face(static_cast<std::uint64_t>(i) + 1)});
  }
  c.domains.emplace_back("faces", std::move(faces));
  c.domains.emplace_back("flowers", std::vector<SourceImage>{{"bed_0.png", flower_bed(1)},
                                                             {"bed_1.png", flower_bed(2)}});
  c.domains.emplace_back("leaves", std::vector<SourceImage>{{"leaves_0.png", leaves(1)},
                                                            {"leaves_1.png", leaves(2)}});
  c.input = sample_input();
  return c;
}

void write_corpus(const Corpus& c, const std::filesystem::path& dir) {
  for (const auto& [domain, images] : c.domains) {
    const auto sub = dir / "datasets" / domain;
    std::filesystem::create_directories(sub);
    for (const auto& img : images) write_png(sub / img.name, img.image);
  }
  write_png(dir / "input.png", c.input);
}

std::vector<DomainMemory> ingest_corpus(const Corpus& c, const EngineConfig& config) {
  std::vector<DomainMemory> out;
  for (const auto& [domain, images] : c.domains) {
    out.push_back(ingest_domain(domain, images, config.crop_policy(domain), config.memory));
  }
  return out;
}

AssociativeMemory tac_friendly_memory(const Corpus& c, const EngineConfig& config) {
  std::vector<DomainMemory> domains;
  for (const auto& [domain, images] : c.domains) {
    if (domain == "flowers") {
      auto entries = extract_patches(domain, images, config.crop_policy(domain));
      auto tiles = extract_patches(domain, {{"input.png", c.input}},
                                   CropPolicy{false, {1, 2, 4, 8, 16}});
      entries.insert(entries.end(), std::make_move_iterator(tiles.begin()),
                     std::make_move_iterator(tiles.end()));
      for (std::size_t i = 0; i < entries.size(); ++i) {
        char id[64];
        std::snprintf(id, sizeof id, "%s-%05zu", domain.c_str(), i);
        entries[i].id = id;
      }
      domains.push_back(build_domain(domain, std::move(entries), config.memory));
    } else {
      domains.push_back(ingest_domain(domain, images, config.crop_policy(domain), config.memory));
    }
  }
  return build_memory(std::move(domains), config.memory);
}

AssociativeMemory adversarial_memory(const Corpus& c, const EngineConfig& config) {
  std::vector<DomainMemory> domains;
  for (const auto& [domain, images] : c.domains) {
    if (domain == config.face_domain) {
      domains.push_back(ingest_domain(domain, images, config.crop_policy(domain), config.memory));
    }
  }
  domains.push_back(build_domain("void_a", {}, config.memory));
  domains.push_back(build_domain("void_b", {}, config.memory));
  return build_memory(std::move(domains), config.memory);
}

}  // namespace psiart::fixtures
