#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "psiart/error.hpp"
#include "psiart/som.hpp"

using namespace psiart;

namespace {

std::vector<Sample> clusters(Rng& rng, int per_cluster) {
  const double centres[4][2] = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  std::vector<Sample> out;
  for (const auto& c : centres) {
    for (int i = 0; i < per_cluster; ++i) {
      // Box-Muller, sigma 0.5.
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      const double r = 0.5 * std::sqrt(-2 * std::log(u1));
      out.push_back({c[0] + r * std::cos(2 * M_PI * u2), c[1] + r * std::sin(2 * M_PI * u2)});
    }
  }
  return out;
}

BestMatch linear_scan(const Som& som, std::span<const double> x) {
  BestMatch best{-1, 0};
  for (int u = 0; u < som.units(); ++u) {
    double d = 0;
    for (int i = 0; i < som.dim(); ++i) d += (x[i] - som.weight(u)[i]) * (x[i] - som.weight(u)[i]);
    d = std::sqrt(d);
    if (best.unit < 0 || d < best.distance) best = {u, d};
  }
  return best;
}

SomConfig grid(int w, int h, int dim, std::uint64_t seed = 1) {
  SomConfig c;
  c.grid_w = w;
  c.grid_h = h;
  c.dim = dim;
  c.seed = seed;
  c.epochs = 20;
  c.nbhd0 = std::max(w, h) / 2.0;
  return c;
}

}  // namespace

TEST_SUITE("som") {

TEST_CASE("config validation") {
  SomConfig c = grid(1, 3, 2);
  CHECK_THROWS_AS(c.validate(), Error);
  c = grid(2, 2, 2);
  c.lr_final = 0.9;
  CHECK_THROWS_AS(c.validate(), Error);
  c = grid(2, 2, 2);
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_NOTHROW(grid(2, 2, 2).validate());
}

TEST_CASE("training rejects bad input") {
  std::vector<Sample> none;
  CHECK_THROWS_AS(som_train(none, grid(4, 4, 2)), Error);
  std::vector<Sample> bad{{1, 2, 3}};
  CHECK_THROWS_AS(som_train(bad, grid(4, 4, 2)), Error);
}

TEST_CASE("single sample becomes a single attractor") {
  SomConfig c = grid(4, 4, 3);
  c.epochs = 400;
  c.nbhd_final = 0.01;
  std::vector<Sample> one{{0.3, -1.2, 4.0}};
  const Som som = som_train(one, c);
  for (int u = 0; u < som.units(); ++u) {
    double d = 0;
    for (int i = 0; i < 3; ++i) d += std::pow(som.weight(u)[i] - one[0][i], 2);
    CHECK(std::sqrt(d) < 1e-3);
  }
  CHECK(som_bmu(som, one[0]).distance < 1e-3);
}

TEST_CASE("training lowers quantization error on clustered data") {
  Rng rng(7);
  const auto data = clusters(rng, 25);
  SomConfig c = grid(8, 8, 2, 3);
  const double before = quantization_error(som_init(data, c), data);
  const Som som = som_train(data, c);
  CHECK(som.final_qe < before);
  CHECK(som.initial_qe == doctest::Approx(before));
  CHECK(som.trained_samples == data.size() * c.epochs);
}

TEST_CASE("identical seeds give byte-identical weights") {
  Rng rng(9);
  const auto data = clusters(rng, 10);
  const Som a = som_train(data, grid(5, 5, 2, 42));
  const Som b = som_train(data, grid(5, 5, 2, 42));
  REQUIRE(a.weights().size() == b.weights().size());
  CHECK(std::memcmp(a.weights().data(), b.weights().data(), a.weights().size() * 8) == 0);
  const Som c = som_train(data, grid(5, 5, 2, 43));
  CHECK(a.weights() != c.weights());
}

TEST_CASE("initial weights lie inside the data bounding box") {
  std::vector<Sample> data{{0, 10}, {2, 12}, {1, 11}};
  const Som som = som_init(data, grid(6, 6, 2));
  for (int u = 0; u < som.units(); ++u) {
    CHECK(som.weight(u)[0] >= 0);
    CHECK(som.weight(u)[0] <= 2);
    CHECK(som.weight(u)[1] >= 10);
    CHECK(som.weight(u)[1] <= 12);
  }
}

TEST_CASE("bmu of a unit weight is that unit") {
  Rng rng(1);
  const Som som = som_train(clusters(rng, 5), grid(6, 4, 2));
  for (int u = 0; u < som.units(); ++u) {
    const auto w = som.weight(u);
    const auto m = som_bmu(som, std::vector<double>(w.begin(), w.end()));
    CHECK(m.distance == 0.0);
    CHECK(som.weight(m.unit)[0] == w[0]);
    CHECK(som.weight(m.unit)[1] == w[1]);
  }
}

TEST_CASE("ties go to the lowest unit index") {
  SomConfig c = grid(2, 2, 1);
  const Som som(c, {0.0, 2.0, 2.0, 5.0});
  CHECK(som_bmu(som, std::vector<double>{1.0}).unit == 0);
  CHECK(som_bmu(som, std::vector<double>{2.0}).unit == 1);
  CHECK_THROWS_AS(som_bmu(som, std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("bmu matches linear scan on random queries") {
  Rng rng(13);
  const Som som = som_train(clusters(rng, 20), grid(8, 8, 2));
  for (int q = 0; q < 500; ++q) {
    const std::vector<double> x{rng.uniform() * 14 - 2, rng.uniform() * 14 - 2};
    const auto got = som_bmu(som, x);
    const auto want = linear_scan(som, x);
    CHECK(got.unit == want.unit);
    CHECK(got.distance == doctest::Approx(want.distance).epsilon(1e-12));
  }
}

TEST_CASE("neighborhood enumeration") {
  const Som som(grid(5, 5, 1), std::vector<double>(25, 0.0));
  CHECK(som_neighborhood(som, 7, 0) == std::vector<int>{7});
  CHECK(som_neighborhood(som, 12, 1).size() == 9);
  const auto corner = som_neighborhood(som, 0, 2);
  CHECK(corner.size() == 9);
  std::set<int> want;
  for (int y = 0; y <= 2; ++y) {
    for (int x = 0; x <= 2; ++x) want.insert(y * 5 + x);
  }
  CHECK(std::set<int>(corner.begin(), corner.end()) == want);
  CHECK(corner.front() == 0);
  CHECK_THROWS_AS(som_neighborhood(som, 25, 1), Error);
  CHECK_THROWS_AS(som_neighborhood(som, 0, -1), Error);
}

TEST_CASE("neighborhoods nest and are ordered by distance") {
  const Som som(grid(6, 4, 1), std::vector<double>(24, 0.0));
  for (int u = 0; u < som.units(); ++u) {
    for (int r = 0; r < 6; ++r) {
      const auto inner = som_neighborhood(som, u, r);
      const auto outer = som_neighborhood(som, u, r + 1);
      const std::set<int> o(outer.begin(), outer.end());
      for (int v : inner) CHECK(o.contains(v));
      for (std::size_t i = 1; i < outer.size(); ++i) {
        const int da = som.grid_distance(u, outer[i - 1]), db = som.grid_distance(u, outer[i]);
        CHECK((da < db || (da == db && outer[i - 1] < outer[i])));
      }
    }
    CHECK(som_neighborhood(som, u, som.diameter()).size() == 24);
  }
}

TEST_CASE("quantization error") {
  const Som som(grid(2, 2, 2), {0, 0, 1, 0, 0, 1, 1, 1});
  std::vector<Sample> units{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  CHECK(quantization_error(som, units) == 0.0);
  std::vector<Sample> off{{3, 1}};
  CHECK(quantization_error(som, off) == doctest::Approx(2.0));
  std::vector<Sample> mix{{0.5, 0}, {2, 2}, {-1, 0}};
  CHECK(quantization_error(som, mix) ==
        doctest::Approx((0.5 + std::sqrt(2.0) + 1.0) / 3.0).epsilon(1e-12));
  std::vector<Sample> none;
  CHECK_THROWS_AS(quantization_error(som, none), Error);
}

TEST_CASE("rng sequence is fixed") {
  Rng a(123), b(123);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
}

}  // TEST_SUITE
