#include "psiart/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "psiart/error.hpp"

namespace psiart {

// --- Rng -----------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  // xoshiro256**
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) return 0;
  // Rejection sampling keeps the sequence portable and unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return static_cast<std::size_t>(v % n);
}

// --- config --------------------------------------------------------------------

void SomConfig::validate() const {
  auto bad = [](const std::string& what) {
    fail(ErrorKind::InvalidInput, "SomConfig: " + what);
  };
  if (grid_w < 1 || grid_h < 1 || grid_w * grid_h < 4) bad("grid must have >= 4 units");
  if (dim < 1) bad("dim must be >= 1");
  if (epochs < 1) bad("epochs must be >= 1");
  if (!(lr0 > 0.0 && lr0 <= 1.0)) bad("lr0 must be in (0, 1]");
  if (!(lr_final > 0.0 && lr_final <= lr0)) bad("lr_final must be in (0, lr0]");
  if (!(nbhd_final >= 0.0 && nbhd_final <= nbhd0)) bad("nbhd_final must be in [0, nbhd0]");
}

// --- Som -----------------------------------------------------------------------

Som::Som(SomConfig config, std::vector<double> weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  if (weights_.size() != static_cast<std::size_t>(units()) * config_.dim) {
    fail(ErrorKind::InvalidInput, "SOM weight array has wrong length");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) fail(ErrorKind::InvalidInput, "non-finite SOM weight");
  }
}

std::span<const double> Som::weight(int unit) const {
  return std::span<const double>(weights_).subspan(
      static_cast<std::size_t>(unit) * config_.dim, config_.dim);
}

int Som::grid_distance(int a, int b) const {
  return std::max(std::abs(unit_x(a) - unit_x(b)), std::abs(unit_y(a) - unit_y(b)));
}

namespace {

void check_samples(std::span<const Sample> samples, int dim) {
  if (samples.empty()) fail(ErrorKind::InvalidInput, "no training samples");
  for (const auto& s : samples) {
    if (static_cast<int>(s.size()) != dim) {
      fail(ErrorKind::InvalidInput,
           "sample length " + std::to_string(s.size()) + " != dim " + std::to_string(dim));
    }
  }
}

double decay(double start, double end, double frac) {
  return start * std::pow(end / start, frac);
}

}  // namespace

Som som_init(std::span<const Sample> samples, const SomConfig& config) {
  config.validate();
  check_samples(samples, config.dim);
  std::vector<double> lo(samples.front()), hi(samples.front());
  for (const auto& s : samples) {
    for (int d = 0; d < config.dim; ++d) {
      lo[d] = std::min(lo[d], s[d]);
      hi[d] = std::max(hi[d], s[d]);
    }
  }
  Rng rng(config.seed);
  const int units = config.grid_w * config.grid_h;
  std::vector<double> weights(static_cast<std::size_t>(units) * config.dim);
  for (int u = 0; u < units; ++u) {
    for (int d = 0; d < config.dim; ++d) {
      weights[static_cast<std::size_t>(u) * config.dim + d] =
          lo[d] + (hi[d] - lo[d]) * rng.uniform();
    }
  }
  Som som(config, std::move(weights));
  som.initial_qe = quantization_error(som, samples);
  som.final_qe = som.initial_qe;
  return som;
}

Som som_train(std::span<const Sample> samples, const SomConfig& config) {
  Som init = som_init(samples, config);
  std::vector<double> w = init.weights();
  const int units = init.units();
  const int dim = config.dim;

  // Separate stream for ordering so init and shuffling never interfere.
  Rng rng(config.seed ^ 0xA5A5A5A5DEADBEEFULL);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  const std::uint64_t total =
      static_cast<std::uint64_t>(config.epochs) * samples.size();
  // Exponential decay needs a positive floor.
  const double nbhd_end = std::max(config.nbhd_final, 1e-6);
  const double nbhd_start = std::max(config.nbhd0, nbhd_end);

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::size_t idx : order) {
      const Sample& x = samples[idx];
      const double frac =
          total > 1 ? static_cast<double>(t) / static_cast<double>(total - 1) : 1.0;
      const double lr = decay(config.lr0, config.lr_final, frac);
      const double nbhd = decay(nbhd_start, nbhd_end, frac);

      int bmu = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int u = 0; u < units; ++u) {
        double d2 = 0.0;
        const double* wu = &w[static_cast<std::size_t>(u) * dim];
        for (int d = 0; d < dim; ++d) {
          const double diff = x[d] - wu[d];
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          bmu = u;
        }
      }
      const int bx = bmu % config.grid_w;
      const int by = bmu / config.grid_w;
      const double denom = 2.0 * nbhd * nbhd;
      for (int u = 0; u < units; ++u) {
        const int dx = u % config.grid_w - bx;
        const int dy = u / config.grid_w - by;
        const double h = std::exp(-static_cast<double>(dx * dx + dy * dy) / denom);
        const double step = lr * h;
        if (step < 1e-12) continue;
        double* wu = &w[static_cast<std::size_t>(u) * dim];
        for (int d = 0; d < dim; ++d) wu[d] += step * (x[d] - wu[d]);
      }
      ++t;
    }
  }

  Som som(config, std::move(w));
  som.trained_samples = t;
  som.initial_qe = init.initial_qe;
  som.final_qe = quantization_error(som, samples);
  return som;
}

BestMatch som_bmu(const Som& som, std::span<const double> x) {
  if (static_cast<int>(x.size()) != som.dim()) {
    fail(ErrorKind::InvalidInput, "query length " + std::to_string(x.size()) +
                                      " != SOM dim " + std::to_string(som.dim()));
  }
  BestMatch best{0, std::numeric_limits<double>::infinity()};
  for (int u = 0; u < som.units(); ++u) {
    const auto wu = som.weight(u);
    double d2 = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = x[d] - wu[d];
      d2 += diff * diff;
    }
    if (d2 < best.distance) best = {u, d2};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

std::vector<int> som_neighborhood(const Som& som, int unit, int radius) {
  if (unit < 0 || unit >= som.units()) {
    fail(ErrorKind::InvalidInput, "unit index out of range: " + std::to_string(unit));
  }
  if (radius < 0) fail(ErrorKind::InvalidInput, "radius must be >= 0");
  std::vector<std::pair<int, int>> hits;
  for (int u = 0; u < som.units(); ++u) {
    const int d = som.grid_distance(unit, u);
    if (d <= radius) hits.emplace_back(d, u);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<int> out;
  out.reserve(hits.size());
  for (const auto& [d, u] : hits) out.push_back(u);
  return out;
}

double quantization_error(const Som& som, std::span<const Sample> samples) {
  if (samples.empty()) fail(ErrorKind::InvalidInput, "no samples for quantization error");
  double total = 0.0;
  for (const auto& s : samples) total += som_bmu(som, s).distance;
  return total / static_cast<double>(samples.size());
}

}  // namespace psiart
