#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace psiart {

struct SomConfig {
  int grid_w = 8;
  int grid_h = 8;
  int dim = 1;
  int epochs = 50;
  double lr0 = 0.5;
  double lr_final = 0.01;
  double nbhd0 = 4.0;
  double nbhd_final = 0.5;
  std::uint64_t seed = 1;

  // Throws Error(InvalidInput) when an invariant is violated.
  void validate() const;
};

struct BestMatch {
  int unit = 0;
  double distance = 0.0;
};

// A trained (or freshly initialised) map. Immutable once built; queries are
// safe from any number of threads.
class Som {
 public:
  Som(SomConfig config, std::vector<double> weights);

  const SomConfig& config() const { return config_; }
  int units() const { return config_.grid_w * config_.grid_h; }
  int dim() const { return config_.dim; }
  std::span<const double> weight(int unit) const;
  const std::vector<double>& weights() const { return weights_; }

  int unit_x(int unit) const { return unit % config_.grid_w; }
  int unit_y(int unit) const { return unit / config_.grid_w; }
  int grid_distance(int a, int b) const;  // Chebyshev
  // Largest Chebyshev distance on the grid.
  int diameter() const { return std::max(config_.grid_w, config_.grid_h) - 1; }

  std::uint64_t trained_samples = 0;
  double initial_qe = 0.0;
  double final_qe = 0.0;

 private:
  SomConfig config_;
  std::vector<double> weights_;  // row-major by unit, dim values each
};

using Sample = std::vector<double>;

// Untrained map: weights drawn uniformly inside the per-dimension bounding box
// of the samples with the config's seed.
Som som_init(std::span<const Sample> samples, const SomConfig& config);

// Online Kohonen training with exponentially decaying learning rate and
// Gaussian neighbourhood; the sample order is reshuffled every epoch.
Som som_train(std::span<const Sample> samples, const SomConfig& config);

// Euclidean best-matching unit; ties go to the lowest unit index.
BestMatch som_bmu(const Som& som, std::span<const double> x);

// Units within Chebyshev distance `radius`, ordered by (distance, index).
std::vector<int> som_neighborhood(const Som& som, int unit, int radius);

double quantization_error(const Som& som, std::span<const Sample> samples);

// splitmix64-seeded xoshiro-style generator with a fixed, portable output
// sequence (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();                       // [0, 1)
  std::size_t below(std::size_t n);       // [0, n)

 private:
  std::uint64_t s_[4];
};

}  // namespace psiart
