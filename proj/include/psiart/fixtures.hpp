#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "psiart/config.hpp"
#include "psiart/image.hpp"
#include "psiart/memory.hpp"

namespace psiart::fixtures {

// Procedurally drawn test imagery, fully determined by the seed.
RasterImage face(std::uint64_t seed, int size = 64);
RasterImage flower_bed(std::uint64_t seed, int size = 128);
RasterImage leaves(std::uint64_t seed, int size = 128);
RasterImage noise(std::uint64_t seed, int width, int height);

// The face used by `create --sample` and POST /sessions with use_sample.
RasterImage sample_input();

struct Corpus {
  std::vector<std::pair<std::string, std::vector<SourceImage>>> domains;
  RasterImage input{1, 1};
};

// 30 faces (64x64), 2 flower beds and 2 leaf images (128x128, 40 grid patches
// each with the default crop policy) plus the sample input.
Corpus corpus();

// Writes <dir>/datasets/<domain>/<name>.png and <dir>/input.png.
void write_corpus(const Corpus& c, const std::filesystem::path& dir);

std::vector<DomainMemory> ingest_corpus(const Corpus& c, const EngineConfig& config);

// Memory whose "flowers" domain also holds aligned grid crops of the input at
// every quadtree scale, so each region has an exact co-located match.
AssociativeMemory tac_friendly_memory(const Corpus& c, const EngineConfig& config);

// Faces plus target domains with no entries at all.
AssociativeMemory adversarial_memory(const Corpus& c, const EngineConfig& config);

}  // namespace psiart::fixtures
