#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psiart/image.hpp"
#include "psiart/imagefeat.hpp"
#include "psiart/som.hpp"

namespace psiart {

struct PatchEntry {
  std::string id;
  std::string domain;
  RasterImage image{1, 1};
  FeatureBundle features;
  std::string source;  // "<file>@x,y,w,h"
  Rect crop;
  int canvas_w = 1;
  int canvas_h = 1;

  bool is_whole_image() const {
    return crop.x == 0 && crop.y == 0 && crop.w == canvas_w && crop.h == canvas_h;
  }
};

// How source images are cut into patches. Grid divisors d produce square crops
// of side min(w, h) / d tiled across the image.
struct CropPolicy {
  bool whole = false;
  std::vector<int> grid_divisors{2, 4};

  static CropPolicy grid() { return {}; }
  static CropPolicy whole_image() { return {true, {}}; }
};

struct SourceImage {
  std::string name;
  RasterImage image;
};

struct MemoryConfig {
  SomConfig domain_som{8, 8, 1, 50, 0.5, 0.01, 4.0, 0.5, 17};
  SomConfig hub_som{16, 16, 3, 50, 0.5, 0.01, 8.0, 0.5, 29};
  int min_entries = 20;
  // Per-descriptor weights on the detail vector (rgb, hsv, lab, gabor, haar).
  std::array<double, 5> detail_weights{1, 1, 1, 1, 1};
};

std::vector<double> weighted_detail(const FeatureBundle& f,
                                    const std::array<double, 5>& weights);
double detail_distance(const FeatureBundle& a, const FeatureBundle& b,
                       const std::array<double, 5>& weights = {1, 1, 1, 1, 1});

// Per-domain long-term store: the patches plus one SOM per descriptor kind.
struct DomainMemory {
  std::string name;
  std::vector<PatchEntry> entries;
  std::vector<Som> feature_soms;  // indexed by DescriptorKind, empty when no entries
  // unit_index[kind][unit] -> entry positions in `entries`, ascending.
  std::array<std::vector<std::vector<std::size_t>>, 5> unit_index;

  const Som& som(DescriptorKind k) const { return feature_soms.at(static_cast<int>(k)); }
  const PatchEntry* find(std::string_view id) const;
  bool empty() const { return entries.empty(); }
};

// Cuts patches according to the policy. Patch ids are "<domain>-NNNNN" in
// ingestion order.
std::vector<PatchEntry> extract_patches(std::string_view domain,
                                        const std::vector<SourceImage>& images,
                                        const CropPolicy& policy);

// Builds feature SOMs and the unit index over ready-made entries.
DomainMemory build_domain(std::string name, std::vector<PatchEntry> entries,
                          const MemoryConfig& config);

DomainMemory ingest_domain(std::string name, const std::vector<SourceImage>& images,
                           const CropPolicy& policy, const MemoryConfig& config);

const PatchEntry& recall_within_domain(const DomainMemory& dm, const FeatureBundle& query,
                                       DescriptorKind kind,
                                       const std::array<double, 5>& weights = {1, 1, 1, 1, 1});

struct EntryRef {
  std::size_t domain = 0;  // position in AssociativeMemory::domains
  std::size_t entry = 0;   // position in DomainMemory::entries
  friend bool operator==(const EntryRef&, const EntryRef&) = default;
};

// Working-memory hub linking all domains through their general features.
struct HubMemory {
  std::optional<Som> hub_som;
  std::vector<std::vector<EntryRef>> unit_map;
};

struct AssociativeMemory {
  std::vector<DomainMemory> domains;
  HubMemory hub;
  MemoryConfig config;

  const DomainMemory* domain(std::string_view name) const;
  const PatchEntry& entry(const EntryRef& ref) const {
    return domains.at(ref.domain).entries.at(ref.entry);
  }
  std::size_t total_entries() const;
};

HubMemory build_hub(const std::vector<DomainMemory>& domains, const MemoryConfig& config);

AssociativeMemory build_memory(std::vector<DomainMemory> domains, const MemoryConfig& config);

struct Candidate {
  const PatchEntry* entry = nullptr;
  int hub_distance = 0;
};

// Target-domain entries linked to hub units around the source's hub BMU,
// ordered by (hub grid distance, entry id). Throws EmptyCandidates when none.
std::vector<Candidate> cross_domain_candidates(const AssociativeMemory& memory,
                                               const GeneralFeatures& source,
                                               std::string_view target_domain, int radius);
std::vector<Candidate> cross_domain_candidates(const AssociativeMemory& memory,
                                               const PatchEntry& source,
                                               std::string_view target_domain, int radius);

struct Selection {
  const PatchEntry* entry = nullptr;
  double distance = 0.0;
};

// Minimum detail-vector distance to the reference; ties go to the lowest id.
Selection select_substitute(std::span<const Candidate> candidates,
                            const FeatureBundle& reference,
                            const std::array<double, 5>& weights = {1, 1, 1, 1, 1});

}  // namespace psiart
