#include "psiart/memory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "psiart/error.hpp"

namespace psiart {

std::vector<double> weighted_detail(const FeatureBundle& f,
                                    const std::array<double, 5>& weights) {
  std::vector<double> v = f.detail_vector();
  std::size_t offset = 0;
  for (DescriptorKind k : kAllDescriptorKinds) {
    const double w = std::sqrt(weights[static_cast<int>(k)]);
    const auto len = static_cast<std::size_t>(descriptor_length(k));
    if (w != 1.0) {
      for (std::size_t i = offset; i < offset + len; ++i) v[i] *= w;
    }
    offset += len;
  }
  return v;
}

double detail_distance(const FeatureBundle& a, const FeatureBundle& b,
                       const std::array<double, 5>& weights) {
  return std::sqrt(squared_distance(weighted_detail(a, weights), weighted_detail(b, weights)));
}

const PatchEntry* DomainMemory::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

std::string format_id(std::string_view domain, std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", n);
  return std::string(domain) + "-" + buf;
}

std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<PatchEntry> extract_patches(std::string_view domain,
                                        const std::vector<SourceImage>& images,
                                        const CropPolicy& policy) {
  std::vector<PatchEntry> out;
  auto add = [&](const SourceImage& src, const Rect& r) {
    PatchEntry e;
    e.id = format_id(domain, out.size());
    e.domain = std::string(domain);
    e.image = src.image.crop(r);
    e.crop = r;
    e.canvas_w = src.image.width();
    e.canvas_h = src.image.height();
    e.features = extract_features(e.image, e.canvas_w, e.canvas_h);
    e.source = src.name + "@" + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
               std::to_string(r.w) + "," + std::to_string(r.h);
    out.push_back(std::move(e));
  };
  for (const auto& src : images) {
    const int w = src.image.width();
    const int h = src.image.height();
    if (policy.whole) add(src, {0, 0, w, h});
    for (int divisor : policy.grid_divisors) {
      const int side = std::min(w, h) / divisor;
      if (side < 1) continue;
      for (int y = 0; y + side <= h; y += side) {
        for (int x = 0; x + side <= w; x += side) add(src, {x, y, side, side});
      }
    }
  }
  return out;
}

DomainMemory build_domain(std::string name, std::vector<PatchEntry> entries,
                          const MemoryConfig& config) {
  DomainMemory dm;
  dm.name = std::move(name);
  dm.entries = std::move(entries);
  if (dm.entries.empty()) return dm;

  const std::uint64_t domain_seed = config.domain_som.seed ^ name_hash(dm.name);
  for (DescriptorKind kind : kAllDescriptorKinds) {
    SomConfig cfg = config.domain_som;
    cfg.dim = descriptor_length(kind);
    cfg.seed = domain_seed + static_cast<std::uint64_t>(kind);
    std::vector<Sample> samples;
    samples.reserve(dm.entries.size());
    for (const auto& e : dm.entries) samples.push_back(e.features.descriptor(kind));
    dm.feature_soms.push_back(som_train(samples, cfg));

    auto& index = dm.unit_index[static_cast<int>(kind)];
    const Som& som = dm.feature_soms.back();
    index.assign(static_cast<std::size_t>(som.units()), {});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      index[static_cast<std::size_t>(som_bmu(som, samples[i]).unit)].push_back(i);
    }
  }
  return dm;
}

DomainMemory ingest_domain(std::string name, const std::vector<SourceImage>& images,
                           const CropPolicy& policy, const MemoryConfig& config) {
  auto entries = extract_patches(name, images, policy);
  if (static_cast<int>(entries.size()) < config.min_entries) {
    fail(ErrorKind::InsufficientData,
         "domain '" + name + "' yields " + std::to_string(entries.size()) +
             " patches, need at least " + std::to_string(config.min_entries));
  }
  return build_domain(std::move(name), std::move(entries), config);
}

const PatchEntry& recall_within_domain(const DomainMemory& dm, const FeatureBundle& query,
                                       DescriptorKind kind,
                                       const std::array<double, 5>& weights) {
  if (dm.empty()) fail(ErrorKind::InvalidState, "domain '" + dm.name + "' is empty");
  const Som& som = dm.som(kind);
  const auto& index = dm.unit_index[static_cast<int>(kind)];
  const int bmu = som_bmu(som, query.descriptor(kind)).unit;

  // Spiral outward until a unit with indexed entries turns up.
  const std::vector<std::size_t>* bucket = nullptr;
  for (int unit : som_neighborhood(som, bmu, som.diameter())) {
    if (!index[static_cast<std::size_t>(unit)].empty()) {
      bucket = &index[static_cast<std::size_t>(unit)];
      break;
    }
  }
  const auto q = weighted_detail(query, weights);
  const PatchEntry* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i : *bucket) {
    const PatchEntry& e = dm.entries[i];
    const double d = squared_distance(weighted_detail(e.features, weights), q);
    if (d < best_d || (d == best_d && e.id < best->id)) {
      best = &e;
      best_d = d;
    }
  }
  return *best;
}

const DomainMemory* AssociativeMemory::domain(std::string_view name) const {
  for (const auto& d : domains) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::size_t AssociativeMemory::total_entries() const {
  std::size_t n = 0;
  for (const auto& d : domains) n += d.entries.size();
  return n;
}

HubMemory build_hub(const std::vector<DomainMemory>& domains, const MemoryConfig& config) {
  if (domains.size() < 2) {
    fail(ErrorKind::InvalidInput, "the hub links at least two domains");
  }
  std::vector<Sample> samples;
  std::vector<EntryRef> refs;
  for (std::size_t d = 0; d < domains.size(); ++d) {
    for (std::size_t i = 0; i < domains[d].entries.size(); ++i) {
      const auto g = domains[d].entries[i].features.general.as_array();
      samples.emplace_back(g.begin(), g.end());
      refs.push_back({d, i});
    }
  }
  if (samples.empty()) fail(ErrorKind::InsufficientData, "no entries to build the hub from");

  SomConfig cfg = config.hub_som;
  cfg.dim = 3;
  HubMemory hub;
  hub.hub_som = som_train(samples, cfg);
  hub.unit_map.assign(static_cast<std::size_t>(hub.hub_som->units()), {});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    hub.unit_map[static_cast<std::size_t>(som_bmu(*hub.hub_som, samples[i]).unit)]
        .push_back(refs[i]);
  }
  return hub;
}

AssociativeMemory build_memory(std::vector<DomainMemory> domains, const MemoryConfig& config) {
  AssociativeMemory m;
  m.hub = build_hub(domains, config);
  m.domains = std::move(domains);
  m.config = config;
  return m;
}

std::vector<Candidate> cross_domain_candidates(const AssociativeMemory& memory,
                                               const GeneralFeatures& source,
                                               std::string_view target_domain, int radius) {
  if (radius < 0) fail(ErrorKind::InvalidInput, "radius must be >= 0");
  if (!memory.hub.hub_som) fail(ErrorKind::InvalidState, "hub has not been built");
  std::size_t target = memory.domains.size();
  for (std::size_t d = 0; d < memory.domains.size(); ++d) {
    if (memory.domains[d].name == target_domain) target = d;
  }
  if (target == memory.domains.size()) {
    fail(ErrorKind::InvalidInput, "unknown domain '" + std::string(target_domain) + "'");
  }
  const Som& hub = *memory.hub.hub_som;
  const auto g = source.as_array();
  const int bmu = som_bmu(hub, g).unit;

  std::vector<Candidate> out;
  for (int unit : som_neighborhood(hub, bmu, radius)) {
    for (const EntryRef& ref : memory.hub.unit_map[static_cast<std::size_t>(unit)]) {
      if (ref.domain == target) {
        out.push_back({&memory.entry(ref), hub.grid_distance(bmu, unit)});
      }
    }
  }
  if (out.empty()) {
    fail(ErrorKind::EmptyCandidates, "no '" + std::string(target_domain) +
                                         "' entries within hub radius " +
                                         std::to_string(radius));
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.hub_distance != b.hub_distance) return a.hub_distance < b.hub_distance;
    return a.entry->id < b.entry->id;
  });
  return out;
}

std::vector<Candidate> cross_domain_candidates(const AssociativeMemory& memory,
                                               const PatchEntry& source,
                                               std::string_view target_domain, int radius) {
  return cross_domain_candidates(memory, source.features.general, target_domain, radius);
}

Selection select_substitute(std::span<const Candidate> candidates,
                            const FeatureBundle& reference,
                            const std::array<double, 5>& weights) {
  if (candidates.empty()) fail(ErrorKind::InvalidInput, "no candidates to select from");
  const auto ref = weighted_detail(reference, weights);
  Selection best{nullptr, std::numeric_limits<double>::infinity()};
  for (const Candidate& c : candidates) {
    const double d = squared_distance(weighted_detail(c.entry->features, weights), ref);
    if (d < best.distance || (d == best.distance && c.entry->id < best.entry->id)) {
      best = {c.entry, d};
    }
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

}  // namespace psiart
