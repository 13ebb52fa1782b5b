#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "psiart/error.hpp"
#include "psiart/memory.hpp"
#include "test_support.hpp"

using namespace psiart;

namespace {

const PatchEntry* nearest(const std::vector<const PatchEntry*>& pool, const FeatureBundle& q) {
  const PatchEntry* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  const auto qv = q.detail_vector();
  for (const auto* e : pool) {
    const auto ev = e->features.detail_vector();
    double d = 0;
    for (std::size_t i = 0; i < qv.size(); ++i) d += (qv[i] - ev[i]) * (qv[i] - ev[i]);
    if (d < best_d || (d == best_d && e->id < best->id)) {
      best = e;
      best_d = d;
    }
  }
  return best;
}

MemoryConfig small_config() {
  MemoryConfig c;
  c.domain_som.epochs = 10;
  c.hub_som.epochs = 10;
  c.min_entries = 1;
  return c;
}

}  // namespace

TEST_SUITE("memory") {

TEST_CASE("grid crops at two scales") {
  const auto patches = extract_patches("flowers", {{"bed.png", fixtures::flower_bed(1)}},
                                       CropPolicy::grid());
  CHECK(patches.size() == 20);
  CHECK(patches[0].id == "flowers-00000");
  CHECK(patches[0].crop == Rect{0, 0, 64, 64});
  CHECK(patches[4].crop == Rect{0, 0, 32, 32});
  CHECK(patches[0].source == "bed.png@0,0,64,64");
  const auto whole = extract_patches("faces", {{"f.png", fixtures::face(1)}},
                                     CropPolicy::whole_image());
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].is_whole_image());
}

TEST_CASE("ingest builds five SOMs and a complete unit index") {
  const auto& dm = *test::corpus_memory().domain("flowers");
  CHECK(dm.entries.size() == 40);
  REQUIRE(dm.feature_soms.size() == 5);
  for (auto k : kAllDescriptorKinds) {
    CHECK(dm.som(k).dim() == descriptor_length(k));
    std::multiset<std::size_t> seen;
    for (const auto& bucket : dm.unit_index[static_cast<int>(k)]) seen.insert(bucket.begin(), bucket.end());
    CHECK(seen.size() == dm.entries.size());
    for (std::size_t i = 0; i < dm.entries.size(); ++i) CHECK(seen.count(i) == 1);
  }
}

TEST_CASE("stored features are recomputable bit for bit") {
  for (const auto& dm : test::corpus_memory().domains) {
    for (const auto& e : dm.entries) {
      const auto again = extract_features(e.image, e.canvas_w, e.canvas_h).detail_vector();
      const auto stored = e.features.detail_vector();
      CHECK(std::memcmp(again.data(), stored.data(), again.size() * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("too few patches is InsufficientData") {
  try {
    ingest_domain("tiny", {{"a.png", fixtures::leaves(1, 64)}}, CropPolicy{false, {2}}, MemoryConfig{});
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("duplicate images get distinct ids and the same units") {
  const auto img = fixtures::leaves(3, 64);
  const auto dm = ingest_domain("dup", {{"a.png", img}, {"b.png", img}},
                                CropPolicy{false, {2}}, small_config());
  REQUIRE(dm.entries.size() == 8);
  CHECK(dm.entries[0].id != dm.entries[4].id);
  for (auto k : kAllDescriptorKinds) {
    const auto& som = dm.som(k);
    CHECK(som_bmu(som, dm.entries[0].features.descriptor(k)).unit ==
          som_bmu(som, dm.entries[4].features.descriptor(k)).unit);
  }
}

TEST_CASE("recall of a stored entry returns that entry") {
  for (const auto& dm : test::corpus_memory().domains) {
    for (const auto& e : dm.entries) {
      for (auto k : kAllDescriptorKinds) CHECK(recall_within_domain(dm, e.features, k).id == e.id);
    }
  }
}

TEST_CASE("recall falls back to the nearest populated unit") {
  const auto& dm = *test::corpus_memory().domain("leaves");
  Rng rng(6);
  for (int q = 0; q < 20; ++q) {
    const auto query = extract_features(test::random_image(rng, 16, 16), 128, 128);
    for (auto k : kAllDescriptorKinds) {
      const auto& som = dm.som(k);
      const auto& index = dm.unit_index[static_cast<int>(k)];
      const int bmu = som_bmu(som, query.descriptor(k)).unit;
      // Oracle: scan units by (grid distance, index) for the first populated one.
      int best_unit = -1;
      for (int u = 0; u < som.units(); ++u) {
        if (index[u].empty()) continue;
        if (best_unit < 0 || som.grid_distance(bmu, u) < som.grid_distance(bmu, best_unit)) best_unit = u;
      }
      std::vector<const PatchEntry*> pool;
      for (std::size_t i : index[best_unit]) pool.push_back(&dm.entries[i]);
      CHECK(recall_within_domain(dm, query, k).id == nearest(pool, query)->id);
    }
  }
}

TEST_CASE("recall on a single-entry domain and on an empty domain") {
  auto entries = extract_patches("one", {{"a.png", fixtures::leaves(1, 32)}}, CropPolicy::whole_image());
  const auto dm = build_domain("one", entries, small_config());
  Rng rng(2);
  const auto q = extract_features(test::random_image(rng, 8, 8), 32, 32);
  CHECK(recall_within_domain(dm, q, DescriptorKind::Haar).id == "one-00000");
  const auto empty = build_domain("none", {}, small_config());
  CHECK(empty.empty());
  CHECK_THROWS_AS(recall_within_domain(empty, q, DescriptorKind::Rgb), Error);
}

TEST_CASE("hub conserves every entry once and matches re-query") {
  const auto& mem = test::corpus_memory();
  std::size_t total = 0;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t u = 0; u < mem.hub.unit_map.size(); ++u) {
    for (const auto& ref : mem.hub.unit_map[u]) {
      ++total;
      seen.insert({ref.domain, ref.entry});
      const auto g = mem.entry(ref).features.general.as_array();
      CHECK(som_bmu(*mem.hub.hub_som, g).unit == static_cast<int>(u));
    }
  }
  CHECK(total == mem.total_entries());
  CHECK(seen.size() == total);
}

TEST_CASE("faces and flowers hub lists 70 pairs") {
  const auto& c = test::corpus();
  EngineConfig cfg;
  std::vector<DomainMemory> domains;
  for (const auto& [name, images] : c.domains) {
    if (name == "leaves") continue;
    domains.push_back(ingest_domain(name, images, cfg.crop_policy(name), cfg.memory));
  }
  const auto hub = build_hub(domains, cfg.memory);
  std::size_t n = 0;
  for (const auto& unit : hub.unit_map) n += unit.size();
  CHECK(n == 70);
  std::vector<DomainMemory> one{domains[0]};
  CHECK_THROWS_AS(build_hub(one, cfg.memory), Error);
}

TEST_CASE("identical general features share a hub unit") {
  const auto& mem = test::corpus_memory();
  const auto& flower = mem.domain("flowers")->entries[3];
  const auto& leaf = mem.domain("leaves")->entries[3];
  GeneralFeatures g = flower.features.general;
  const int a = som_bmu(*mem.hub.hub_som, g.as_array()).unit;
  g = leaf.features.general;
  g.mean_luminance = flower.features.general.mean_luminance;
  CHECK(som_bmu(*mem.hub.hub_som, g.as_array()).unit == a);
}

TEST_CASE("candidates grow with radius and reach the whole domain") {
  const auto& mem = test::corpus_memory();
  const Som& hub = *mem.hub.hub_som;
  for (const auto& e : mem.domain("faces")->entries) {
    std::size_t prev = 0;
    for (int r = 0; r <= hub.diameter(); ++r) {
      std::size_t n = 0;
      try {
        n = cross_domain_candidates(mem, e, "flowers", r).size();
      } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::EmptyCandidates);
      }
      CHECK(n >= prev);
      prev = n;
    }
    CHECK(prev == 40);
  }
}

TEST_CASE("radius-1 candidates equal the unit_map oracle") {
  const auto& mem = test::corpus_memory();
  const Som& hub = *mem.hub.hub_som;
  const std::size_t flowers = 1;
  REQUIRE(mem.domains[flowers].name == "flowers");
  for (const auto& e : mem.domain("faces")->entries) {
    const int bmu = som_bmu(hub, e.features.general.as_array()).unit;
    std::vector<std::pair<int, std::string>> want;
    for (int u = 0; u < hub.units(); ++u) {
      const int dx = std::abs(u % hub.config().grid_w - bmu % hub.config().grid_w);
      const int dy = std::abs(u / hub.config().grid_w - bmu / hub.config().grid_w);
      const int d = std::max(dx, dy);
      if (d > 1) continue;
      for (const auto& ref : mem.hub.unit_map[u]) {
        if (ref.domain == flowers) want.push_back({d, mem.entry(ref).id});
      }
    }
    std::sort(want.begin(), want.end());
    std::vector<std::pair<int, std::string>> got;
    try {
      for (const auto& c : cross_domain_candidates(mem, e, "flowers", 1)) got.push_back({c.hub_distance, c.entry->id});
    } catch (const Error&) {
    }
    CHECK(got == want);
  }
}

TEST_CASE("candidate errors") {
  const auto& mem = test::corpus_memory();
  const auto& e = mem.domain("faces")->entries[0];
  CHECK_THROWS_AS(cross_domain_candidates(mem, e, "nope", 1), Error);
  CHECK_THROWS_AS(cross_domain_candidates(mem, e, "flowers", -1), Error);
}

TEST_CASE("select_substitute equals the linear scan") {
  const auto& mem = test::corpus_memory();
  Rng rng(31);
  const auto all = cross_domain_candidates(mem, mem.domain("faces")->entries[0], "leaves",
                                           mem.hub.hub_som->diameter());
  for (int q = 0; q < 50; ++q) {
    const auto query = extract_features(test::random_image(rng, 16, 16), 64, 64);
    std::vector<Candidate> subset;
    for (const auto& c : all) {
      if (rng.below(4) == 0) subset.push_back(c);
    }
    if (subset.empty()) subset.push_back(all[q % all.size()]);
    std::vector<const PatchEntry*> pool;
    for (const auto& c : subset) pool.push_back(c.entry);
    CHECK(select_substitute(subset, query).entry->id == nearest(pool, query)->id);
  }
  std::vector<Candidate> one{all[5]};
  CHECK(select_substitute(one, mem.domain("faces")->entries[0].features).entry == all[5].entry);
  const auto exact = select_substitute(all, all[7].entry->features);
  CHECK(exact.entry == all[7].entry);
  CHECK(exact.distance == 0.0);
  CHECK_THROWS_AS(select_substitute(std::span<const Candidate>{}, all[0].entry->features), Error);
}

}  // TEST_SUITE
