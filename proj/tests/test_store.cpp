#include <doctest.h>

#include <fstream>
#include <sstream>

#include "psiart/error.hpp"
#include "psiart/image_io.hpp"
#include "psiart/store.hpp"
#include "test_support.hpp"

using namespace psiart;
namespace fs = std::filesystem;

namespace {

Snapshot corpus_snapshot() {
  Snapshot s;
  s.created_unix = 1700000000;
  s.memory = test::corpus_memory();
  s.face = test::corpus_face();
  s.agent = initial_agent_state();
  return s;
}

const std::vector<unsigned char>& encoded() {
  static const auto bytes = encode_snapshot(corpus_snapshot());
  return bytes;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidState;
}

ArtworkRecord stub_record(const std::string& id) {
  ArtworkRecord r;
  r.id = id;
  r.input_ref = "artworks/" + id + "_input.png";
  r.created_at = "2026-01-01T00:00:00Z";
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

}  // namespace

TEST_SUITE("store") {

TEST_CASE("snapshot round trip preserves weights and query answers") {
  const auto back = decode_snapshot(encoded());
  const auto& a = test::corpus_memory();
  const auto& b = back.memory;
  REQUIRE(a.domains.size() == b.domains.size());
  for (std::size_t d = 0; d < a.domains.size(); ++d) {
    CHECK(a.domains[d].name == b.domains[d].name);
    REQUIRE(a.domains[d].entries.size() == b.domains[d].entries.size());
    for (std::size_t k = 0; k < a.domains[d].feature_soms.size(); ++k) {
      CHECK(a.domains[d].feature_soms[k].weights() == b.domains[d].feature_soms[k].weights());
    }
    CHECK(a.domains[d].unit_index == b.domains[d].unit_index);
    for (std::size_t i = 0; i < a.domains[d].entries.size(); ++i) {
      const auto& x = a.domains[d].entries[i];
      const auto& y = b.domains[d].entries[i];
      CHECK(x.id == y.id);
      CHECK(x.image == y.image);
      CHECK(x.features.detail_vector() == y.features.detail_vector());
    }
  }
  CHECK(a.hub.hub_som->weights() == b.hub.hub_som->weights());
  CHECK(a.hub.unit_map == b.hub.unit_map);
  CHECK(back.face.luminance == test::corpus_face().luminance);

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto q = extract_features(test::random_image(rng, 16, 16), 128, 128);
    const auto ca = cross_domain_candidates(a, q.general, "flowers", 16);
    const auto cb = cross_domain_candidates(b, q.general, "flowers", 16);
    REQUIRE(ca.size() == cb.size());
    for (std::size_t k = 0; k < ca.size(); ++k) CHECK(ca[k].entry->id == cb[k].entry->id);
    CHECK(select_substitute(ca, q).entry->id == select_substitute(cb, q).entry->id);
  }
  CHECK(encode_snapshot(back) == encoded());
}

TEST_CASE("snapshot id ignores the creation time") {
  auto s = corpus_snapshot();
  s.created_unix = 42;
  const auto other = encode_snapshot(s);
  CHECK(other != encoded());
  CHECK(snapshot_content_id(other) == snapshot_content_id(encoded()));
}

TEST_CASE("unknown version is a VersionError") {
  auto bytes = encoded();
  bytes[8] = 2;
  CHECK(kind_of([&] { decode_snapshot(bytes); }) == ErrorKind::VersionError);
}

TEST_CASE("truncation and bit flips are CorruptSnapshot") {
  for (std::size_t cut : {std::size_t{5}, std::size_t{30}, encoded().size() / 2, encoded().size() - 1}) {
    std::vector<unsigned char> bytes(encoded().begin(), encoded().begin() + cut);
    CHECK(kind_of([&] { decode_snapshot(bytes); }) == ErrorKind::CorruptSnapshot);
  }
  auto flipped = encoded();
  flipped[flipped.size() / 3] ^= 0x10;
  CHECK(kind_of([&] { decode_snapshot(flipped); }) == ErrorKind::CorruptSnapshot);
  auto magic = encoded();
  magic[0] = 'X';
  CHECK(kind_of([&] { decode_snapshot(magic); }) == ErrorKind::CorruptSnapshot);
}

TEST_CASE("store saves and loads the current snapshot") {
  test::TempDir dir("store_snap");
  Store store(dir.path(), fixed_clock);
  CHECK(kind_of([&] { store.load_snapshot(); }) == ErrorKind::NotFound);
  const auto id = store.save_snapshot(corpus_snapshot());
  CHECK(store.current_snapshot_id() == id);
  CHECK(fs::exists(dir.path() / "snapshots" / (id + ".psnap")));
  CHECK(store.load_snapshot().id == id);
  CHECK(store.load_snapshot(id).memory.total_entries() == test::corpus_memory().total_entries());
  CHECK(kind_of([&] { store.load_snapshot("0000"); }) == ErrorKind::NotFound);
}

TEST_CASE("rating ledger updates certainty and survives restarts") {
  test::TempDir dir("store_ledger");
  AgentConfig cfg;
  AgentState start = initial_agent_state();
  start.urges.certainty = 0.5;
  start = update_activation(start);
  {
    Store store(dir.path(), fixed_clock);
    store.load_agent(start, cfg);
    store.save_artwork(stub_record("art-000001"), RasterImage(8, 8), std::nullopt, std::nullopt);
    const auto ledger_before = fs::exists(dir.path() / "ratings.log");
    CHECK_FALSE(ledger_before);

    const auto s = store.append_rating({"art-000001", 5, "ann", ""}, start, cfg);
    CHECK(s.urges.certainty == doctest::Approx(0.6));
    CHECK(s.resolution_level + s.activation == 1.0);

    CHECK(kind_of([&] { store.append_rating({"art-999999", 4, "ann", ""}, s, cfg); }) ==
          ErrorKind::NotFound);
    CHECK(kind_of([&] { store.append_rating({"art-000001", 0, "ann", ""}, s, cfg); }) ==
          ErrorKind::InvalidInput);
    CHECK(store.read_ratings().size() == 1);
    store.append_rating({"art-000001", 1, "bo, \"b\"\n%", ""}, s, cfg);
  }
  Store reopened(dir.path(), fixed_clock);
  const auto events = reopened.read_ratings();
  REQUIRE(events.size() == 2);
  CHECK(events[1].rater == "bo, \"b\"\n%");
  CHECK(events[0].timestamp == "2026-01-01T00:00:00Z");

  // Oracle: fold the two ratings by hand.
  double c = 0.5;
  for (int r : {5, 1}) c += 0.2 * ((r - 1) / 4.0 - c);
  const auto loaded = reopened.load_agent(start, cfg);
  CHECK(loaded.urges.certainty == doctest::Approx(c).epsilon(1e-12));
  CHECK(replay_ratings(start, events, cfg).urges.certainty == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("interrupted rating is completed from the ledger") {
  test::TempDir dir("store_recover");
  AgentConfig cfg;
  const auto start = initial_agent_state();
  std::string agent_after_one;
  {
    Store store(dir.path(), fixed_clock);
    store.load_agent(start, cfg);
    store.save_artwork(stub_record("art-000001"), RasterImage(8, 8), std::nullopt, std::nullopt);
    const auto s = store.append_rating({"art-000001", 5, "a", ""}, start, cfg);
    agent_after_one = read_file(dir.path() / "agent.json");
    store.append_rating({"art-000001", 5, "a", ""}, s, cfg);
  }
  // Simulate a crash between the ledger append and the agent write.
  std::ofstream(dir.path() / "agent.json", std::ios::trunc) << agent_after_one;
  Store store(dir.path(), fixed_clock);
  const auto s = store.load_agent(start, cfg);
  const RatingEvent e{"art-000001", 5, "a", "x"};
  const std::vector<RatingEvent> both{e, e};
  CHECK(s.urges.certainty == doctest::Approx(replay_ratings(start, both, cfg).urges.certainty));
  const auto j = nlohmann::json::parse(read_file(dir.path() / "agent.json"));
  CHECK(j.at("ratings_applied") == 2);
}

TEST_CASE("rating line escaping round trips") {
  for (const std::string rater : {"", "plain", "a,b", "100%", "line\nbreak", "%2C"}) {
    const RatingEvent e{"art-000007", 3, rater, "2026-01-01T00:00:00Z"};
    const auto line = encode_rating_line(e);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(decode_rating_line(line) == e);
  }
  CHECK_THROWS_AS(decode_rating_line("garbage"), Error);
}

TEST_CASE("catalog and artwork files") {
  test::TempDir dir("store_catalog");
  Store store(dir.path(), fixed_clock);
  CHECK(store.catalog().empty());
  CHECK(store.next_artwork_id() == "art-000001");
  auto r = stub_record("art-000001");
  r.status = ArtworkStatus::Accepted;
  r.executed_ref = "artworks/art-000001.png";
  r.mental_ref = "artworks/art-000001_mental.png";
  r.final_target_domain = "flowers";
  const RasterImage img(12, 10, {1, 2, 3});
  store.save_artwork(r, img, img, img);
  CHECK(store.next_artwork_id() == "art-000002");
  const auto cat = store.catalog();
  REQUIRE(cat.size() == 1);
  CHECK(cat[0] == CatalogEntry{"art-000001", "Accepted", r.created_at, r.executed_ref, "flowers"});
  CHECK(decode_image(dir.path() / r.executed_ref) == img);
  CHECK(to_json(store.load_artwork("art-000001")) == to_json(r));
  CHECK(store.has_artwork("art-000001"));
  CHECK_FALSE(store.has_artwork("../catalog"));
  CHECK_FALSE(store.has_artwork("a/b"));
  CHECK(kind_of([&] { store.load_artwork("art-000009"); }) == ErrorKind::NotFound);
}

TEST_CASE("atomic writes replace whole files and leave no temporaries") {
  test::TempDir dir("store_atomic");
  const auto p = dir.path() / "f.txt";
  atomic_write(p, std::string(10000, 'a'));
  atomic_write(p, std::string("short"));
  CHECK(read_file(p) == "short");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) files += e.is_regular_file();
  CHECK(files == 1);
}

TEST_CASE("agent state JSON round trip") {
  auto s = initial_agent_state();
  s = update_certainty(update_competence(s, true), 4);
  s.artworks_made = 3;
  const auto back = agent_state_from_json(to_json(s));
  CHECK(to_json(back) == to_json(s));
  CHECK(back.resolution_level + back.activation == 1.0);
}

}  // TEST_SUITE
