#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "psiart/agent.hpp"
#include "psiart/config.hpp"
#include "psiart/memory.hpp"
#include "psiart/record.hpp"
#include "psiart/render.hpp"

namespace psiart {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct CatalogEntry {
  std::string id;
  std::string status;
  std::string created_at;
  std::string thumbnail_ref;
  std::string target_domain;
  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct Snapshot {
  std::string id;  // hex content checksum; filled in by save/load
  std::int64_t created_unix = 0;
  EngineConfig config;
  AssociativeMemory memory;
  FaceTemplate face;
  AgentState agent;  // agent state when the snapshot was taken
  std::vector<CatalogEntry> catalog;
};

struct RatingEvent {
  std::string artwork_id;
  int rating = 0;
  std::string rater;
  std::string timestamp;  // ISO-8601 UTC
  friend bool operator==(const RatingEvent&, const RatingEvent&) = default;
};

nlohmann::json to_json(const AgentState& s);
AgentState agent_state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CatalogEntry& e);

// Container encoding. Layout: "PSIASNAP", u32 version, i64 creation time, then
// sections {u32 tag, u64 length, payload, u64 FNV-1a of payload}, closed by an
// END section. All integers and doubles are little-endian.
std::vector<unsigned char> encode_snapshot(const Snapshot& s);
// Throws VersionError for an unknown version and CorruptSnapshot for anything
// truncated or failing a checksum.
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);
// Checksum over the section payloads only, so it is independent of time.
std::string snapshot_content_id(const std::vector<unsigned char>& bytes);

std::string iso8601_now();

AgentState replay_ratings(AgentState initial, std::span<const RatingEvent> ratings,
                          const AgentConfig& config);

std::string encode_rating_line(const RatingEvent& e);
RatingEvent decode_rating_line(const std::string& line);

// On-disk layout:
//   snapshots/<id>.psnap, snapshots/CURRENT
//   artworks/<id>.json, artworks/<id>.png, artworks/<id>_mental.png, artworks/<id>_input.png
//   catalog.json    human-readable catalog manifest
//   agent.json      live agent state + number of ledger lines applied
//   ratings.log     append-only rating ledger, one event per line
class Store {
 public:
  explicit Store(std::filesystem::path root,
                 std::function<std::string()> clock = iso8601_now);

  const std::filesystem::path& root() const { return root_; }
  std::string now() const { return clock_(); }

  std::string save_snapshot(const Snapshot& s);
  Snapshot load_snapshot(const std::string& id = {}) const;
  std::optional<std::string> current_snapshot_id() const;

  // Live agent state. Ledger lines not yet reflected in agent.json are replayed
  // on load, which completes an interrupted append_rating.
  AgentState load_agent(const AgentState& initial, const AgentConfig& config);
  void save_agent(const AgentState& s);

  std::vector<CatalogEntry> catalog() const;
  bool has_artwork(const std::string& id) const;
  ArtworkRecord load_artwork(const std::string& id) const;
  void save_artwork(const ArtworkRecord& r, const RasterImage& input,
                    const std::optional<RasterImage>& mental,
                    const std::optional<RasterImage>& executed);
  std::string next_artwork_id() const;

  std::vector<RatingEvent> read_ratings() const;
  // Validates, appends to the ledger, applies the certainty update and persists
  // the new agent state.
  AgentState append_rating(const RatingEvent& event, AgentState current,
                           const AgentConfig& config);

 private:
  void write_agent(const AgentState& s, std::size_t ratings_applied);

  std::filesystem::path root_;
  std::function<std::string()> clock_;
  std::size_t ratings_applied_ = 0;
};

// Writes via a temporary file and rename so readers never see partial data.
void atomic_write(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void atomic_write(const std::filesystem::path& path, const std::string& text);

}  // namespace psiart
