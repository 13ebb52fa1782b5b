#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psiart/config.hpp"
#include "psiart/creative.hpp"
#include "psiart/store.hpp"

namespace psiart {

struct DomainSummary {
  std::string name;
  std::size_t entries = 0;
  std::array<double, 5> final_qe{};  // per descriptor kind; 0 for an empty domain
};

struct TrainSummary {
  std::string snapshot_id;
  std::vector<DomainSummary> domains;
  std::size_t hub_assignments = 0;
  double hub_qe = 0.0;
  std::size_t face_templates = 0;
};

struct SessionResult {
  ArtworkRecord record;
  AgentState state;  // live agent state after the session
};

// Everything the CLI and the HTTP service can do. Mutations are serialized on
// one mutex; at most one creative session runs at a time, and ratings that
// arrive during a session are picked up before its next analytic check.
class Engine {
 public:
  // With no explicit config the one stored in the current snapshot is used.
  explicit Engine(std::filesystem::path store_root,
                  std::optional<EngineConfig> config = std::nullopt,
                  std::function<std::string()> clock = iso8601_now);

  const EngineConfig& config() const { return config_; }
  Store& store() { return store_; }

  // Expects <datasets>/<domain>/<images>, at least two domains, one of them the
  // face domain.
  TrainSummary train(const std::filesystem::path& datasets,
                     std::optional<std::uint64_t> seed = std::nullopt);
  TrainSummary train(const std::vector<std::pair<std::string, std::vector<SourceImage>>>& domains,
                     std::optional<std::uint64_t> seed = std::nullopt);

  // Throws Error(Busy) when another session is running.
  SessionResult create(const RasterImage& input, std::uint64_t seed,
                       const CreativeTask& task = {},
                       std::function<void()> before_check = {});

  AgentState rate(const std::string& artwork_id, int rating, const std::string& rater);

  AgentState agent_state() const;
  std::vector<CatalogEntry> catalog() const;
  ArtworkRecord artwork(const std::string& id) const;
  bool session_running() const { return session_.load(); }

  // Throws Error(NotFound) when the store has never been trained.
  std::shared_ptr<const Snapshot> snapshot() const;

 private:
  TrainSummary train_domains(std::vector<DomainMemory> domains);

  Store store_;
  EngineConfig config_;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const Snapshot> snapshot_;
  AgentState agent_;
  std::atomic<bool> session_{false};
};

}  // namespace psiart
