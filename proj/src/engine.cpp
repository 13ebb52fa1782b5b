#include "psiart/engine.hpp"

#include <algorithm>
#include <ctime>

#include "psiart/error.hpp"
#include "psiart/image_io.hpp"

namespace psiart {

namespace fs = std::filesystem;

Engine::Engine(fs::path store_root, std::optional<EngineConfig> config,
               std::function<std::string()> clock)
    : store_(std::move(store_root), std::move(clock)) {
  if (config) {
    config_ = std::move(*config);
  } else if (store_.current_snapshot_id()) {
    config_ = snapshot()->config;
  }
  agent_ = store_.load_agent(initial_agent_state(config_.creative.agent),
                             config_.creative.agent);
}

std::shared_ptr<const Snapshot> Engine::snapshot() const {
  std::lock_guard lock(mu_);
  if (!snapshot_) snapshot_ = std::make_shared<const Snapshot>(store_.load_snapshot());
  return snapshot_;
}

TrainSummary Engine::train(const fs::path& datasets, std::optional<std::uint64_t> seed) {
  if (!fs::is_directory(datasets)) {
    fail(ErrorKind::InvalidInput, "datasets directory not found: " + datasets.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(datasets)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<std::pair<std::string, std::vector<SourceImage>>> domains;
  for (const auto& dir : dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SourceImage> images;
    for (const auto& f : files) images.push_back({f.filename().string(), decode_image(f)});
    domains.emplace_back(dir.filename().string(), std::move(images));
  }
  return train(domains, seed);
}

TrainSummary Engine::train(
    const std::vector<std::pair<std::string, std::vector<SourceImage>>>& domains,
    std::optional<std::uint64_t> seed) {
  if (seed) {
    config_.memory.domain_som.seed = *seed;
    config_.memory.hub_som.seed = *seed + 1;
  }
  if (domains.size() < 2) {
    fail(ErrorKind::InvalidInput, "training needs at least two domains, found " +
                                      std::to_string(domains.size()));
  }
  const bool has_faces = std::any_of(domains.begin(), domains.end(), [&](const auto& d) {
    return d.first == config_.face_domain;
  });
  if (!has_faces) {
    fail(ErrorKind::InvalidInput, "missing '" + config_.face_domain + "' domain");
  }
  std::vector<DomainMemory> built;
  for (const auto& [name, images] : domains) {
    built.push_back(ingest_domain(name, images, config_.crop_policy(name), config_.memory));
  }
  return train_domains(std::move(built));
}

TrainSummary Engine::train_domains(std::vector<DomainMemory> domains) {
  auto snap = std::make_shared<Snapshot>();
  snap->config = config_;
  snap->memory = build_memory(std::move(domains), config_.memory);
  const DomainMemory* faces = snap->memory.domain(config_.face_domain);
  snap->face = build_face_template(*faces, config_.min_face_templates);
  snap->created_unix = static_cast<std::int64_t>(std::time(nullptr));

  TrainSummary summary;
  for (const auto& d : snap->memory.domains) {
    DomainSummary ds{d.name, d.entries.size(), {}};
    for (std::size_t k = 0; k < d.feature_soms.size() && k < 5; ++k) {
      ds.final_qe[k] = d.feature_soms[k].final_qe;
    }
    summary.domains.push_back(ds);
  }
  for (const auto& unit : snap->memory.hub.unit_map) summary.hub_assignments += unit.size();
  if (snap->memory.hub.hub_som) summary.hub_qe = snap->memory.hub.hub_som->final_qe;
  summary.face_templates = static_cast<std::size_t>(std::count_if(
      faces->entries.begin(), faces->entries.end(),
      [](const PatchEntry& e) { return e.is_whole_image(); }));

  std::lock_guard lock(mu_);
  snap->agent = agent_;
  snap->catalog = store_.catalog();
  snap->id = store_.save_snapshot(*snap);
  summary.snapshot_id = snap->id;
  snapshot_ = std::move(snap);
  return summary;
}

SessionResult Engine::create(const RasterImage& input, std::uint64_t seed,
                             const CreativeTask& task, std::function<void()> before_check) {
  if (session_.exchange(true)) fail(ErrorKind::Busy, "a creative session is already running");
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag.store(false); }
  } release{session_};

  const auto snap = snapshot();
  std::string id, created_at;
  AgentState start;
  {
    std::lock_guard lock(mu_);
    id = store_.next_artwork_id();
    created_at = store_.now();
    start = agent_;
  }
  RunHooks hooks;
  hooks.checkpoint = [&](AgentState& s) {
    if (before_check) before_check();
    std::lock_guard lock(mu_);
    s = agent_;
  };
  CreativeTask t = task;
  if (t.source_domain.empty()) t.source_domain = config_.face_domain;
  TaskOutcome out = run_task(t, input, snap->memory, snap->face, start, config_.creative, seed,
                             id, created_at, hooks);

  std::lock_guard lock(mu_);
  const bool accepted = out.record.status == ArtworkStatus::Accepted;
  AgentState next = update_competence(agent_, accepted, config_.creative.agent);
  if (accepted) ++next.artworks_made;
  store_.save_artwork(out.record, input, out.mental, out.executed);
  store_.save_agent(next);
  agent_ = next;
  return {std::move(out.record), std::move(next)};
}

AgentState Engine::rate(const std::string& artwork_id, int rating, const std::string& rater) {
  std::lock_guard lock(mu_);
  agent_ = store_.append_rating({artwork_id, rating, rater, {}}, agent_, config_.creative.agent);
  return agent_;
}

AgentState Engine::agent_state() const {
  std::lock_guard lock(mu_);
  return agent_;
}

std::vector<CatalogEntry> Engine::catalog() const {
  std::lock_guard lock(mu_);
  return store_.catalog();
}

ArtworkRecord Engine::artwork(const std::string& id) const {
  std::lock_guard lock(mu_);
  return store_.load_artwork(id);
}

}  // namespace psiart
