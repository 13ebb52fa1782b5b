#pragma once

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psiart/agent.hpp"
#include "psiart/memory.hpp"
#include "psiart/record.hpp"
#include "psiart/render.hpp"
#include "psiart/segment.hpp"

namespace psiart {

struct CreativeConfig {
  int n_retry = 3;
  int r_max = 8;
  double tau_exp = 0.3;
  // Distance between two fully disjoint per-channel histograms: sqrt(3 * 2).
  double expectation_sigma = 2.449489742783178;
  double relax_step = 0.1;
  double accept_threshold = 0.7;
  std::array<double, 3> face_scales{1.0, 0.75, 0.5};
  std::array<double, 5> detail_weights{1, 1, 1, 1, 1};
  SegmentConfig segment;
  ExecutionConfig execution{8, BrushShape::Square, 2, 0};
  // Used once when the first execution is rejected.
  ExecutionConfig replan{16, BrushShape::Dot, 1, 0};
  AgentConfig agent;
};

struct CreativeTask {
  std::string source_domain = "faces";
  std::string target_domain;  // empty: chosen from the inspiration
};

struct Substitution {
  std::size_t region = 0;
  Rect rect;
  const PatchEntry* candidate = nullptr;
  Quadrant quadrant = Quadrant::TAC;
  double distance = 0.0;
  int radius = 0;
};

struct CheckResult {
  double face_score = 0.0;
  bool face_pass = false;
  double expectation_score = 0.0;
  bool expectation_pass = false;
  double tau_face = 0.0;
  double tau_exp = 0.0;

  bool passed() const { return face_pass && expectation_pass; }
};

struct ReflectiveDecision {
  enum class Kind { RetryExplore, RelaxThreshold, ChangeDomain, Abandon };
  Kind kind = Kind::Abandon;
  int radius = 0;
  double tau_face = 0.0;
  std::string domain;
};
std::string_view to_string(ReflectiveDecision::Kind k);

struct DomainScore {
  std::string name;
  double score = 0.0;
};

// Candidate target domains (every registered domain except the source) by
// cosine similarity of HSV histograms, best first, ties by name.
std::vector<DomainScore> rank_target_domains(const AssociativeMemory& memory,
                                             const RasterImage& inspiration,
                                             std::string_view source_domain);

std::string choose_target_domain(const AssociativeMemory& memory, const RasterImage& inspiration,
                                 std::string_view source_domain,
                                 const std::set<std::string>& excluded = {});

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Default association: co-located hub entries only (radius 0).
Substitution tacit_default(const AssociativeMemory& memory, const Region& region,
                           std::size_t region_index, std::string_view target_domain,
                           const std::array<double, 5>& weights = {1, 1, 1, 1, 1});

// All candidates within `radius` on the hub, ranked by detail distance.
std::vector<Substitution> exploratory_candidates(
    const AssociativeMemory& memory, const Region& region, std::size_t region_index,
    std::string_view target_domain, int radius,
    const std::array<double, 5>& weights = {1, 1, 1, 1, 1});

RasterImage compose_mental_image(const RasterImage& input,
                                 std::span<const Substitution> substitutions);

// Max normalised cross-correlation of the template against the image over the
// given scales, negative correlation clamped to 0.
double face_score(const RasterImage& img, const FaceTemplate& face,
                  std::span<const double> scales);

CheckResult analytic_check(const RasterImage& mental, const FaceTemplate& face,
                           double tau_face, std::span<const Substitution> substitutions,
                           const CreativeConfig& config);
CheckResult analytic_check(const RasterImage& mental, const FaceTemplate& face,
                           const AgentState& state, std::span<const Substitution> substitutions,
                           const CreativeConfig& config);

struct ReflectiveContext {
  int radius = 0;
  double tau_face = 0.0;
  std::vector<std::string> unused_domains;  // in ranking order
  bool exploration_possible = true;         // false when the domain has nothing to offer
};

// Rule order: widen exploration, relax the face threshold, change domain, give up.
ReflectiveDecision reflective_decide(const CheckResult& check, int attempt,
                                     const ReflectiveContext& ctx, const CreativeConfig& config);

// Quadrant pairs allowed to follow each other in a provenance log.
bool permitted_transition(Quadrant from, Quadrant to);
bool provenance_is_permitted(std::span<const ProvenanceStep> steps);

struct TaskOutcome {
  ArtworkRecord record;
  RasterImage mental{1, 1};
  std::optional<RasterImage> executed;
  AgentState state;
  int analytic_checks = 0;
};

struct RunHooks {
  // Runs before every analytic check; may update the agent state.
  std::function<void(AgentState&)> checkpoint;
};

TaskOutcome run_task(const CreativeTask& task, const RasterImage& input,
                     const AssociativeMemory& memory, const FaceTemplate& face,
                     AgentState state, const CreativeConfig& config, std::uint64_t seed,
                     std::string artwork_id, std::string created_at, const RunHooks& hooks = {});

}  // namespace psiart
