#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psiart/image.hpp"

namespace psiart {

// The four activity kinds of the dual-process controller.
enum class Quadrant { EXP, TAC, AN, REF };
std::string_view to_string(Quadrant q);
Quadrant quadrant_from_string(std::string_view s);

enum class ArtworkStatus { Accepted, Abandoned };
std::string_view to_string(ArtworkStatus s);

struct ProvenanceStep {
  Quadrant quadrant = Quadrant::EXP;
  std::string action;
  nlohmann::json data = nlohmann::json::object();
};

struct RegionRecord {
  Rect rect;
  int depth = 0;
};

struct SubstitutionRecord {
  std::size_t region = 0;
  std::string candidate_id;
  std::string domain;
  Quadrant quadrant = Quadrant::TAC;
  double distance = 0.0;
  int radius = 0;
};

struct CheckRecord {
  double face_score = 0.0;
  bool face_pass = false;
  double expectation_score = 0.0;
  bool expectation_pass = false;
  double tau_face = 0.0;
  double tau_exp = 0.0;
};

struct DecisionRecord {
  std::string kind;  // RetryExplore | RelaxThreshold | ChangeDomain | Abandon
  int radius = 0;
  double tau_face = 0.0;
  std::string domain;
  std::string reason;
};

struct ExecutionRecord {
  int palette_size = 0;
  std::string brush;
  int brush_radius = 0;
  std::uint64_t seed = 0;
  double score = 0.0;
  bool pass = false;
};

struct ArtworkRecord {
  std::string id;
  std::string task_kind = "PortraitByAssociation";
  std::string source_domain;
  std::string target_domain;        // chosen first
  std::string final_target_domain;  // after any domain changes
  std::string input_ref;
  std::string mental_ref;
  std::string executed_ref;
  std::vector<RegionRecord> regions;
  std::vector<SubstitutionRecord> substitutions;
  std::vector<CheckRecord> checks;
  std::vector<DecisionRecord> decisions;
  std::vector<ExecutionRecord> executions;
  std::vector<ProvenanceStep> provenance;
  double tau_face_initial = 0.0;
  double tau_face_final = 0.0;
  double tau_lo = 0.0;
  double tau_exp = 0.0;
  double accept_threshold = 0.0;
  int r_max = 0;
  double resolution_level = 0.0;
  double activation = 0.0;
  std::optional<double> internal_eval;
  ArtworkStatus status = ArtworkStatus::Abandoned;
  std::string created_at;
  std::uint64_t seed = 0;

  double substituted_fraction() const;
};

nlohmann::json to_json(const ArtworkRecord& r);
ArtworkRecord artwork_from_json(const nlohmann::json& j);

}  // namespace psiart
