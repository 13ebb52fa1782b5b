#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace psiart {

struct AgentConfig {
  double activation_min = 0.2;
  double activation_max = 0.9;
  double ema_alpha = 0.2;
  double tau_lo = 0.35;
  double tau_hi = 0.75;
  double initial_competence = 0.3;
  double initial_certainty = 0.3;
};

struct Urges {
  double competence = 0.0;
  double certainty = 0.0;
  friend bool operator==(const Urges&, const Urges&) = default;
};

struct AgentEvent {
  std::string kind;  // "competence", "certainty"
  double delta = 0.0;
  std::uint64_t tick = 0;  // logical clock, strictly increasing
  friend bool operator==(const AgentEvent&, const AgentEvent&) = default;
};

struct AgentState {
  Urges urges;
  double activation = 0.0;
  double resolution_level = 1.0;
  std::uint64_t artworks_made = 0;
  std::vector<AgentEvent> history;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class DevelopmentState { Beginner, Acclaimed, UnrecognizedTalent, Complacent };

std::string_view to_string(DevelopmentState s);

AgentState initial_agent_state(const AgentConfig& config = {});

// Motivation is the mean unmet urge; activation maps it linearly into
// [activation_min, activation_max] and the resolution level is its complement.
AgentState update_activation(AgentState state, const AgentConfig& config = {});

int exploration_radius(const AgentState& state, int r_max);

double check_strictness(const AgentState& state, const AgentConfig& config = {});

AgentState update_competence(AgentState state, bool internal_eval_passed,
                             const AgentConfig& config = {});

// rating in 1..5; anything else throws Error(InvalidInput).
AgentState update_certainty(AgentState state, int rating, const AgentConfig& config = {});

// Both urges >= 0.5 count as high.
DevelopmentState development_state(const Urges& urges);

}  // namespace psiart
