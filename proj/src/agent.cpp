#include "psiart/agent.hpp"

#include <algorithm>
#include <cmath>

#include "psiart/error.hpp"

namespace psiart {

std::string_view to_string(DevelopmentState s) {
  switch (s) {
    case DevelopmentState::Beginner: return "Beginner";
    case DevelopmentState::Acclaimed: return "Acclaimed";
    case DevelopmentState::UnrecognizedTalent: return "UnrecognizedTalent";
    case DevelopmentState::Complacent: return "Complacent";
  }
  return "?";
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::uint64_t next_tick(const AgentState& s) {
  return s.history.empty() ? 1 : s.history.back().tick + 1;
}

}  // namespace

AgentState initial_agent_state(const AgentConfig& config) {
  AgentState s;
  s.urges = {clamp01(config.initial_competence), clamp01(config.initial_certainty)};
  return update_activation(std::move(s), config);
}

AgentState update_activation(AgentState state, const AgentConfig& config) {
  const double motivation =
      0.5 * ((1.0 - state.urges.competence) + (1.0 - state.urges.certainty));
  state.activation = clamp01(config.activation_min +
                             (config.activation_max - config.activation_min) * motivation);
  state.resolution_level = 1.0 - state.activation;
  return state;
}

int exploration_radius(const AgentState& state, int r_max) {
  if (r_max < 0) fail(ErrorKind::InvalidInput, "r_max must be >= 0");
  return static_cast<int>(std::lround(r_max * state.activation));
}

double check_strictness(const AgentState& state, const AgentConfig& config) {
  return config.tau_lo + (config.tau_hi - config.tau_lo) * state.resolution_level;
}

AgentState update_competence(AgentState state, bool internal_eval_passed,
                             const AgentConfig& config) {
  const double target = internal_eval_passed ? 1.0 : 0.0;
  const double before = state.urges.competence;
  state.urges.competence = clamp01(before + config.ema_alpha * (target - before));
  state.history.push_back({"competence", state.urges.competence - before, next_tick(state)});
  return update_activation(std::move(state), config);
}

AgentState update_certainty(AgentState state, int rating, const AgentConfig& config) {
  if (rating < 1 || rating > 5) {
    fail(ErrorKind::InvalidInput, "rating must be in 1..5, got " + std::to_string(rating));
  }
  const double target = (rating - 1) / 4.0;
  const double before = state.urges.certainty;
  state.urges.certainty = clamp01(before + config.ema_alpha * (target - before));
  state.history.push_back({"certainty", state.urges.certainty - before, next_tick(state)});
  return update_activation(std::move(state), config);
}

DevelopmentState development_state(const Urges& urges) {
  const bool competent = urges.competence >= 0.5;
  const bool certain = urges.certainty >= 0.5;
  if (competent && certain) return DevelopmentState::Acclaimed;
  if (competent) return DevelopmentState::UnrecognizedTalent;
  if (certain) return DevelopmentState::Complacent;
  return DevelopmentState::Beginner;
}

}  // namespace psiart
