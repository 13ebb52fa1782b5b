#include <doctest.h>

#include "psiart/agent.hpp"
#include "psiart/error.hpp"

using namespace psiart;

namespace {

AgentState with_urges(double c, double t) {
  AgentState s;
  s.urges = {c, t};
  return update_activation(s);
}

AgentState with_rl(double rl) {
  AgentState s;
  s.activation = 1.0 - rl;
  s.resolution_level = rl;
  return s;
}

}  // namespace

TEST_SUITE("agent") {

TEST_CASE("activation blends the unmet urges") {
  auto s = with_urges(1, 1);
  CHECK(s.activation == doctest::Approx(0.2));
  CHECK(s.resolution_level == doctest::Approx(0.8));
  s = with_urges(0, 0);
  CHECK(s.activation == doctest::Approx(0.9));
  CHECK(s.resolution_level == doctest::Approx(0.1));
  s = with_urges(0.5, 0.5);
  CHECK(s.activation == doctest::Approx(0.55));
  CHECK(s.resolution_level == doctest::Approx(0.45));
}

TEST_CASE("exploration radius") {
  CHECK(exploration_radius(with_rl(1.0), 8) == 0);
  CHECK(exploration_radius(with_rl(0.0), 8) == 8);
  CHECK(exploration_radius(with_rl(0.45), 8) == 4);
  CHECK_THROWS_AS(exploration_radius(with_rl(0.5), -1), Error);
  int prev = 1 << 30;
  for (int i = 0; i <= 100; ++i) {
    const int r = exploration_radius(with_rl(i / 100.0), 8);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("check strictness") {
  CHECK(check_strictness(with_rl(0.0)) == doctest::Approx(0.35));
  CHECK(check_strictness(with_rl(1.0)) == doctest::Approx(0.75));
  CHECK(check_strictness(with_rl(0.5)) == doctest::Approx(0.55));
}

TEST_CASE("competence EMA") {
  CHECK(update_competence(with_urges(0.5, 0.5), true).urges.competence == doctest::Approx(0.6));
  CHECK(update_competence(with_urges(0.5, 0.5), false).urges.competence == doctest::Approx(0.4));
  auto s = with_urges(0.1, 0.5);
  for (int i = 0; i < 100; ++i) {
    const double before = s.urges.competence;
    s = update_competence(s, true);
    CHECK(s.urges.competence >= before);
    CHECK(s.urges.competence <= 1.0);
  }
  CHECK(s.urges.competence == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("certainty EMA") {
  CHECK(update_certainty(with_urges(0.5, 0.5), 5).urges.certainty == doctest::Approx(0.6));
  CHECK(update_certainty(with_urges(0.5, 0.5), 1).urges.certainty == doctest::Approx(0.4));
  CHECK(update_certainty(with_urges(0.5, 0.5), 3).urges.certainty == doctest::Approx(0.5));
  for (int bad : {0, 6, -3}) CHECK_THROWS_AS(update_certainty(with_urges(0.5, 0.5), bad), Error);
}

TEST_CASE("higher ratings never lower certainty") {
  for (int p = 0; p <= 10; ++p) {
    const auto s = with_urges(0.3, p / 10.0);
    for (int r = 1; r < 5; ++r) {
      CHECK(update_certainty(s, r + 1).urges.certainty >= update_certainty(s, r).urges.certainty);
    }
  }
}

TEST_CASE("RL plus activation is exactly one after every event") {
  auto s = initial_agent_state();
  const int ratings[] = {5, 1, 3, 4, 2, 5, 5};
  for (int i = 0; i < 7; ++i) {
    s = (i % 2) ? update_certainty(s, ratings[i]) : update_competence(s, i % 3 == 0);
    CHECK(s.resolution_level + s.activation == 1.0);
    CHECK(s.urges.competence >= 0.0);
    CHECK(s.urges.competence <= 1.0);
    CHECK(s.urges.certainty >= 0.0);
    CHECK(s.urges.certainty <= 1.0);
  }
  REQUIRE(s.history.size() == 7);
  for (std::size_t i = 1; i < s.history.size(); ++i) CHECK(s.history[i].tick > s.history[i - 1].tick);
}

TEST_CASE("development labels") {
  CHECK(development_state({0.2, 0.2}) == DevelopmentState::Beginner);
  CHECK(development_state({0.9, 0.9}) == DevelopmentState::Acclaimed);
  CHECK(development_state({0.5, 0.5}) == DevelopmentState::Acclaimed);
  CHECK(development_state({0.8, 0.1}) == DevelopmentState::UnrecognizedTalent);
  CHECK(development_state({0.1, 0.8}) == DevelopmentState::Complacent);
  CHECK(development_state(initial_agent_state().urges) == DevelopmentState::Beginner);
}

}  // TEST_SUITE
