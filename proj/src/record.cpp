#include "psiart/record.hpp"

#include <string>

#include "psiart/error.hpp"

namespace psiart {

using nlohmann::json;

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::EXP: return "EXP";
    case Quadrant::TAC: return "TAC";
    case Quadrant::AN: return "AN";
    case Quadrant::REF: return "REF";
  }
  return "?";
}

Quadrant quadrant_from_string(std::string_view s) {
  for (Quadrant q : {Quadrant::EXP, Quadrant::TAC, Quadrant::AN, Quadrant::REF}) {
    if (to_string(q) == s) return q;
  }
  fail(ErrorKind::InvalidInput, "unknown quadrant: " + std::string(s));
}

std::string_view to_string(ArtworkStatus s) {
  return s == ArtworkStatus::Accepted ? "Accepted" : "Abandoned";
}

double ArtworkRecord::substituted_fraction() const {
  if (regions.empty()) return 0.0;
  return static_cast<double>(substitutions.size()) / static_cast<double>(regions.size());
}

namespace {

json rect_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

}  // namespace

json to_json(const ArtworkRecord& r) {
  json j;
  j["id"] = r.id;
  j["task"] = {{"kind", r.task_kind},
               {"source_domain", r.source_domain},
               {"target_domain", r.target_domain},
               {"final_target_domain", r.final_target_domain}};
  j["input_ref"] = r.input_ref;
  j["mental_ref"] = r.mental_ref;
  j["executed_ref"] = r.executed_ref;
  json regions = json::array();
  for (const auto& g : r.regions) regions.push_back({{"rect", rect_json(g.rect)}, {"depth", g.depth}});
  j["regions"] = std::move(regions);
  json subs = json::array();
  for (const auto& s : r.substitutions) {
    subs.push_back({{"region", s.region},
                    {"candidate_id", s.candidate_id},
                    {"domain", s.domain},
                    {"quadrant", to_string(s.quadrant)},
                    {"distance", s.distance},
                    {"radius", s.radius}});
  }
  j["substitutions"] = std::move(subs);
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"face_score", c.face_score},
                      {"face_pass", c.face_pass},
                      {"expectation_score", c.expectation_score},
                      {"expectation_pass", c.expectation_pass},
                      {"tau_face", c.tau_face},
                      {"tau_exp", c.tau_exp}});
  }
  j["checks"] = std::move(checks);
  json decisions = json::array();
  for (const auto& d : r.decisions) {
    decisions.push_back({{"kind", d.kind},
                         {"radius", d.radius},
                         {"tau_face", d.tau_face},
                         {"domain", d.domain},
                         {"reason", d.reason}});
  }
  j["decisions"] = std::move(decisions);
  json execs = json::array();
  for (const auto& e : r.executions) {
    execs.push_back({{"palette_size", e.palette_size},
                     {"brush", e.brush},
                     {"brush_radius", e.brush_radius},
                     {"seed", e.seed},
                     {"score", e.score},
                     {"pass", e.pass}});
  }
  j["executions"] = std::move(execs);
  json prov = json::array();
  for (const auto& p : r.provenance) {
    prov.push_back({{"quadrant", to_string(p.quadrant)}, {"action", p.action}, {"data", p.data}});
  }
  j["provenance"] = std::move(prov);
  j["thresholds"] = {{"tau_face_initial", r.tau_face_initial},
                     {"tau_face_final", r.tau_face_final},
                     {"tau_lo", r.tau_lo},
                     {"tau_exp", r.tau_exp},
                     {"accept_threshold", r.accept_threshold}};
  j["exploration"] = {{"r_max", r.r_max},
                      {"resolution_level", r.resolution_level},
                      {"activation", r.activation}};
  j["internal_eval"] = r.internal_eval ? json(*r.internal_eval) : json(nullptr);
  j["status"] = to_string(r.status);
  j["created_at"] = r.created_at;
  j["seed"] = r.seed;
  j["substituted_fraction"] = r.substituted_fraction();
  return j;
}

ArtworkRecord artwork_from_json(const json& j) {
  try {
    ArtworkRecord r;
    r.id = j.at("id").get<std::string>();
    const auto& task = j.at("task");
    r.task_kind = task.at("kind").get<std::string>();
    r.source_domain = task.at("source_domain").get<std::string>();
    r.target_domain = task.at("target_domain").get<std::string>();
    r.final_target_domain = task.at("final_target_domain").get<std::string>();
    r.input_ref = j.at("input_ref").get<std::string>();
    r.mental_ref = j.at("mental_ref").get<std::string>();
    r.executed_ref = j.at("executed_ref").get<std::string>();
    for (const auto& g : j.at("regions")) {
      r.regions.push_back({rect_from(g.at("rect")), g.at("depth").get<int>()});
    }
    for (const auto& s : j.at("substitutions")) {
      r.substitutions.push_back({s.at("region").get<std::size_t>(),
                                 s.at("candidate_id").get<std::string>(),
                                 s.at("domain").get<std::string>(),
                                 quadrant_from_string(s.at("quadrant").get<std::string>()),
                                 s.at("distance").get<double>(), s.at("radius").get<int>()});
    }
    for (const auto& c : j.at("checks")) {
      r.checks.push_back({c.at("face_score").get<double>(), c.at("face_pass").get<bool>(),
                          c.at("expectation_score").get<double>(),
                          c.at("expectation_pass").get<bool>(), c.at("tau_face").get<double>(),
                          c.at("tau_exp").get<double>()});
    }
    for (const auto& d : j.at("decisions")) {
      r.decisions.push_back({d.at("kind").get<std::string>(), d.at("radius").get<int>(),
                             d.at("tau_face").get<double>(), d.at("domain").get<std::string>(),
                             d.at("reason").get<std::string>()});
    }
    for (const auto& e : j.at("executions")) {
      r.executions.push_back({e.at("palette_size").get<int>(), e.at("brush").get<std::string>(),
                              e.at("brush_radius").get<int>(), e.at("seed").get<std::uint64_t>(),
                              e.at("score").get<double>(), e.at("pass").get<bool>()});
    }
    for (const auto& p : j.at("provenance")) {
      r.provenance.push_back({quadrant_from_string(p.at("quadrant").get<std::string>()),
                              p.at("action").get<std::string>(), p.at("data")});
    }
    const auto& th = j.at("thresholds");
    r.tau_face_initial = th.at("tau_face_initial").get<double>();
    r.tau_face_final = th.at("tau_face_final").get<double>();
    r.tau_lo = th.at("tau_lo").get<double>();
    r.tau_exp = th.at("tau_exp").get<double>();
    r.accept_threshold = th.at("accept_threshold").get<double>();
    const auto& ex = j.at("exploration");
    r.r_max = ex.at("r_max").get<int>();
    r.resolution_level = ex.at("resolution_level").get<double>();
    r.activation = ex.at("activation").get<double>();
    if (!j.at("internal_eval").is_null()) r.internal_eval = j.at("internal_eval").get<double>();
    r.status = j.at("status").get<std::string>() == "Accepted" ? ArtworkStatus::Accepted
                                                               : ArtworkStatus::Abandoned;
    r.created_at = j.at("created_at").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed artwork record: ") + e.what());
  }
}

}  // namespace psiart
