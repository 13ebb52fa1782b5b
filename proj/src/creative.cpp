#include "psiart/creative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psiart/error.hpp"

namespace psiart {

using nlohmann::json;

std::string_view to_string(ReflectiveDecision::Kind k) {
  switch (k) {
    case ReflectiveDecision::Kind::RetryExplore: return "RetryExplore";
    case ReflectiveDecision::Kind::RelaxThreshold: return "RelaxThreshold";
    case ReflectiveDecision::Kind::ChangeDomain: return "ChangeDomain";
    case ReflectiveDecision::Kind::Abandon: return "Abandon";
  }
  return "?";
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidInput, "vector length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// --- domain choice ---------------------------------------------------------------

std::vector<DomainScore> rank_target_domains(const AssociativeMemory& memory,
                                             const RasterImage& inspiration,
                                             std::string_view source_domain) {
  const auto hist = color_histogram(inspiration, ColorSpace::HSV);
  std::vector<DomainScore> out;
  for (const auto& dm : memory.domains) {
    if (dm.name == source_domain) continue;
    std::array<double, kHistogramLength> mean{};
    for (const auto& e : dm.entries) {
      for (int i = 0; i < kHistogramLength; ++i) mean[i] += e.features.hsv.bins[i];
    }
    if (!dm.entries.empty()) {
      for (double& v : mean) v /= static_cast<double>(dm.entries.size());
    }
    out.push_back({dm.name, cosine_similarity(hist.bins, mean)});
  }
  std::stable_sort(out.begin(), out.end(), [](const DomainScore& a, const DomainScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.name < b.name;
  });
  return out;
}

std::string choose_target_domain(const AssociativeMemory& memory, const RasterImage& inspiration,
                                 std::string_view source_domain,
                                 const std::set<std::string>& excluded) {
  for (const auto& s : rank_target_domains(memory, inspiration, source_domain)) {
    if (!excluded.contains(s.name)) return s.name;
  }
  fail(ErrorKind::InvalidState, "no candidate target domain registered");
}

// --- S1: tacit and exploratory ------------------------------------------------------

Substitution tacit_default(const AssociativeMemory& memory, const Region& region,
                           std::size_t region_index, std::string_view target_domain,
                           const std::array<double, 5>& weights) {
  const auto candidates =
      cross_domain_candidates(memory, region.features.general, target_domain, 0);
  const Selection pick = select_substitute(candidates, region.features, weights);
  return {region_index, region.rect, pick.entry, Quadrant::TAC, pick.distance, 0};
}

std::vector<Substitution> exploratory_candidates(const AssociativeMemory& memory,
                                                 const Region& region, std::size_t region_index,
                                                 std::string_view target_domain, int radius,
                                                 const std::array<double, 5>& weights) {
  if (radius < 1) fail(ErrorKind::InvalidInput, "exploration radius must be >= 1");
  const auto candidates =
      cross_domain_candidates(memory, region.features.general, target_domain, radius);
  const auto ref = weighted_detail(region.features, weights);
  std::vector<Substitution> out;
  out.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    const double d = std::sqrt(squared_distance(weighted_detail(c.entry->features, weights), ref));
    out.push_back({region_index, region.rect, c.entry, Quadrant::EXP, d, radius});
  }
  std::stable_sort(out.begin(), out.end(), [](const Substitution& a, const Substitution& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.candidate->id < b.candidate->id;
  });
  return out;
}

// --- mental image ----------------------------------------------------------------

RasterImage compose_mental_image(const RasterImage& input,
                                 std::span<const Substitution> substitutions) {
  for (std::size_t i = 0; i < substitutions.size(); ++i) {
    const Rect& r = substitutions[i].rect;
    if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.x + r.w > input.width() ||
        r.y + r.h > input.height()) {
      fail(ErrorKind::InvalidInput, "substitution rectangle outside the image");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (substitutions[j].region == substitutions[i].region ||
          substitutions[j].rect.overlaps(r)) {
        fail(ErrorKind::InvalidInput, "overlapping substitutions");
      }
    }
  }
  RasterImage out = input;
  for (const auto& s : substitutions) {
    out.paste(resize_bilinear(s.candidate->image, s.rect.w, s.rect.h), s.rect.x, s.rect.y);
  }
  return out;
}

// --- S2: analytic check ----------------------------------------------------------------

double face_score(const RasterImage& img, const FaceTemplate& face,
                  std::span<const double> scales) {
  const int w = img.width();
  const int h = img.height();
  const auto gray = grayscale(img);
  std::vector<double> squares(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) squares[i] = gray[i] * gray[i];
  const IntegralImage sum(gray, w, h);
  const IntegralImage sum_sq(squares, w, h);

  double best = 0.0;
  for (double s : scales) {
    const int tw = std::clamp(static_cast<int>(std::lround(s * w)), 8, w);
    const int th = std::clamp(static_cast<int>(std::lround(s * h)), 8, h);
    auto tpl = resize_plane(face.luminance, face.width, face.height, tw, th);
    double mean = 0.0;
    for (double v : tpl) mean += v;
    mean /= static_cast<double>(tpl.size());
    double norm = 0.0;
    for (double& v : tpl) {
      v -= mean;
      norm += v * v;
    }
    if (norm <= 1e-12) continue;
    norm = std::sqrt(norm);

    const int stride = std::max(1, std::min(tw, th) / 16);
    auto positions = [stride](int extent) {
      std::vector<int> p;
      for (int v = 0; v <= extent; v += stride) p.push_back(v);
      if (p.back() != extent) p.push_back(extent);
      return p;
    };
    const double n = static_cast<double>(tw) * th;
    for (int y : positions(h - th)) {
      for (int x : positions(w - tw)) {
        const Rect r{x, y, tw, th};
        const double s1 = sum.sum(r);
        const double var = sum_sq.sum(r) - s1 * s1 / n;
        if (var <= 1e-9) continue;
        double dot = 0.0;
        for (int ty = 0; ty < th; ++ty) {
          const double* row = &gray[static_cast<std::size_t>(y + ty) * w + x];
          const double* trow = &tpl[static_cast<std::size_t>(ty) * tw];
          for (int tx = 0; tx < tw; ++tx) dot += row[tx] * trow[tx];
        }
        best = std::max(best, dot / (std::sqrt(var) * norm));
      }
    }
  }
  return std::clamp(best, 0.0, 1.0);
}

CheckResult analytic_check(const RasterImage& mental, const FaceTemplate& face, double tau_face,
                           std::span<const Substitution> substitutions,
                           const CreativeConfig& config) {
  CheckResult c;
  c.tau_face = tau_face;
  c.tau_exp = config.tau_exp;
  c.face_score = face_score(mental, face, config.face_scales);
  c.face_pass = c.face_score >= tau_face;
  if (substitutions.empty()) {
    c.expectation_score = 1.0;
  } else {
    const double s2 = config.expectation_sigma * config.expectation_sigma;
    double acc = 0.0;
    for (const auto& s : substitutions) acc += std::exp(-s.distance * s.distance / s2);
    c.expectation_score = acc / static_cast<double>(substitutions.size());
  }
  c.expectation_pass = c.expectation_score >= config.tau_exp;
  return c;
}

CheckResult analytic_check(const RasterImage& mental, const FaceTemplate& face,
                           const AgentState& state, std::span<const Substitution> substitutions,
                           const CreativeConfig& config) {
  return analytic_check(mental, face, check_strictness(state, config.agent), substitutions,
                        config);
}

// --- S2: reflection ------------------------------------------------------------------

ReflectiveDecision reflective_decide(const CheckResult& check, int attempt,
                                     const ReflectiveContext& ctx, const CreativeConfig& config) {
  using Kind = ReflectiveDecision::Kind;
  const double tau_lo = config.agent.tau_lo;
  if (ctx.exploration_possible && attempt < config.n_retry) {
    return {Kind::RetryExplore, ctx.radius + 1, ctx.tau_face, {}};
  }
  // Relaxing only helps when the face gate is what failed.
  if (ctx.exploration_possible && !check.face_pass && ctx.tau_face > tau_lo) {
    return {Kind::RelaxThreshold, ctx.radius, std::max(tau_lo, ctx.tau_face - config.relax_step),
            {}};
  }
  if (!ctx.unused_domains.empty()) {
    return {Kind::ChangeDomain, ctx.radius, ctx.tau_face, ctx.unused_domains.front()};
  }
  return {Kind::Abandon, ctx.radius, ctx.tau_face, {}};
}

bool permitted_transition(Quadrant from, Quadrant to) {
  switch (from) {
    case Quadrant::EXP:
    case Quadrant::TAC:
      // S1 generation hands over to S2 only through the analytic check.
      return to != Quadrant::REF;
    case Quadrant::AN:
      // A check either passes on to execution monitoring or triggers reflection.
      return to == Quadrant::AN || to == Quadrant::REF;
    case Quadrant::REF:
      return true;
  }
  return false;
}

bool provenance_is_permitted(std::span<const ProvenanceStep> steps) {
  if (steps.empty()) return true;
  if (steps.front().quadrant != Quadrant::EXP) return false;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (!permitted_transition(steps[i - 1].quadrant, steps[i].quadrant)) return false;
  }
  return true;
}

// --- the creative loop ---------------------------------------------------------------

namespace {

struct LoopState {
  std::string target;
  std::set<std::string> used;
  int attempt = 0;  // failed checks against the current domain
  int widen = 0;    // extra radius from RetryExplore
  double relax = 0.0;
  double tau_face = 0.0;
  bool need_compose = true;
};

SubstitutionRecord to_record(const Substitution& s) {
  return {s.region, s.candidate->id, s.candidate->domain, s.quadrant, s.distance, s.radius};
}

}  // namespace

TaskOutcome run_task(const CreativeTask& task, const RasterImage& input,
                     const AssociativeMemory& memory, const FaceTemplate& face, AgentState state,
                     const CreativeConfig& config, std::uint64_t seed, std::string artwork_id,
                     std::string created_at, const RunHooks& hooks) {
  const AgentConfig& ac = config.agent;
  ArtworkRecord rec;
  rec.id = std::move(artwork_id);
  rec.created_at = std::move(created_at);
  rec.seed = seed;
  rec.source_domain = task.source_domain;
  rec.input_ref = "artworks/" + rec.id + "_input.png";
  rec.tau_lo = ac.tau_lo;
  rec.tau_exp = config.tau_exp;
  rec.accept_threshold = config.accept_threshold;
  rec.r_max = config.r_max;
  rec.resolution_level = state.resolution_level;
  rec.activation = state.activation;

  auto step = [&rec](Quadrant q, std::string action, json data = json::object()) {
    rec.provenance.push_back({q, std::move(action), std::move(data)});
  };

  // EXP: inspiration picks the association domain.
  const auto ranking = rank_target_domains(memory, input, task.source_domain);
  if (ranking.empty()) fail(ErrorKind::InvalidState, "no candidate target domain registered");
  LoopState ls;
  ls.target = task.target_domain.empty() ? ranking.front().name : task.target_domain;
  if (!memory.domain(ls.target) || ls.target == task.source_domain) {
    fail(ErrorKind::InvalidInput, "target domain '" + ls.target + "' is not a candidate");
  }
  ls.used.insert(ls.target);
  {
    json scores = json::array();
    for (const auto& s : ranking) scores.push_back({{"domain", s.name}, {"score", s.score}});
    step(Quadrant::EXP, "choose_target_domain", {{"domain", ls.target}, {"ranking", scores}});
  }
  rec.target_domain = ls.target;

  const auto regions = segment_image(input, state.resolution_level, config.segment);
  for (const auto& r : regions) rec.regions.push_back({r.rect, r.depth});

  ls.tau_face = check_strictness(state, ac);
  rec.tau_face_initial = ls.tau_face;
  const std::size_t budget =
      static_cast<std::size_t>(config.n_retry) * memory.domains.size();

  std::vector<Substitution> subs;
  RasterImage mental = input;
  int checks = 0;
  bool accepted_mental = false;

  auto unused_domains = [&]() {
    std::vector<std::string> out;
    for (const auto& s : ranking) {
      if (!ls.used.contains(s.name)) out.push_back(s.name);
    }
    return out;
  };

  while (true) {
    const DomainMemory* dm = memory.domain(ls.target);
    CheckResult check;
    bool exploration_possible = !dm->empty();

    if (!exploration_possible) {
      step(Quadrant::AN, "no_candidates", {{"domain", ls.target}});
    } else {
      if (ls.need_compose) {
        subs.clear();
        const int base_radius = exploration_radius(state, config.r_max);
        const int radius = std::max(1, base_radius + ls.widen);
        for (std::size_t i = 0; i < regions.size(); ++i) {
          if (ls.attempt == 0) {
            try {
              subs.push_back(tacit_default(memory, regions[i], i, ls.target,
                                           config.detail_weights));
              step(Quadrant::TAC, "tacit_default",
                   {{"region", i},
                    {"candidate", subs.back().candidate->id},
                    {"distance", subs.back().distance}});
              continue;
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::EmptyCandidates) throw;
            }
          }
          json data = {{"region", i},
                       {"radius", radius},
                       {"base_radius", base_radius},
                       {"widen", ls.widen},
                       {"resolution_level", state.resolution_level}};
          try {
            auto ranked = exploratory_candidates(memory, regions[i], i, ls.target, radius,
                                                 config.detail_weights);
            data["candidate"] = ranked.front().candidate->id;
            data["distance"] = ranked.front().distance;
            data["considered"] = ranked.size();
            subs.push_back(ranked.front());
            step(Quadrant::EXP, "explore", std::move(data));
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyCandidates) throw;
            step(Quadrant::EXP, "no_candidate", std::move(data));
          }
        }
        mental = compose_mental_image(input, subs);
      }

      if (hooks.checkpoint) {
        hooks.checkpoint(state);
        ls.tau_face = std::max(ac.tau_lo, check_strictness(state, ac) - ls.relax);
      }
      check = analytic_check(mental, face, ls.tau_face, subs, config);
      ++checks;
      rec.checks.push_back({check.face_score, check.face_pass, check.expectation_score,
                            check.expectation_pass, check.tau_face, check.tau_exp});
      step(Quadrant::AN, "analytic_check",
           {{"face_score", check.face_score},
            {"tau_face", check.tau_face},
            {"expectation_score", check.expectation_score},
            {"tau_exp", check.tau_exp},
            {"passed", check.passed()},
            {"substitutions", subs.size()}});
      if (check.passed()) {
        accepted_mental = true;
        break;
      }
      ++ls.attempt;
    }

    ReflectiveDecision decision;
    std::string reason;
    if (rec.decisions.size() + 1 >= budget) {
      decision = {ReflectiveDecision::Kind::Abandon, 0, ls.tau_face, {}};
      reason = "iteration budget exhausted";
    } else {
      ReflectiveContext ctx{std::max(1, exploration_radius(state, config.r_max) + ls.widen),
                            ls.tau_face, unused_domains(), exploration_possible};
      decision = reflective_decide(check, ls.attempt, ctx, config);
      reason = exploration_possible ? "check failed" : "target domain has no entries";
    }
    rec.decisions.push_back({std::string(to_string(decision.kind)), decision.radius,
                             decision.tau_face, decision.domain, reason});
    step(Quadrant::REF, std::string(to_string(decision.kind)),
         {{"radius", decision.radius},
          {"tau_face", decision.tau_face},
          {"domain", decision.domain},
          {"reason", reason}});

    using Kind = ReflectiveDecision::Kind;
    if (decision.kind == Kind::Abandon) break;
    switch (decision.kind) {
      case Kind::RetryExplore:
        ++ls.widen;
        ls.need_compose = true;
        break;
      case Kind::RelaxThreshold:
        ls.relax += ls.tau_face - decision.tau_face;
        ls.tau_face = decision.tau_face;
        ls.need_compose = false;  // re-check the same mental image
        break;
      case Kind::ChangeDomain:
        ls.target = decision.domain;
        ls.used.insert(ls.target);
        ls.attempt = 0;
        ls.widen = 0;
        ls.need_compose = true;
        break;
      case Kind::Abandon: break;
    }
  }

  rec.final_target_domain = ls.target;
  rec.tau_face_final = ls.tau_face;
  TaskOutcome out;
  out.analytic_checks = checks;

  if (accepted_mental) {
    for (const auto& s : subs) rec.substitutions.push_back(to_record(s));
    rec.mental_ref = "artworks/" + rec.id + "_mental.png";
    ExecutionConfig exec = config.execution;
    exec.seed = seed;
    RasterImage executed = execute(mental, exec);
    auto eval = internal_eval(executed, mental, config.accept_threshold);
    rec.executions.push_back({exec.palette_size, std::string(to_string(exec.brush)),
                              exec.brush_radius, exec.seed, eval.score, eval.pass});
    step(Quadrant::AN, "internal_eval", {{"score", eval.score}, {"pass", eval.pass}});
    if (!eval.pass) {
      ExecutionConfig replan = config.replan;
      replan.seed = seed + 1;
      step(Quadrant::REF, "replan_execution",
           {{"palette_size", replan.palette_size},
            {"brush", to_string(replan.brush)},
            {"brush_radius", replan.brush_radius}});
      executed = execute(mental, replan);
      eval = internal_eval(executed, mental, config.accept_threshold);
      rec.executions.push_back({replan.palette_size, std::string(to_string(replan.brush)),
                                replan.brush_radius, replan.seed, eval.score, eval.pass});
      step(Quadrant::AN, "internal_eval", {{"score", eval.score}, {"pass", eval.pass}});
    }
    rec.internal_eval = eval.score;
    rec.executed_ref = "artworks/" + rec.id + ".png";
    rec.status = eval.pass ? ArtworkStatus::Accepted : ArtworkStatus::Abandoned;
    state = update_competence(std::move(state), eval.pass, ac);
    out.executed = std::move(executed);
  } else {
    rec.status = ArtworkStatus::Abandoned;
    state = update_competence(std::move(state), false, ac);
  }
  if (rec.status == ArtworkStatus::Accepted) ++state.artworks_made;

  out.record = std::move(rec);
  out.mental = std::move(mental);
  out.state = std::move(state);
  return out;
}

}  // namespace psiart
