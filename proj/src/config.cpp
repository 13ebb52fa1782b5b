#include "psiart/config.hpp"

#include <fstream>

#include "psiart/error.hpp"

namespace psiart {

using nlohmann::json;

const CropPolicy& EngineConfig::crop_policy(const std::string& domain) const {
  static const CropPolicy grid = CropPolicy::grid();
  const auto it = crop_policies.find(domain);
  return it == crop_policies.end() ? grid : it->second;
}

json to_json(const SomConfig& c) {
  return {{"grid_w", c.grid_w}, {"grid_h", c.grid_h},         {"dim", c.dim},
          {"epochs", c.epochs}, {"lr0", c.lr0},               {"lr_final", c.lr_final},
          {"nbhd0", c.nbhd0},   {"nbhd_final", c.nbhd_final}, {"seed", c.seed}};
}

SomConfig som_config_from_json(const json& j, SomConfig d) {
  d.grid_w = j.value("grid_w", d.grid_w);
  d.grid_h = j.value("grid_h", d.grid_h);
  d.dim = j.value("dim", d.dim);
  d.epochs = j.value("epochs", d.epochs);
  d.lr0 = j.value("lr0", d.lr0);
  d.lr_final = j.value("lr_final", d.lr_final);
  d.nbhd0 = j.value("nbhd0", d.nbhd0);
  d.nbhd_final = j.value("nbhd_final", d.nbhd_final);
  d.seed = j.value("seed", d.seed);
  return d;
}

namespace {

json exec_json(const ExecutionConfig& e) {
  return {{"palette_size", e.palette_size},
          {"brush", to_string(e.brush)},
          {"brush_radius", e.brush_radius}};
}

ExecutionConfig exec_from(const json& j, ExecutionConfig d) {
  d.palette_size = j.value("palette_size", d.palette_size);
  if (j.contains("brush")) d.brush = brush_from_string(j.at("brush").get<std::string>());
  d.brush_radius = j.value("brush_radius", d.brush_radius);
  d.validate();
  return d;
}

}  // namespace

json to_json(const EngineConfig& c) {
  json policies = json::object();
  for (const auto& [name, p] : c.crop_policies) {
    policies[name] = {{"whole", p.whole}, {"grid_divisors", p.grid_divisors}};
  }
  const auto& cr = c.creative;
  const auto& ag = cr.agent;
  return {
      {"memory",
       {{"domain_som", to_json(c.memory.domain_som)},
        {"hub_som", to_json(c.memory.hub_som)},
        {"min_entries", c.memory.min_entries},
        {"detail_weights", c.memory.detail_weights}}},
      {"agent",
       {{"activation_min", ag.activation_min},
        {"activation_max", ag.activation_max},
        {"ema_alpha", ag.ema_alpha},
        {"tau_lo", ag.tau_lo},
        {"tau_hi", ag.tau_hi},
        {"initial_competence", ag.initial_competence},
        {"initial_certainty", ag.initial_certainty}}},
      {"creative",
       {{"n_retry", cr.n_retry},
        {"r_max", cr.r_max},
        {"tau_exp", cr.tau_exp},
        {"expectation_sigma", cr.expectation_sigma},
        {"relax_step", cr.relax_step},
        {"accept_threshold", cr.accept_threshold},
        {"face_scales", cr.face_scales},
        {"variance_threshold", cr.segment.variance_threshold},
        {"execution", exec_json(cr.execution)},
        {"replan", exec_json(cr.replan)}}},
      {"face_domain", c.face_domain},
      {"min_face_templates", c.min_face_templates},
      {"crop_policies", policies},
  };
}

EngineConfig engine_config_from_json(const json& j) {
  try {
    EngineConfig c;
    if (j.contains("memory")) {
      const auto& m = j.at("memory");
      if (m.contains("domain_som"))
        c.memory.domain_som = som_config_from_json(m.at("domain_som"), c.memory.domain_som);
      if (m.contains("hub_som"))
        c.memory.hub_som = som_config_from_json(m.at("hub_som"), c.memory.hub_som);
      c.memory.min_entries = m.value("min_entries", c.memory.min_entries);
      if (m.contains("detail_weights"))
        c.memory.detail_weights = m.at("detail_weights").get<std::array<double, 5>>();
    }
    auto& cr = c.creative;
    if (j.contains("agent")) {
      const auto& a = j.at("agent");
      auto& ag = cr.agent;
      ag.activation_min = a.value("activation_min", ag.activation_min);
      ag.activation_max = a.value("activation_max", ag.activation_max);
      ag.ema_alpha = a.value("ema_alpha", ag.ema_alpha);
      ag.tau_lo = a.value("tau_lo", ag.tau_lo);
      ag.tau_hi = a.value("tau_hi", ag.tau_hi);
      ag.initial_competence = a.value("initial_competence", ag.initial_competence);
      ag.initial_certainty = a.value("initial_certainty", ag.initial_certainty);
    }
    if (j.contains("creative")) {
      const auto& k = j.at("creative");
      cr.n_retry = k.value("n_retry", cr.n_retry);
      cr.r_max = k.value("r_max", cr.r_max);
      cr.tau_exp = k.value("tau_exp", cr.tau_exp);
      cr.expectation_sigma = k.value("expectation_sigma", cr.expectation_sigma);
      cr.relax_step = k.value("relax_step", cr.relax_step);
      cr.accept_threshold = k.value("accept_threshold", cr.accept_threshold);
      if (k.contains("face_scales"))
        cr.face_scales = k.at("face_scales").get<std::array<double, 3>>();
      cr.segment.variance_threshold =
          k.value("variance_threshold", cr.segment.variance_threshold);
      if (k.contains("execution")) cr.execution = exec_from(k.at("execution"), cr.execution);
      if (k.contains("replan")) cr.replan = exec_from(k.at("replan"), cr.replan);
    }
    cr.detail_weights = c.memory.detail_weights;
    c.face_domain = j.value("face_domain", c.face_domain);
    c.min_face_templates = j.value("min_face_templates", c.min_face_templates);
    if (j.contains("crop_policies")) {
      c.crop_policies.clear();
      for (const auto& [name, p] : j.at("crop_policies").items()) {
        c.crop_policies[name] = {p.value("whole", false),
                                 p.value("grid_divisors", std::vector<int>{})};
      }
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed engine config: ") + e.what());
  }
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
  return engine_config_from_json(j);
}

}  // namespace psiart
