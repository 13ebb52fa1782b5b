// psiart: train, create, rate, status, serve, fixtures.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>

#include "psiart/engine.hpp"
#include "psiart/error.hpp"
#include "psiart/fixtures.hpp"
#include "psiart/image_io.hpp"
#include "psiart/server.hpp"

namespace {

using namespace psiart;
namespace fs = std::filesystem;

constexpr int kExitError = 2;
constexpr int kExitAbandoned = 3;

std::optional<EngineConfig> config_from(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_engine_config(path);
}

void print_state(const AgentState& s, const EngineConfig& config) {
  std::printf("competence        %.6f\n", s.urges.competence);
  std::printf("certainty         %.6f\n", s.urges.certainty);
  std::printf("activation        %.6f\n", s.activation);
  std::printf("resolution_level  %.6f\n", s.resolution_level);
  std::printf("exploration_radius %d\n", exploration_radius(s, config.creative.r_max));
  std::printf("tau_face          %.6f\n", check_strictness(s, config.creative.agent));
  std::printf("artworks_made     %llu\n", static_cast<unsigned long long>(s.artworks_made));
  std::printf("label             %s\n", std::string(to_string(development_state(s.urges))).c_str());
}

Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psiart: dual-process portrait-by-association engine"};
  app.require_subcommand(1);

  std::string store = "store";
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  app.add_option("--store", store, "Store directory")->envname("PSIART_STORE");
  app.add_option("--config", config_path, "Engine configuration (JSON)")
      ->envname("PSIART_CONFIG");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed")->envname("PSIART_SEED");

  auto* train = app.add_subcommand("train", "Ingest datasets/<domain>/ and save a snapshot");
  std::string datasets;
  train->add_option("--datasets", datasets, "Datasets directory")->required();

  auto* create = app.add_subcommand("create", "Run one creative session");
  std::string input;
  bool sample = false;
  std::string target;
  auto* input_opt = create->add_option("--input", input, "Inspiration image");
  create->add_flag("--sample", sample, "Use the built-in sample face")->excludes(input_opt);
  create->add_option("--target", target, "Force the association domain");

  auto* rate = app.add_subcommand("rate", "Record a human rating");
  std::string artwork_id;
  int rating = 0;
  std::string rater = "cli";
  rate->add_option("id", artwork_id, "Artwork id")->required();
  rate->add_option("rating", rating, "Rating 1..5")->required();
  rate->add_option("--rater", rater, "Rater id");

  auto* status = app.add_subcommand("status", "Show the agent state");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  ServeConfig sc;
  std::string ui_dir;
  serve->add_option("--bind", sc.bind, "Bind address")->envname("PSIART_BIND");
  serve->add_option("--port", sc.port, "Port (0 picks one)")->envname("PSIART_PORT");
  serve->add_flag("--read-only", sc.read_only, "Reject mutating requests")
      ->envname("PSIART_READ_ONLY");
  serve->add_option("--ui-dir", ui_dir, "Static UI directory")->envname("PSIART_UI_DIR");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the procedural fixture corpus");
  std::string out_dir;
  fixtures_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }
  seed_given = seed_opt->count() > 0 || std::getenv("PSIART_SEED") != nullptr;

  try {
    if (*fixtures_cmd) {
      fixtures::write_corpus(fixtures::corpus(), out_dir);
      std::printf("wrote fixture corpus to %s\n", out_dir.c_str());
      return 0;
    }

    Engine engine(store, config_from(config_path));

    if (*train) {
      const auto summary =
          engine.train(datasets, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
      std::size_t total = 0;
      for (const auto& d : summary.domains) {
        std::printf("domain %-12s entries %5zu  qe rgb %.4f hsv %.4f lab %.4f gabor %.4f haar %.4f\n",
                    d.name.c_str(), d.entries, d.final_qe[0], d.final_qe[1], d.final_qe[2],
                    d.final_qe[3], d.final_qe[4]);
        total += d.entries;
      }
      std::printf("hub assignments %zu of %zu entries, hub qe %.4f\n", summary.hub_assignments,
                  total, summary.hub_qe);
      std::printf("face template from %zu images\n", summary.face_templates);
      std::printf("snapshot %s\n", summary.snapshot_id.c_str());
      return 0;
    }

    if (*create) {
      if (!sample && input.empty()) fail(ErrorKind::InvalidInput, "give --input or --sample");
      const RasterImage img = sample ? fixtures::sample_input() : decode_image(input);
      CreativeTask task;
      task.target_domain = target;
      const auto result = engine.create(img, seed, task);
      const auto& r = result.record;
      std::map<std::string, int> per_quadrant;
      for (const auto& s : r.provenance) ++per_quadrant[std::string(to_string(s.quadrant))];
      std::printf("artwork %s\n", r.id.c_str());
      std::printf("status %s\n", std::string(to_string(r.status)).c_str());
      std::printf("target %s (final %s)\n", r.target_domain.c_str(),
                  r.final_target_domain.c_str());
      std::printf("regions %zu, substituted %zu (%.0f%%)\n", r.regions.size(),
                  r.substitutions.size(), 100.0 * r.substituted_fraction());
      std::printf("provenance EXP %d TAC %d AN %d REF %d\n", per_quadrant["EXP"],
                  per_quadrant["TAC"], per_quadrant["AN"], per_quadrant["REF"]);
      for (const auto& d : r.decisions) {
        std::printf("  decision %s radius %d tau %.3f %s\n", d.kind.c_str(), d.radius, d.tau_face,
                    d.domain.c_str());
      }
      if (r.internal_eval) std::printf("internal_eval %.4f\n", *r.internal_eval);
      return r.status == ArtworkStatus::Accepted ? 0 : kExitAbandoned;
    }

    if (*rate) {
      const auto s = engine.rate(artwork_id, rating, rater);
      print_state(s, engine.config());
      return 0;
    }

    if (*status) {
      print_state(engine.agent_state(), engine.config());
      std::printf("ratings           %zu\n", engine.store().read_ratings().size());
      std::printf("artworks          %zu\n", engine.catalog().size());
      if (auto id = engine.store().current_snapshot_id()) {
        std::printf("snapshot          %s\n", id->c_str());
      }
      return 0;
    }

    if (*serve) {
      sc.ui_dir = ui_dir;
      Server server(engine, sc);
      const int port = server.bind();
      std::printf("listening on http://%s:%d\n", sc.bind.c_str(), port);
      std::fflush(stdout);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.run();
      g_server = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
