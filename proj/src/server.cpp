#include "psiart/server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "psiart/error.hpp"
#include "psiart/fixtures.hpp"
#include "psiart/image_io.hpp"

namespace psiart {

using nlohmann::json;
namespace fs = std::filesystem;

void ServeConfig::validate() const {
  if (port < 0 || port > 65535) {
    fail(ErrorKind::InvalidInput, "port must be in 0..65535, got " + std::to_string(port));
  }
  if (bind.empty()) fail(ErrorKind::InvalidInput, "bind address is empty");
  if (!ui_dir.empty() && !fs::is_directory(ui_dir)) {
    fail(ErrorKind::InvalidInput, "ui directory not found: " + ui_dir.string());
  }
}

namespace {

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Busy: return 409;
    case ErrorKind::EmptyCandidates:
    case ErrorKind::InsufficientData:
    case ErrorKind::InvalidState: return 422;
    default: return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view kind,
                 const std::string& message) {
  reply(res, status, {{"error", kind}, {"message", message}});
}

json state_json(const AgentState& s, const EngineConfig& config) {
  json j = to_json(s);
  j["exploration_radius"] = exploration_radius(s, config.creative.r_max);
  j["tau_face"] = check_strictness(s, config.creative.agent);
  return j;
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) fail(ErrorKind::InvalidInput, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

// Guards every handler so errors always come back as JSON.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, http_status(e.kind()), to_string(e.kind()), e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, "InvalidInput", e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

Server::Server(Engine& engine, ServeConfig config)
    : engine_(engine), config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
  config_.validate();
  if (config_.input_root.empty()) config_.input_root = engine_.store().root();
  engine_.snapshot();  // serving requires a trained store
  routes();
}

Server::~Server() { stop(); }

void Server::routes() {
  auto& s = *http_;

  s.Get("/artworks", guarded([this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& e : engine_.catalog()) list.push_back(to_json(e));
    reply(res, 200, {{"artworks", list}, {"file_base", "/files/"}});
  }));

  s.Get(R"(/artworks/([A-Za-z0-9_\-]+))",
        guarded([this](const httplib::Request& req, httplib::Response& res) {
          reply(res, 200, to_json(engine_.artwork(req.matches[1])));
        }));

  s.Get("/agent/state", guarded([this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, state_json(engine_.agent_state(), engine_.config()));
  }));

  s.Post("/ratings", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.contains("artwork_id") || !body["artwork_id"].is_string()) {
      fail(ErrorKind::InvalidInput, "artwork_id must be a string");
    }
    if (!body.contains("rating") || !body["rating"].is_number_integer()) {
      fail(ErrorKind::InvalidInput, "rating must be an integer in 1..5");
    }
    const int rating = body["rating"].get<int>();
    if (rating < 1 || rating > 5) fail(ErrorKind::InvalidInput, "rating must be in 1..5");
    const std::string rater = body.value("rater", std::string("anonymous"));
    const AgentState before = engine_.agent_state();
    const AgentState after = engine_.rate(body["artwork_id"].get<std::string>(), rating, rater);
    reply(res, 200,
          {{"state", state_json(after, engine_.config())},
           {"certainty_delta", after.urges.certainty - before.urges.certainty}});
  }));

  s.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const auto seed = body.value("seed", std::uint64_t{1});
    RasterImage input{1, 1};
    if (body.value("use_sample", false)) {
      input = fixtures::sample_input();
    } else if (body.contains("input_ref") && body["input_ref"].is_string()) {
      const fs::path ref = body["input_ref"].get<std::string>();
      for (const auto& part : ref) {
        if (part == "..") fail(ErrorKind::InvalidInput, "input_ref may not contain '..'");
      }
      if (ref.is_absolute()) fail(ErrorKind::InvalidInput, "input_ref must be relative");
      const fs::path path = config_.input_root / ref;
      if (!fs::exists(path)) fail(ErrorKind::NotFound, "input not found: " + ref.string());
      input = decode_image(path);
    } else {
      fail(ErrorKind::InvalidInput, "provide input_ref or use_sample");
    }
    CreativeTask task;
    task.target_domain = body.value("target_domain", std::string());
    const auto result = engine_.create(input, seed, task);
    reply(res, 201,
          {{"artwork_id", result.record.id},
           {"status", to_string(result.record.status)},
           {"state", state_json(result.state, engine_.config())}});
  }));

  s.set_mount_point("/files/artworks", (engine_.store().root() / "artworks").string());
  if (!config_.ui_dir.empty()) s.set_mount_point("/", config_.ui_dir.string());

  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (config_.read_only && req.method != "GET" && req.method != "HEAD") {
      reply_error(res, 403, "ReadOnly", "server is running in read-only mode");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });
}

int Server::bind() {
  if (config_.port == 0) {
    const int port = http_->bind_to_any_port(config_.bind);
    if (port < 0) fail(ErrorKind::IoError, "cannot bind " + config_.bind);
    return port;
  }
  if (!http_->bind_to_port(config_.bind, config_.port)) {
    fail(ErrorKind::IoError,
         "cannot bind " + config_.bind + ":" + std::to_string(config_.port));
  }
  return config_.port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

}  // namespace psiart
