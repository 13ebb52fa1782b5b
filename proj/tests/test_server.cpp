#include <doctest.h>

#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "psiart/error.hpp"
#include "psiart/image_io.hpp"
#include "psiart/server.hpp"
#include "test_support.hpp"

using namespace psiart;
using nlohmann::json;

namespace {

// Runs a server for the engine on a free port until destroyed.
class LiveServer {
 public:
  LiveServer(Engine& engine, ServeConfig cfg = {}) {
    cfg.port = 0;
    server_ = std::make_unique<Server>(engine, cfg);
    port_ = server_->bind();
    thread_ = std::thread([this] { server_->run(); });
  }
  ~LiveServer() {
    server_->stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }

 private:
  std::unique_ptr<Server> server_;
  int port_ = 0;
  std::thread thread_;
};

json post(httplib::Client& c, const std::string& path, const json& body, int expect) {
  const auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expect);
  return json::parse(res->body);
}

json get(httplib::Client& c, const std::string& path, int expect) {
  const auto res = c.Get(path);
  REQUIRE(res);
  CHECK(res->status == expect);
  return json::parse(res->body);
}

}  // namespace

TEST_SUITE("server") {

TEST_CASE("untrained store cannot be served") {
  test::TempDir dir("server_untrained");
  Engine engine(dir.path(), EngineConfig{});
  CHECK_THROWS_AS(Server(engine, {}), Error);
  ServeConfig bad;
  bad.port = 70000;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("sessions, catalog, ratings and state over HTTP") {
  test::TempDir dir("server_flow");
  test::trained_store(dir.path());
  write_png(dir.path() / "in.png", test::corpus().input);
  json state_before_restart;
  {
    Engine engine(dir.path());
    ServeConfig cfg;
    cfg.input_root = dir.path();
    LiveServer live(engine, cfg);
    auto c = live.client();

    CHECK(get(c, "/artworks", 200)["artworks"].empty());
    const auto state = get(c, "/agent/state", 200);
    CHECK(state["label"] == "Beginner");

    const auto created = post(c, "/sessions", {{"use_sample", true}, {"seed", 3}}, 201);
    const std::string id = created["artwork_id"];
    CHECK(id == "art-000001");
    const auto by_ref = post(c, "/sessions", {{"input_ref", "in.png"}, {"seed", 4}}, 201);
    CHECK(by_ref["artwork_id"] == "art-000002");
    post(c, "/sessions", {{"input_ref", "../in.png"}}, 400);
    post(c, "/sessions", {{"input_ref", "nope.png"}}, 404);
    post(c, "/sessions", json::object(), 400);
    post(c, "/sessions", {{"use_sample", true}, {"target_domain", "faces"}}, 400);

    const auto list = get(c, "/artworks", 200);
    REQUIRE(list["artworks"].size() == 2);
    CHECK(list["artworks"][0]["id"] == id);
    const auto rec = get(c, "/artworks/" + id, 200);
    CHECK(rec["id"] == id);
    CHECK(!rec["provenance"].empty());
    const auto err = get(c, "/artworks/art-999999", 404);
    CHECK(err["error"] == "NotFound");

    if (created["status"] == "Accepted") {
      const auto png = c.Get("/files/artworks/" + id + ".png");
      REQUIRE(png);
      CHECK(png->status == 200);
      CHECK(decode_image_bytes({png->body.begin(), png->body.end()}).width() == 128);
    }

    const double c0 = get(c, "/agent/state", 200)["certainty"];
    const auto rated = post(c, "/ratings", {{"artwork_id", id}, {"rating", 5}, {"rater", "r"}}, 200);
    CHECK(rated["certainty_delta"].get<double>() == doctest::Approx(0.2 * (1.0 - c0)));
    CHECK(rated["state"]["certainty"].get<double>() ==
          doctest::Approx(c0 + 0.2 * (1.0 - c0)));

    CHECK(post(c, "/ratings", {{"artwork_id", id}, {"rating", 7}}, 400)["error"] == "InvalidInput");
    post(c, "/ratings", {{"artwork_id", id}, {"rating", "5"}}, 400);
    post(c, "/ratings", {{"artwork_id", id}, {"rating", 4.5}}, 400);
    post(c, "/ratings", {{"rating", 4}}, 400);
    post(c, "/ratings", {{"artwork_id", "art-000404"}, {"rating", 4}}, 404);
    const auto bad = c.Post("/ratings", "{not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(engine.store().read_ratings().size() == 1);

    state_before_restart = get(c, "/agent/state", 200);
  }
  Engine engine(dir.path());
  LiveServer live(engine);
  auto c = live.client();
  CHECK(get(c, "/agent/state", 200) == state_before_restart);
  CHECK(get(c, "/artworks", 200)["artworks"].size() == 2);
}

TEST_CASE("concurrent session request is rejected with 409") {
  test::TempDir dir("server_busy");
  test::trained_store(dir.path());
  Engine engine(dir.path());
  LiveServer live(engine);
  auto c = live.client();

  std::promise<void> entered, release;
  auto release_f = release.get_future().share();
  bool first = true;
  auto running = std::async(std::launch::async, [&] {
    return engine.create(test::corpus().input, 1, {}, [&] {
      if (!first) return;
      first = false;
      entered.set_value();
      release_f.wait();
    });
  });
  entered.get_future().wait();
  CHECK(post(c, "/sessions", {{"use_sample", true}}, 409)["error"] == "Busy");
  CHECK(get(c, "/artworks", 200)["artworks"].empty());
  release.set_value();
  running.get();
  post(c, "/sessions", {{"use_sample", true}}, 201);
}

TEST_CASE("read-only mode refuses mutations") {
  test::TempDir dir("server_ro");
  test::trained_store(dir.path());
  Engine engine(dir.path());
  ServeConfig cfg;
  cfg.read_only = true;
  LiveServer live(engine, cfg);
  auto c = live.client();
  CHECK(post(c, "/sessions", {{"use_sample", true}}, 403)["error"] == "ReadOnly");
  post(c, "/ratings", {{"artwork_id", "art-000001"}, {"rating", 3}}, 403);
  get(c, "/agent/state", 200);
  CHECK(engine.catalog().empty());
}

}  // TEST_SUITE
