#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "psiart/engine.hpp"

namespace httplib {
class Server;
}

namespace psiart {

struct ServeConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool read_only = false;
  std::filesystem::path ui_dir;  // optional static UI, mounted at /
  // Relative input_ref values in POST /sessions resolve against this directory.
  std::filesystem::path input_root;

  void validate() const;
};

// JSON API:
//   GET  /artworks            catalog
//   GET  /artworks/{id}       full record with provenance
//   GET  /agent/state         urges, activation, resolution level, label
//   POST /ratings             {artwork_id, rating, rater}
//   POST /sessions            {input_ref | use_sample, seed, target_domain?}
//   GET  /files/artworks/...  stored rasters
class Server {
 public:
  Server(Engine& engine, ServeConfig config);
  ~Server();

  // Returns the bound port. Throws Error(IoError) when binding fails.
  int bind();
  // Blocks until stop().
  void run();
  void stop();

 private:
  void routes();

  Engine& engine_;
  ServeConfig config_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace psiart
