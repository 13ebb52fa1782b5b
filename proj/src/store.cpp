#include "psiart/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

#include "psiart/error.hpp"
#include "psiart/image_io.hpp"

namespace psiart {

using nlohmann::json;
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "snapshot encoding assumes a little-endian host");

// --- binary helpers -----------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void u32(std::uint32_t v) { pod(v); }
  void u64(std::uint64_t v) { pod(v); }
  void i32(std::int32_t v) { pod(v); }
  void f64(double v) { pod(v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void doubles(std::span<const double> v) {
    u64(v.size());
    for (double d : v) f64(d);
  }
  void bytes(std::span<const unsigned char> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::vector<unsigned char>& data() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : b_(b) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  std::int32_t i32() { return pod<std::int32_t>(); }
  double f64() { return pod<double>(); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> doubles() {
    const auto n = u64();
    need(n * sizeof(double));
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }
  std::span<const unsigned char> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size() || pos_ + n < pos_) {
      fail(ErrorKind::CorruptSnapshot, "snapshot data ends unexpectedly");
    }
  }
  std::span<const unsigned char> b_;
  std::size_t pos_ = 0;
};

enum Tag : std::uint32_t {
  kEnd = 0,
  kConfig = 1,
  kDomains = 2,
  kHub = 3,
  kFace = 4,
  kAgent = 5,
  kCatalog = 6,
};

constexpr char kMagic[8] = {'P', 'S', 'I', 'A', 'S', 'N', 'A', 'P'};

void write_som(Writer& w, const Som& s) {
  const auto& c = s.config();
  w.i32(c.grid_w);
  w.i32(c.grid_h);
  w.i32(c.dim);
  w.i32(c.epochs);
  w.f64(c.lr0);
  w.f64(c.lr_final);
  w.f64(c.nbhd0);
  w.f64(c.nbhd_final);
  w.u64(c.seed);
  w.u64(s.trained_samples);
  w.f64(s.initial_qe);
  w.f64(s.final_qe);
  w.doubles(s.weights());
}

Som read_som(Reader& r) {
  SomConfig c;
  c.grid_w = r.i32();
  c.grid_h = r.i32();
  c.dim = r.i32();
  c.epochs = r.i32();
  c.lr0 = r.f64();
  c.lr_final = r.f64();
  c.nbhd0 = r.f64();
  c.nbhd_final = r.f64();
  c.seed = r.u64();
  const auto trained = r.u64();
  const double iqe = r.f64();
  const double fqe = r.f64();
  try {
    Som s(c, r.doubles());
    s.trained_samples = trained;
    s.initial_qe = iqe;
    s.final_qe = fqe;
    return s;
  } catch (const Error& e) {
    fail(ErrorKind::CorruptSnapshot, std::string("invalid SOM in snapshot: ") + e.what());
  }
}

void write_image(Writer& w, const RasterImage& img) {
  w.i32(img.width());
  w.i32(img.height());
  for (const Rgb& p : img.pixels()) {
    w.pod(p.r);
    w.pod(p.g);
    w.pod(p.b);
  }
}

RasterImage read_image(Reader& r) {
  const int w = r.i32();
  const int h = r.i32();
  if (w < 1 || h < 1 || static_cast<long long>(w) * h > (1LL << 28)) {
    fail(ErrorKind::CorruptSnapshot, "invalid image dimensions in snapshot");
  }
  const auto raw = r.take(static_cast<std::size_t>(w) * h * 3);
  std::vector<Rgb> px(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  return RasterImage(w, h, std::move(px));
}

template <std::size_t N>
void write_array(Writer& w, const std::array<double, N>& a) {
  for (double d : a) w.f64(d);
}

template <std::size_t N>
void read_array(Reader& r, std::array<double, N>& a) {
  for (double& d : a) d = r.f64();
}

void write_features(Writer& w, const FeatureBundle& f) {
  write_array(w, f.rgb.bins);
  write_array(w, f.hsv.bins);
  write_array(w, f.lab.bins);
  write_array(w, f.gabor.energies);
  write_array(w, f.haar.responses);
  w.f64(f.general.bbox_w);
  w.f64(f.general.bbox_h);
  w.f64(f.general.mean_luminance);
}

FeatureBundle read_features(Reader& r) {
  FeatureBundle f;
  read_array(r, f.rgb.bins);
  read_array(r, f.hsv.bins);
  read_array(r, f.lab.bins);
  read_array(r, f.gabor.energies);
  read_array(r, f.haar.responses);
  f.general.bbox_w = r.f64();
  f.general.bbox_h = r.f64();
  f.general.mean_luminance = r.f64();
  return f;
}

std::vector<unsigned char> encode_domains(const std::vector<DomainMemory>& domains) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(domains.size()));
  for (const auto& d : domains) {
    w.str(d.name);
    w.u32(static_cast<std::uint32_t>(d.entries.size()));
    for (const auto& e : d.entries) {
      w.str(e.id);
      w.str(e.domain);
      w.str(e.source);
      w.i32(e.crop.x);
      w.i32(e.crop.y);
      w.i32(e.crop.w);
      w.i32(e.crop.h);
      w.i32(e.canvas_w);
      w.i32(e.canvas_h);
      write_image(w, e.image);
      write_features(w, e.features);
    }
    w.u32(static_cast<std::uint32_t>(d.feature_soms.size()));
    for (const auto& s : d.feature_soms) write_som(w, s);
    for (const auto& index : d.unit_index) {
      w.u32(static_cast<std::uint32_t>(index.size()));
      for (const auto& bucket : index) {
        w.u32(static_cast<std::uint32_t>(bucket.size()));
        for (std::size_t i : bucket) w.u64(i);
      }
    }
  }
  return std::move(w.data());
}

std::vector<DomainMemory> decode_domains(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  std::vector<DomainMemory> out(r.u32());
  for (auto& d : out) {
    d.name = r.str();
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      PatchEntry e;
      e.id = r.str();
      e.domain = r.str();
      e.source = r.str();
      e.crop.x = r.i32();
      e.crop.y = r.i32();
      e.crop.w = r.i32();
      e.crop.h = r.i32();
      e.canvas_w = r.i32();
      e.canvas_h = r.i32();
      e.image = read_image(r);
      e.features = read_features(r);
      d.entries.push_back(std::move(e));
    }
    const auto soms = r.u32();
    for (std::uint32_t i = 0; i < soms; ++i) d.feature_soms.push_back(read_som(r));
    for (auto& index : d.unit_index) {
      index.resize(r.u32());
      for (auto& bucket : index) {
        bucket.resize(r.u32());
        for (auto& i : bucket) {
          i = r.u64();
          if (i >= d.entries.size()) fail(ErrorKind::CorruptSnapshot, "bad unit index");
        }
      }
    }
  }
  if (!r.done()) fail(ErrorKind::CorruptSnapshot, "trailing bytes in domain section");
  return out;
}

std::vector<unsigned char> encode_hub(const HubMemory& hub) {
  Writer w;
  w.u32(hub.hub_som ? 1 : 0);
  if (hub.hub_som) write_som(w, *hub.hub_som);
  w.u32(static_cast<std::uint32_t>(hub.unit_map.size()));
  for (const auto& unit : hub.unit_map) {
    w.u32(static_cast<std::uint32_t>(unit.size()));
    for (const auto& ref : unit) {
      w.u64(ref.domain);
      w.u64(ref.entry);
    }
  }
  return std::move(w.data());
}

HubMemory decode_hub(std::span<const unsigned char> bytes,
                     const std::vector<DomainMemory>& domains) {
  Reader r(bytes);
  HubMemory hub;
  if (r.u32() == 1) hub.hub_som = read_som(r);
  hub.unit_map.resize(r.u32());
  for (auto& unit : hub.unit_map) {
    unit.resize(r.u32());
    for (auto& ref : unit) {
      ref.domain = r.u64();
      ref.entry = r.u64();
      if (ref.domain >= domains.size() || ref.entry >= domains[ref.domain].entries.size()) {
        fail(ErrorKind::CorruptSnapshot, "hub references a missing entry");
      }
    }
  }
  if (!r.done()) fail(ErrorKind::CorruptSnapshot, "trailing bytes in hub section");
  return hub;
}

std::vector<unsigned char> text_bytes(const std::string& s) { return {s.begin(), s.end()}; }

json parse_json_section(std::span<const unsigned char> bytes, const char* what) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    fail(ErrorKind::CorruptSnapshot, std::string("bad ") + what + " section: " + e.what());
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

// --- json conversions ---------------------------------------------------------------

json to_json(const AgentState& s) {
  json history = json::array();
  for (const auto& e : s.history) {
    history.push_back({{"kind", e.kind}, {"delta", e.delta}, {"tick", e.tick}});
  }
  return {{"competence", s.urges.competence},
          {"certainty", s.urges.certainty},
          {"activation", s.activation},
          {"resolution_level", s.resolution_level},
          {"artworks_made", s.artworks_made},
          {"label", to_string(development_state(s.urges))},
          {"history", history}};
}

AgentState agent_state_from_json(const json& j) {
  try {
    AgentState s;
    s.urges.competence = j.at("competence").get<double>();
    s.urges.certainty = j.at("certainty").get<double>();
    s.activation = j.at("activation").get<double>();
    s.resolution_level = j.at("resolution_level").get<double>();
    s.artworks_made = j.at("artworks_made").get<std::uint64_t>();
    for (const auto& e : j.at("history")) {
      s.history.push_back({e.at("kind").get<std::string>(), e.at("delta").get<double>(),
                           e.at("tick").get<std::uint64_t>()});
    }
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed agent state: ") + e.what());
  }
}

json to_json(const CatalogEntry& e) {
  return {{"id", e.id},
          {"status", e.status},
          {"created_at", e.created_at},
          {"thumbnail_ref", e.thumbnail_ref},
          {"target_domain", e.target_domain}};
}

namespace {

CatalogEntry catalog_entry_from_json(const json& j) {
  return {j.at("id").get<std::string>(), j.at("status").get<std::string>(),
          j.at("created_at").get<std::string>(), j.at("thumbnail_ref").get<std::string>(),
          j.at("target_domain").get<std::string>()};
}

}  // namespace

// --- container ------------------------------------------------------------------------

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  Writer w;
  w.bytes(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(kMagic), 8));
  w.u32(kSnapshotVersion);
  w.pod<std::int64_t>(s.created_unix);

  auto section = [&w](Tag tag, const std::vector<unsigned char>& payload) {
    w.u32(tag);
    w.u64(payload.size());
    w.bytes(payload);
    w.u64(fnv1a(payload));
  };
  json catalog = json::array();
  for (const auto& e : s.catalog) catalog.push_back(to_json(e));
  Writer face;
  face.i32(s.face.width);
  face.i32(s.face.height);
  face.doubles(s.face.luminance);

  section(kConfig, text_bytes(to_json(s.config).dump()));
  section(kDomains, encode_domains(s.memory.domains));
  section(kHub, encode_hub(s.memory.hub));
  section(kFace, face.data());
  section(kAgent, text_bytes(to_json(s.agent).dump()));
  section(kCatalog, text_bytes(catalog.dump()));
  section(kEnd, {});
  return std::move(w.data());
}

namespace {

struct Section {
  std::uint32_t tag;
  std::span<const unsigned char> payload;
};

std::vector<Section> read_sections(const std::vector<unsigned char>& bytes,
                                   std::int64_t* created) {
  Reader r(bytes);
  const auto magic = r.take(8);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    fail(ErrorKind::CorruptSnapshot, "not a snapshot file");
  }
  const auto version = r.u32();
  if (version != kSnapshotVersion) {
    fail(ErrorKind::VersionError, "unsupported snapshot version " + std::to_string(version));
  }
  const auto t = r.pod<std::int64_t>();
  if (created) *created = t;
  std::vector<Section> out;
  while (true) {
    const auto tag = r.u32();
    const auto len = r.u64();
    const auto payload = r.take(len);
    const auto sum = r.u64();
    if (sum != fnv1a(payload)) {
      fail(ErrorKind::CorruptSnapshot, "checksum mismatch in section " + std::to_string(tag));
    }
    if (tag == kEnd) break;
    out.push_back({tag, payload});
  }
  if (!r.done()) fail(ErrorKind::CorruptSnapshot, "trailing bytes after END section");
  return out;
}

}  // namespace

std::string snapshot_content_id(const std::vector<unsigned char>& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : read_sections(bytes, nullptr)) {
    const std::uint32_t tag = s.tag;
    h = fnv1a(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(&tag), 4), h);
    h = fnv1a(s.payload, h);
  }
  return hex64(h);
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  Snapshot s;
  const auto sections = read_sections(bytes, &s.created_unix);
  auto find = [&](Tag tag) -> std::span<const unsigned char> {
    for (const auto& sec : sections) {
      if (sec.tag == tag) return sec.payload;
    }
    fail(ErrorKind::CorruptSnapshot, "missing section " + std::to_string(tag));
  };
  try {
    s.config = engine_config_from_json(parse_json_section(find(kConfig), "config"));
    s.agent = agent_state_from_json(parse_json_section(find(kAgent), "agent"));
    for (const auto& e : parse_json_section(find(kCatalog), "catalog")) {
      s.catalog.push_back(catalog_entry_from_json(e));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptSnapshot) throw;
    fail(ErrorKind::CorruptSnapshot, e.what());
  } catch (const json::exception& e) {
    fail(ErrorKind::CorruptSnapshot, e.what());
  }
  s.memory.domains = decode_domains(find(kDomains));
  s.memory.hub = decode_hub(find(kHub), s.memory.domains);
  s.memory.config = s.config.memory;
  Reader face(find(kFace));
  s.face.width = face.i32();
  s.face.height = face.i32();
  s.face.luminance = face.doubles();
  if (s.face.luminance.size() != static_cast<std::size_t>(s.face.width) * s.face.height) {
    fail(ErrorKind::CorruptSnapshot, "face template size mismatch");
  }
  s.id = snapshot_content_id(bytes);
  return s;
}

// --- time, ledger ---------------------------------------------------------------------

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AgentState replay_ratings(AgentState initial, std::span<const RatingEvent> ratings,
                          const AgentConfig& config) {
  for (const auto& e : ratings) initial = update_certainty(std::move(initial), e.rating, config);
  return initial;
}

namespace {

std::string escape_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '%': out += "%25"; break;
      case ',': out += "%2C"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

std::string encode_rating_line(const RatingEvent& e) {
  return escape_field(e.artwork_id) + "," + std::to_string(e.rating) + "," +
         escape_field(e.rater) + "," + escape_field(e.timestamp);
}

RatingEvent decode_rating_line(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) parts.push_back(field);
  if (parts.size() != 4) fail(ErrorKind::InvalidInput, "malformed ledger line: " + line);
  RatingEvent e;
  e.artwork_id = unescape_field(parts[0]);
  try {
    e.rating = std::stoi(parts[1]);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidInput, "malformed rating in ledger line: " + line);
  }
  e.rater = unescape_field(parts[2]);
  e.timestamp = unescape_field(parts[3]);
  return e;
}

// --- filesystem -----------------------------------------------------------------------

void atomic_write(const fs::path& path, std::span<const unsigned char> bytes) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) fail(ErrorKind::IoError, "cannot create " + tmp.string());
  std::size_t written = 0;
  while (written < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n <= 0) {
      ::close(fd);
      fs::remove(tmp);
      fail(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    fs::remove(tmp);
    fail(ErrorKind::IoError, "fsync failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::IoError, "rename failed for " + path.string() + ": " + ec.message());
  }
}

void atomic_write(const fs::path& path, const std::string& text) {
  atomic_write(path, std::span<const unsigned char>(
                         reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::NotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Store::Store(fs::path root, std::function<std::string()> clock)
    : root_(std::move(root)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(root_ / "snapshots", ec);
  fs::create_directories(root_ / "artworks", ec);
  if (ec) fail(ErrorKind::IoError, "cannot create store at " + root_.string());
}

std::string Store::save_snapshot(const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  const std::string id = snapshot_content_id(bytes);
  atomic_write(root_ / "snapshots" / (id + ".psnap"), bytes);
  atomic_write(root_ / "snapshots" / "CURRENT", id + "\n");
  return id;
}

std::optional<std::string> Store::current_snapshot_id() const {
  std::ifstream in(root_ / "snapshots" / "CURRENT");
  std::string id;
  if (!(in >> id)) return std::nullopt;
  return id;
}

Snapshot Store::load_snapshot(const std::string& id) const {
  std::string which = id;
  if (which.empty()) {
    auto current = current_snapshot_id();
    if (!current) fail(ErrorKind::NotFound, "store has no snapshot; run train first");
    which = *current;
  }
  return decode_snapshot(slurp(root_ / "snapshots" / (which + ".psnap")));
}

void Store::write_agent(const AgentState& s, std::size_t ratings_applied) {
  json j = {{"state", to_json(s)}, {"ratings_applied", ratings_applied}};
  atomic_write(root_ / "agent.json", j.dump(2) + "\n");
  ratings_applied_ = ratings_applied;
}

AgentState Store::load_agent(const AgentState& initial, const AgentConfig& config) {
  AgentState state = initial;
  std::size_t applied = 0;
  const fs::path path = root_ / "agent.json";
  if (fs::exists(path)) {
    const auto bytes = slurp(path);
    try {
      const auto j = json::parse(bytes.begin(), bytes.end());
      state = agent_state_from_json(j.at("state"));
      applied = j.at("ratings_applied").get<std::size_t>();
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidInput, std::string("malformed agent.json: ") + e.what());
    }
  }
  const auto ledger = read_ratings();
  if (ledger.size() > applied) {
    state = replay_ratings(std::move(state),
                           std::span<const RatingEvent>(ledger).subspan(applied), config);
    write_agent(state, ledger.size());
  } else {
    ratings_applied_ = applied;
    if (!fs::exists(path)) write_agent(state, applied);
  }
  return state;
}

void Store::save_agent(const AgentState& s) { write_agent(s, ratings_applied_); }

std::vector<CatalogEntry> Store::catalog() const {
  const fs::path path = root_ / "catalog.json";
  if (!fs::exists(path)) return {};
  const auto bytes = slurp(path);
  std::vector<CatalogEntry> out;
  try {
    const json doc = json::parse(bytes.begin(), bytes.end());
    for (const auto& e : doc.at("artworks")) {
      out.push_back(catalog_entry_from_json(e));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed catalog.json: ") + e.what());
  }
  return out;
}

bool Store::has_artwork(const std::string& id) const {
  if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) {
    return false;
  }
  return fs::exists(root_ / "artworks" / (id + ".json"));
}

ArtworkRecord Store::load_artwork(const std::string& id) const {
  if (!has_artwork(id)) fail(ErrorKind::NotFound, "unknown artwork '" + id + "'");
  const auto bytes = slurp(root_ / "artworks" / (id + ".json"));
  try {
    return artwork_from_json(json::parse(bytes.begin(), bytes.end()));
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed artwork record: ") + e.what());
  }
}

void Store::save_artwork(const ArtworkRecord& r, const RasterImage& input,
                         const std::optional<RasterImage>& mental,
                         const std::optional<RasterImage>& executed) {
  atomic_write(root_ / r.input_ref, encode_png(input));
  if (mental && !r.mental_ref.empty()) atomic_write(root_ / r.mental_ref, encode_png(*mental));
  if (executed && !r.executed_ref.empty()) {
    atomic_write(root_ / r.executed_ref, encode_png(*executed));
  }
  atomic_write(root_ / "artworks" / (r.id + ".json"), to_json(r).dump(2) + "\n");

  auto entries = catalog();
  entries.push_back({r.id, std::string(to_string(r.status)), r.created_at,
                     r.executed_ref.empty() ? r.input_ref : r.executed_ref,
                     r.final_target_domain});
  json list = json::array();
  for (const auto& e : entries) list.push_back(to_json(e));
  atomic_write(root_ / "catalog.json", json{{"artworks", list}}.dump(2) + "\n");
}

std::string Store::next_artwork_id() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "art-%06zu", catalog().size() + 1);
  return buf;
}

std::vector<RatingEvent> Store::read_ratings() const {
  std::vector<RatingEvent> out;
  std::ifstream in(root_ / "ratings.log");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(decode_rating_line(line));
  }
  return out;
}

AgentState Store::append_rating(const RatingEvent& event, AgentState current,
                                const AgentConfig& config) {
  if (event.rating < 1 || event.rating > 5) {
    fail(ErrorKind::InvalidInput, "rating must be in 1..5, got " + std::to_string(event.rating));
  }
  if (!has_artwork(event.artwork_id)) {
    fail(ErrorKind::NotFound, "unknown artwork '" + event.artwork_id + "'");
  }
  RatingEvent stamped = event;
  if (stamped.timestamp.empty()) stamped.timestamp = clock_();
  const std::string line = encode_rating_line(stamped) + "\n";
  const fs::path path = root_ / "ratings.log";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) fail(ErrorKind::IoError, "cannot open " + path.string());
  const bool ok = ::write(fd, line.data(), line.size()) == static_cast<ssize_t>(line.size()) &&
                  ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) fail(ErrorKind::IoError, "cannot append to " + path.string());

  AgentState next = update_certainty(std::move(current), stamped.rating, config);
  write_agent(next, ratings_applied_ + 1);
  return next;
}

}  // namespace psiart
