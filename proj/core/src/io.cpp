#include "cpl/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <memory>

#include "cpl/error.hpp"
#include "json.hpp"

namespace cpl {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::string& out, T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.append(reinterpret_cast<const char*>(b.data()), b.size());
}

template <class T>
T get_le(const std::string& in, std::size_t at) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), in.data() + at, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct MdCtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("sha256 final failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxFree> ctx_;
};

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& u, double t, double tau) {
  std::string buf = "CPL1";
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(u.size()));
  put_le<double>(buf, t);
  put_le<double>(buf, tau);
  for (double v : u.values()) put_le<double>(buf, v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) throw Error("cannot write '" + path.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  constexpr std::size_t header = 4 + 4 + 8 + 8;
  if (buf.size() < header || buf.compare(0, 4, "CPL1") != 0) throw Error("'" + path.string() + "' is not a CPL1 snapshot");
  const auto n = get_le<std::uint32_t>(buf, 4);
  if (buf.size() != header + 8 * static_cast<std::size_t>(n)) throw Error("'" + path.string() + "' has the wrong length");
  Snapshot s;
  s.t = get_le<double>(buf, 8);
  s.tau = get_le<double>(buf, 16);
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.values[i] = get_le<double>(buf, header + 8 * i);
  return s;
}

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  return h.hex();
}

const Artifact* RunManifest::find(const std::string& p) const {
  for (const auto& a : artifacts)
    if (a.path == p) return &a;
  return nullptr;
}

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["scenario"] = m.scenario;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["ok"] = m.ok;
  j["exit_code"] = m.exit_code;
  if (!m.ok) {
    j["error_kind"] = m.error_kind;
    j["error"] = m.error;
    if (m.error_time >= 0.0) j["error_time"] = m.error_time;
  }
  auto& arts = j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.scenario = j.at("scenario").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.ok = j.at("ok").get<bool>();
    m.exit_code = j.at("exit_code").get<int>();
    m.error_kind = j.value("error_kind", "");
    m.error = j.value("error", "");
    m.error_time = j.value("error_time", -1.0);
    for (const auto& a : j.at("artifacts"))
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                             a.at("bytes").get<std::uintmax_t>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
}

std::vector<std::string> verify_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  std::vector<std::string> bad;
  for (const auto& a : m.artifacts) {
    const auto p = dir / a.path;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec) || std::filesystem::file_size(p, ec) != a.bytes ||
        sha256_file(p) != a.sha256)
      bad.push_back(a.path);
  }
  return bad;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cpl
