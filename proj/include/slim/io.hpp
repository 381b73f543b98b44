#ifndef SLIM_IO_HPP
#define SLIM_IO_HPP

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slim/error.hpp"
#include "slim/graph.hpp"

namespace slim {

inline constexpr const char* kVersion = "1.0.0";

/// 64-bit FNV-1a of a byte string.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

inline std::string file_hash(const std::string& path) { return "fnv1a:" + hex64(fnv1a(read_file(path))); }

inline SignedGraph read_graph_file(const std::string& path, bool directed) {
  const std::string text = read_file(path);
  try {
    return SignedGraph::from_records(parse_edge_list(text), directed);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void write_graph_file(const std::string& path, const SignedGraph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  const auto records = g.to_records();
  write_edge_list(out, records);
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

/// Provenance record written next to every command's outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::chrono::system_clock::time_point finished = started;

  void add_input(const std::string& path) { inputs.emplace_back(path, file_hash(path)); }

  nlohmann::json to_json() const {
    nlohmann::json in = nlohmann::json::array();
    for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"hash", hash}});
    return {{"command", command},
            {"config", config},
            {"inputs", in},
            {"outputs", outputs},
            {"seed", seed},
            {"deterministic", deterministic},
            {"version", kVersion},
            {"started", utc_timestamp(started)},
            {"finished", utc_timestamp(finished)}};
  }

  void write(const std::string& path) {
    finished = std::chrono::system_clock::now();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace slim

#endif  // SLIM_IO_HPP
