#ifndef GRADEDTODA_IO_HPP
#define GRADEDTODA_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "gradedtoda/graded_graph.hpp"

namespace gradedtoda {

// ---------------------------------------------------------------------------
// Logging, controlled by GRADED_TODA_LOG (error|warn|info|debug).

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_threshold() {
  const char* env = std::getenv("GRADED_TODA_LOG");
  if (!env) return LogLevel::warn;
  std::string s(env);
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

inline void log_message(LogLevel lvl, const std::string& msg) {
  if (lvl > log_threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// Graph-definition files:
// { "vertices": [{"id": "...", "rank": 0}, ...],
//   "edges": [{"from": "...", "to": "...", "mu_e": 0.5}, ...],
//   "mu_v": {"id": value, ...} }            (mu_e / mu_v optional)

inline GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec spec;
  if (!j.contains("vertices") || !j["vertices"].is_array())
    fail(ErrorCode::ParseError, "graph file needs a 'vertices' array");
  for (const auto& v : j["vertices"]) {
    if (!v.contains("id") || !v.contains("rank"))
      fail(ErrorCode::ParseError, "each vertex needs 'id' and 'rank'");
    spec.vertices.push_back({v["id"].get<std::string>(), v["rank"].get<int>()});
  }
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (!e.contains("from") || !e.contains("to"))
        fail(ErrorCode::ParseError, "each edge needs 'from' and 'to'");
      EdgeSpec es{e["from"].get<std::string>(), e["to"].get<std::string>(), std::nullopt};
      if (e.contains("mu_e")) es.mu_e = e["mu_e"].get<double>();
      spec.edges.push_back(es);
    }
  }
  if (j.contains("mu_v"))
    for (auto it = j["mu_v"].begin(); it != j["mu_v"].end(); ++it)
      spec.mu_v[it.key()] = it.value().get<double>();
  return spec;
}

inline GraphSpec load_graph_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open graph file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, "graph file '" + path + "': " + e.what());
  }
  return graph_spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Deterministic numeric formatting for data files.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// FNV-1a, used for the reproducibility header of data files.
inline std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a_hash(s)));
  return buf;
}

// Window strings "a:b".
inline std::pair<int, int> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) fail(ErrorCode::ParseError, "window must look like a:b");
  try {
    size_t used = 0;
    int a = std::stoi(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "cannot parse window '" + s + "'");
  }
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_IO_HPP
