// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: flat `key = value` text, or the same keys as a JSON
// object. Recognised keys:
//
//   tx, rx               vectors, "x, y, z" (parentheses optional) or [x, y, z]
//   alpha                [0, 1]
//   leaf_threshold       >= 1
//   tessellation_level   0..8
//   max_reflections      >= 0
//   strategy             brute | median | sah | hybrid
//   frequency_ghz        > 0, carried as metadata only
//   seed                 integer, used for synthetic scenes
//   bins                 >= 2
//   t_i, t_trav          >= 0
//   normalize_distance   true | false
//   path_length_limit    > 0 (meters), or "inf"
//
// tx and rx are required; everything else has a default.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rtbvh/bvh.hpp"
#include "rtbvh/launch.hpp"
#include "rtbvh/scene.hpp"

namespace rtbvh {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Acceleration used for closest-hit queries during a run.
enum class Accelerator { Brute, Median, Sah, Hybrid };

inline const char* to_string(Accelerator a) {
  switch (a) {
    case Accelerator::Brute: return "brute";
    case Accelerator::Median: return "median";
    case Accelerator::Sah: return "sah";
    case Accelerator::Hybrid: return "hybrid";
  }
  return "?";
}

inline Accelerator parse_accelerator(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "brute" || lower == "bruteforce" || lower == "brute_force") return Accelerator::Brute;
  if (lower == "median") return Accelerator::Median;
  if (lower == "sah") return Accelerator::Sah;
  if (lower == "hybrid") return Accelerator::Hybrid;
  throw ConfigError("strategy", "unknown strategy '" + std::string(s) + "'");
}

struct RunConfig {
  Vec3 tx;
  Vec3 rx;
  double alpha = 0.5;
  int leaf_threshold = 8;
  int tessellation_level = 3;
  int max_reflections = 2;
  Accelerator strategy = Accelerator::Hybrid;
  double frequency_ghz = 2.4;
  std::uint64_t seed = 0;
  int bins = 16;
  double t_i = 1.0;
  double t_trav = 0.125;
  bool normalize_distance = false;
  double path_length_limit = kInfinity;

  void validate() const {
    if (!is_finite(tx)) throw ConfigError("tx", "must be finite");
    if (!is_finite(rx)) throw ConfigError("rx", "must be finite");
    if (tx == rx) throw ConfigError("rx", "must differ from tx");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in [0, 1]");
    if (leaf_threshold < 1) throw ConfigError("leaf_threshold", "must be >= 1");
    if (tessellation_level < 0 || tessellation_level > kMaxTessellationLevel)
      throw ConfigError("tessellation_level", "must lie in [0, 8]");
    if (max_reflections < 0) throw ConfigError("max_reflections", "must be >= 0");
    if (!(frequency_ghz > 0.0)) throw ConfigError("frequency_ghz", "must be > 0");
    if (bins < 2) throw ConfigError("bins", "must be >= 2");
    if (!(t_i >= 0.0)) throw ConfigError("t_i", "must be >= 0");
    if (!(t_trav >= 0.0)) throw ConfigError("t_trav", "must be >= 0");
    if (!(path_length_limit > 0.0)) throw ConfigError("path_length_limit", "must be > 0");
  }
};

/// Build parameters for `strategy`, with the transmitter as ray source.
inline BuildConfig build_config(const RunConfig& rc, Strategy strategy) {
  BuildConfig b;
  b.strategy = strategy;
  b.alpha = rc.alpha;
  b.t_i = rc.t_i;
  b.t_trav = rc.t_trav;
  b.leaf_threshold = rc.leaf_threshold;
  b.source = rc.tx;
  b.bins = rc.bins;
  b.normalize_distance = rc.normalize_distance;
  return b;
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline double config_real(const std::string& key, std::string_view value) {
  const std::string v = lower(trim(value));
  if (v == "inf" || v == "infinity") return kInfinity;
  double out = 0.0;
  if (!parse_double(v, out)) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

inline long long config_int(const std::string& key, std::string_view value) {
  long long out = 0;
  if (!parse_long(trim(value), out))
    throw ConfigError(key, "expected an integer, got '" + std::string(trim(value)) + "'");
  return out;
}

inline bool config_bool(const std::string& key, std::string_view value) {
  const std::string v = lower(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

inline Vec3 config_vec(const std::string& key, std::string_view value) {
  std::string v(trim(value));
  if (v.size() >= 2 && ((v.front() == '(' && v.back() == ')') || (v.front() == '[' && v.back() == ']')))
    v = v.substr(1, v.size() - 2);
  std::replace(v.begin(), v.end(), ',', ' ');
  const auto parts = split_ws(v);
  if (parts.size() != 3) throw ConfigError(key, "expected three coordinates");
  Vec3 out;
  for (int a = 0; a < 3; ++a)
    if (!parse_double(parts[a], out[a])) throw ConfigError(key, "malformed coordinate");
  return out;
}

inline void apply_key(RunConfig& rc, const std::string& key, std::string_view value) {
  auto as_int = [&](long long lo, long long hi) {
    const long long v = config_int(key, value);
    if (v < lo || v > hi) throw ConfigError(key, "out of range");
    return v;
  };
  if (key == "tx") rc.tx = config_vec(key, value);
  else if (key == "rx") rc.rx = config_vec(key, value);
  else if (key == "alpha") rc.alpha = config_real(key, value);
  else if (key == "leaf_threshold") rc.leaf_threshold = static_cast<int>(as_int(-1000000, 1 << 30));
  else if (key == "tessellation_level") rc.tessellation_level = static_cast<int>(as_int(-1000, 1000));
  else if (key == "max_reflections") rc.max_reflections = static_cast<int>(as_int(-1000, 1000));
  else if (key == "strategy") rc.strategy = parse_accelerator(trim(value));
  else if (key == "frequency_ghz") rc.frequency_ghz = config_real(key, value);
  else if (key == "seed") rc.seed = static_cast<std::uint64_t>(as_int(0, INT64_MAX));
  else if (key == "bins") rc.bins = static_cast<int>(as_int(-1000, 1 << 20));
  else if (key == "t_i") rc.t_i = config_real(key, value);
  else if (key == "t_trav") rc.t_trav = config_real(key, value);
  else if (key == "normalize_distance") rc.normalize_distance = config_bool(key, value);
  else if (key == "path_length_limit") rc.path_length_limit = config_real(key, value);
  else throw ConfigError(key, "unknown key");
}

inline std::string json_scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_real(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key, "vector components must be numbers");
      out += format_real(e.get<double>()) + " ";
    }
    return out;
  }
  throw ConfigError(key, "unsupported value type");
}

}  // namespace detail

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Splits a configuration document (flat `key = value` lines or a JSON
/// object) into entries in document order. Duplicate keys are an error.
inline ConfigEntries parse_config_entries(std::string_view text) {
  ConfigEntries out;
  std::set<std::string> seen;
  auto add = [&](const std::string& key, std::string value) {
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    out.emplace_back(key, std::move(value));
  };

  if (const auto body = detail::trim(text); !body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("document", e.what());
    }
    if (!doc.is_object()) throw ConfigError("document", "expected a JSON object");
    for (const auto& [key, value] : doc.items()) add(key, detail::json_scalar_text(key, value));
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view l = line;
      if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
      l = detail::trim(l);
      if (l.empty()) continue;
      const auto eq = l.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
      add(std::string(detail::trim(l.substr(0, eq))), std::string(l.substr(eq + 1)));
    }
  }
  return out;
}

/// Applies entries over the defaults; `tx` and `rx` must be present.
inline RunConfig config_from_entries(const ConfigEntries& entries) {
  RunConfig rc;
  bool has_tx = false, has_rx = false;
  for (const auto& [key, value] : entries) {
    detail::apply_key(rc, key, value);
    has_tx = has_tx || key == "tx";
    has_rx = has_rx || key == "rx";
  }
  if (!has_tx) throw ConfigError("tx", "required");
  if (!has_rx) throw ConfigError("rx", "required");
  rc.validate();
  return rc;
}

/// Parses a run configuration and validates every invariant.
inline RunConfig load_config(std::string_view text) { return config_from_entries(parse_config_entries(text)); }

inline std::string read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config_file(const std::string& path) { return load_config(read_config_file(path)); }

/// Flat-text rendering accepted by `load_config`.
inline std::string to_config_text(const RunConfig& rc) {
  std::ostringstream os;
  os << "tx = " << format_vec(rc.tx, ',') << '\n'
     << "rx = " << format_vec(rc.rx, ',') << '\n'
     << "alpha = " << format_real(rc.alpha) << '\n'
     << "leaf_threshold = " << rc.leaf_threshold << '\n'
     << "tessellation_level = " << rc.tessellation_level << '\n'
     << "max_reflections = " << rc.max_reflections << '\n'
     << "strategy = " << to_string(rc.strategy) << '\n'
     << "frequency_ghz = " << format_real(rc.frequency_ghz) << '\n'
     << "seed = " << rc.seed << '\n'
     << "bins = " << rc.bins << '\n'
     << "t_i = " << format_real(rc.t_i) << '\n'
     << "t_trav = " << format_real(rc.t_trav) << '\n'
     << "normalize_distance = " << (rc.normalize_distance ? "true" : "false") << '\n'
     << "path_length_limit = " << format_real(rc.path_length_limit) << '\n';
  return os.str();
}

/// Indoor settings for a furnished room of roughly 8 x 6 x 3.5 m.
inline RunConfig indoor_preset() {
  RunConfig rc;
  rc.tx = {1.46, 2.42, 2.1};
  rc.rx = {1.2, 1.2, 1.5};
  rc.alpha = 0.7;
  rc.leaf_threshold = 250;
  rc.max_reflections = 2;
  rc.frequency_ghz = 2.4;
  return rc;
}

/// Outdoor settings for a campus-scale block of buildings.
inline RunConfig outdoor_preset() {
  RunConfig rc;
  rc.tx = {450.0, 450.0, 10.0};
  rc.rx = {450.0, 550.0, 25.0};
  rc.alpha = 0.4;
  rc.leaf_threshold = 820;
  rc.max_reflections = 3;
  rc.frequency_ghz = 2.4;
  return rc;
}

}  // namespace rtbvh
