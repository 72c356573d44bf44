#pragma once

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "keygraph/model.hpp"
#include "keygraph/scaling.hpp"

// Flat, sectioned key-value run configuration:
//
//   # comment
//   [scheme]            exactly one of [scheme] / [preset]
//   mu = 0.5 0.5
//   K = 1 2
//   P = 4
//
//   [preset]
//   pool = nlogn        nlogn | linear | fixed
//   sigma = 1.0         linear rule slope
//   P0 = 10000          fixed rule pool size
//   mu = 0.5 0.5
//   rho = 1 2
//   target_c = 2.0
//
//   [experiment]
//   n = 2000            or: n_grid = 500 1000 2000
//   c_grid = 0.5 2.0
//   trials = 200
//   master_seed = 42
//   beta = 0.25
//   gamma = 0.25
//   s = 0 10 50         capture sizes
//   sigma_ref = 1.0     reference slope for the dimension report
//
//   [output]
//   path = out.csv      default: stdout
//   format = csv        csv | jsonl

namespace keygraph {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<SchemeParams> scheme;
  std::optional<ScalingPreset> preset;

  std::optional<uint64_t> n;
  std::vector<uint64_t> n_grid;
  std::vector<double> c_grid;
  uint64_t trials = 1000;
  std::optional<uint64_t> master_seed;
  double beta = 0.25;
  double gamma = 0.25;
  std::vector<uint64_t> capture_sizes;
  double sigma_ref = 1.0;

  std::string out_path;  // empty: stdout
  std::string format = "csv";
};

namespace detail {

using Section = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
inline T parse_scalar(const std::string& text, const std::string& where) {
  std::istringstream is(text);
  T value;
  is >> value;
  if (is.fail() || !(is >> std::ws).eof())
    throw config_error("config: cannot parse value '" + text + "' for " + where);
  return value;
}

template <typename T>
inline std::vector<T> parse_list(const std::string& text, const std::string& where) {
  std::istringstream is(text);
  std::vector<T> values;
  T value;
  while (is >> value) values.push_back(value);
  if (!is.eof() || values.empty())
    throw config_error("config: cannot parse list '" + text + "' for " + where);
  return values;
}

struct SectionView {
  const std::string name;
  Section entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::string raw(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw config_error("config: [" + name + "] is missing key '" + key + "'");
    return it->second;
  }

  template <typename T>
  T get(const std::string& key) const {
    return parse_scalar<T>(raw(key), "[" + name + "] " + key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  template <typename T>
  std::vector<T> get_list(const std::string& key) const {
    return parse_list<T>(raw(key), "[" + name + "] " + key);
  }
};

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  std::map<std::string, detail::Section> sections;
  std::string line, current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config line " + std::to_string(line_no) + ": malformed section header");
      current = detail::trim(line.substr(1, line.size() - 2));
      if (current != "scheme" && current != "preset" && current != "experiment" &&
          current != "output")
        throw config_error("config line " + std::to_string(line_no) + ": unknown section [" +
                           current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current.empty())
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("config line " + std::to_string(line_no) + ": empty key or value");
    sections[current][key] = value;
  }

  const bool has_scheme = sections.count("scheme") != 0;
  const bool has_preset = sections.count("preset") != 0;
  if (has_scheme == has_preset)
    throw config_error("config: exactly one of [scheme] or [preset] must be present");

  RunConfig config;
  if (has_scheme) {
    detail::SectionView sec{"scheme", sections["scheme"]};
    const auto mu = sec.get_list<double>("mu");
    const auto rings = sec.get_list<uint32_t>("K");
    const auto pool = sec.get<uint64_t>("P");
    if (sec.has("r") && sec.get<std::size_t>("r") != mu.size())
      throw config_error("config: [scheme] r does not match the length of mu");
    config.scheme = validate_scheme(mu.size(), mu, rings, pool);
  } else {
    detail::SectionView sec{"preset", sections["preset"]};
    ScalingPreset preset;
    const auto rule = sec.get<std::string>("pool");
    if (rule == "nlogn") {
      preset.pool_rule = PoolRule::nlogn;
    } else if (rule == "linear") {
      preset.pool_rule = PoolRule::linear;
      preset.sigma = sec.get<double>("sigma");
    } else if (rule == "fixed") {
      preset.pool_rule = PoolRule::fixed;
      preset.pool_fixed = sec.get<uint64_t>("P0");
    } else {
      throw config_error("config: [preset] pool must be nlogn, linear or fixed");
    }
    preset.mu = sec.get_list<double>("mu");
    preset.rho = sec.get_list<double>("rho");
    preset.target_c = sec.get_or<double>("target_c", 1.0);
    validate_preset(preset);
    config.preset = preset;
  }

  if (sections.count("experiment")) {
    detail::SectionView sec{"experiment", sections["experiment"]};
    if (sec.has("n")) config.n = sec.get<uint64_t>("n");
    if (sec.has("n_grid")) config.n_grid = sec.get_list<uint64_t>("n_grid");
    if (sec.has("c_grid")) config.c_grid = sec.get_list<double>("c_grid");
    config.trials = sec.get_or<uint64_t>("trials", config.trials);
    if (sec.has("master_seed")) config.master_seed = sec.get<uint64_t>("master_seed");
    config.beta = sec.get_or<double>("beta", config.beta);
    config.gamma = sec.get_or<double>("gamma", config.gamma);
    if (sec.has("s")) config.capture_sizes = sec.get_list<uint64_t>("s");
    config.sigma_ref = sec.get_or<double>("sigma_ref", config.sigma_ref);
  }

  if (sections.count("output")) {
    detail::SectionView sec{"output", sections["output"]};
    config.out_path = sec.get_or<std::string>("path", "");
    config.format = sec.get_or<std::string>("format", "csv");
    if (config.format != "csv" && config.format != "jsonl")
      throw config_error("config: [output] format must be csv or jsonl");
  }
  return config;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace keygraph
