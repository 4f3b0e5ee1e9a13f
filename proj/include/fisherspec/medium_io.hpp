#pragma once

// Key-value medium files:
//
//   # sodium, hot cell
//   mu_Cm            = 0.704e-29
//   gamma_s_per_s    = 61.354e6
//   omega0_rad_per_s = 3.19395e15
//   density_per_m3   = 2.5e16
//   length_m         = 0.01
//
// '#' starts a comment; blank lines are ignored; every key is required.

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "medium.hpp"

namespace fisherspec {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

inline Medium parse_medium(std::istream& in) {
  std::map<std::string, double, std::less<>> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("medium file line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(detail::trim(view.substr(0, eq)));
    values[key] = detail::parse_double(detail::trim(view.substr(eq + 1)), key);
  }

  auto take = [&](std::string_view key) {
    auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("medium file: missing key '" + std::string(key) + "'");
    const double v = it->second;
    values.erase(it);
    return v;
  };
  Medium m;
  m.mu = take("mu_Cm");
  m.gamma_s = take("gamma_s_per_s");
  m.omega0 = take("omega0_rad_per_s");
  m.density = take("density_per_m3");
  m.length = take("length_m");
  if (!values.empty()) {
    throw std::invalid_argument("medium file: unknown key '" + values.begin()->first + "'");
  }
  m.validate();
  return m;
}

inline Medium load_medium_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open medium file '" + path + "'");
  return parse_medium(in);
}

/// Built-in presets by name. Currently only "sodium-d1".
inline Medium medium_preset(std::string_view name, double density = 2.5e16) {
  if (name == "sodium-d1") return sodium_d1(density);
  throw std::invalid_argument("unknown medium preset '" + std::string(name) + "'");
}

}  // namespace fisherspec
