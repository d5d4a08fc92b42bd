// Copyright 2026 The dbf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration and its flat key-value text format.
//
//   # comment
//   [experiment]            section headers are accepted and ignored
//   mode = compare
//   n_sensors = 100
//   dist = uniform pi/30    repeatable; "three_point <delta0> <p>"
//   schedule = 1:uniform:pi/10; 400:uniform:pi/30   step table, repeatable
//   seeds = 1-50            ranges and comma lists
//
// Angles are radians, written as plain numbers or as multiples of pi
// ("pi/30", "3*pi/4").

#ifndef DBF_HARNESS_CONFIG_HPP_
#define DBF_HARNESS_CONFIG_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/harness/csv.hpp"
#include "dbf/perturbation.hpp"
#include "dbf/protocol.hpp"
#include "dbf/scalability.hpp"

namespace dbf::harness {

enum class Mode { kProtocol, kModel, kCompare, kOptimized, kScaling, kTracking, kHistogram };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kProtocol: return "protocol";
    case Mode::kModel: return "model";
    case Mode::kCompare: return "compare";
    case Mode::kOptimized: return "optimized";
    case Mode::kScaling: return "scaling";
    case Mode::kTracking: return "tracking";
    case Mode::kHistogram: return "histogram";
  }
  return "?";
}

struct ExperimentConfig {
  std::string name = "custom";
  std::string reproduces;
  Mode mode = Mode::kProtocol;
  std::vector<std::size_t> n_sensors{10};
  std::vector<double> gains;
  std::vector<DistSchedule> schedules;
  std::vector<Family> optimize;
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds{1};
  FeedbackWindow window = FeedbackWindow::unbounded();
  double doppler_magnitude = 0.0;
  DriftModel drift_model = DriftModel::kRandomSign;
  double fraction = 0.75;
  std::optional<std::size_t> histogram_slot;
  std::size_t tracking_slots = 4000;
  SweepMode sweep = SweepMode::kFixed;
  std::filesystem::path out_dir = "out";
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for '" + key + "': " + s);
  }
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& key) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("bad integer for '" + key + "': " + s);
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for '" + key + "': " + s);
  }
}

}  // namespace detail

// Parses "0.1", "pi", "-pi/200", "3*pi/4", "pi/30".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) return detail::parse_number(s, "angle");
  double coef = 1.0;
  std::string head = s.substr(0, pi_pos);
  if (head == "-") {
    coef = -1.0;
  } else if (!head.empty()) {
    if (head.back() != '*') throw ConfigError("bad angle: " + text);
    head.pop_back();
    coef = detail::parse_number(head, "angle");
  }
  std::string tail = s.substr(pi_pos + 2);
  double den = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("bad angle: " + text);
    den = detail::parse_number(tail.substr(1), "angle");
    if (den == 0.0) throw ConfigError("bad angle (division by zero): " + text);
  }
  return coef * kPi / den;
}

// "uniform pi/30", "two_point 0.1", "three_point pi/4 0.25"
inline PerturbationDist parse_dist(const std::string& text) {
  std::istringstream in(text);
  std::string fam, d0, p;
  in >> fam >> d0 >> p;
  if (fam.empty() || d0.empty()) throw ConfigError("bad dist: '" + text + "'");
  try {
    const Family family = parse_family(fam);
    if (family == Family::kThreePoint) {
      if (p.empty()) throw ConfigError("three_point dist needs a weight p: '" + text + "'");
      return make_dist(family, parse_angle(d0), detail::parse_number(p, "dist"));
    }
    if (!p.empty()) throw ConfigError("unexpected weight for " + fam + ": '" + text + "'");
    return make_dist(family, parse_angle(d0));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("bad dist '") + text + "': " + e.what());
  }
}

inline std::string format_dist(const PerturbationDist& d) {
  std::string s = std::string(to_string(d.family())) + " " + fmt_double(d.delta0());
  if (d.family() == Family::kThreePoint) s += " " + fmt_double(d.weight_p());
  return s;
}

// "1:uniform:pi/10; 400:uniform:pi/30" (three_point: "1:three_point:pi/4:0.25").
inline DistSchedule parse_schedule(const std::string& text) {
  std::vector<DistSchedule::Step> steps;
  for (const auto& item : detail::split(text, ';')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() < 3 || parts.size() > 4) throw ConfigError("bad schedule step: '" + item + "'");
    std::string dist = parts[1] + " " + parts[2];
    if (parts.size() == 4) dist += " " + parts[3];
    steps.push_back({static_cast<std::size_t>(detail::parse_uint(parts[0], "schedule")), parse_dist(dist)});
  }
  try {
    return DistSchedule(std::move(steps));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("bad schedule: ") + e.what());
  }
}

inline std::string format_schedule(const DistSchedule& s) {
  std::string out;
  for (const auto& step : s.steps()) {
    if (!out.empty()) out += "; ";
    const auto& d = step.dist;
    out += std::to_string(step.from_slot) + ":" + std::string(to_string(d.family())) + ":" +
           fmt_double(d.delta0());
    if (d.family() == Family::kThreePoint) out += ":" + fmt_double(d.weight_p());
  }
  return out;
}

// "1-50", "3,7,9", "1-3,10"
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : detail::split(text, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(detail::parse_uint(item, "seeds"));
      continue;
    }
    const auto lo = detail::parse_uint(detail::trim(item.substr(0, dash)), "seeds");
    const auto hi = detail::parse_uint(detail::trim(item.substr(dash + 1)), "seeds");
    if (hi < lo) throw ConfigError("bad seed range: " + item);
    if (hi - lo > 1000000) throw ConfigError("seed range too large: " + item);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::kProtocol, Mode::kModel, Mode::kCompare, Mode::kOptimized, Mode::kScaling,
                 Mode::kTracking, Mode::kHistogram}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown mode: " + s);
}

inline void validate(const ExperimentConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.n_sensors.empty()) throw ConfigError("n_sensors must not be empty");
  for (auto n : c.n_sensors)
    if (n < 1) throw ConfigError("n_sensors entries must be >= 1");
  if (!std::is_sorted(c.n_sensors.begin(), c.n_sensors.end())) throw ConfigError("n_sensors must be ascending");
  if (c.mode != Mode::kScaling && c.n_sensors.size() != 1) {
    throw ConfigError("only scaling mode accepts several n_sensors values");
  }
  if (!c.gains.empty()) {
    if (c.gains.size() != c.n_sensors.front()) throw ConfigError("gains length must equal n_sensors");
    for (double a : c.gains)
      if (!(a >= 0.0)) throw ConfigError("gains must be nonnegative");
  }
  if (!(c.doppler_magnitude >= 0.0)) throw ConfigError("doppler_magnitude must be >= 0");
  const bool monte_carlo = c.mode == Mode::kProtocol || c.mode == Mode::kCompare ||
                           c.mode == Mode::kTracking || c.mode == Mode::kHistogram;
  if (monte_carlo && c.seeds.empty()) throw ConfigError("seeds must not be empty");
  const bool needs_dist = c.mode == Mode::kProtocol || c.mode == Mode::kModel || c.mode == Mode::kCompare ||
                          c.mode == Mode::kTracking || c.mode == Mode::kHistogram ||
                          (c.mode == Mode::kScaling && c.sweep == SweepMode::kFixed);
  if (needs_dist && c.schedules.empty()) throw ConfigError("a dist or schedule is required for this mode");
  if ((c.mode == Mode::kOptimized || (c.mode == Mode::kScaling && c.sweep == SweepMode::kOptimized)) &&
      c.optimize.empty()) {
    throw ConfigError("an optimize family is required for this mode");
  }
  if (!(c.fraction > 0.0 && c.fraction < 1.0)) throw ConfigError("fraction must lie in (0, 1)");
  const bool model_based = c.mode == Mode::kModel || c.mode == Mode::kCompare || c.mode == Mode::kOptimized ||
                           c.mode == Mode::kScaling || c.mode == Mode::kHistogram;
  if (model_based) {
    for (double a : c.gains)
      if (a != 1.0) throw ConfigError("the analytic model requires unit gains");
  }
  if (c.histogram_slot && (*c.histogram_slot < 1 || *c.histogram_slot > c.horizon)) {
    throw ConfigError("histogram_slot outside horizon");
  }
  if (c.mode == Mode::kTracking && c.tracking_slots < 1000) {
    throw ConfigError("tracking_slots must be >= 1000 (trailing window)");
  }
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  bool saw_seeds = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "name") c.name = val;
    else if (key == "reproduces") c.reproduces = val;
    else if (key == "mode") c.mode = parse_mode(val);
    else if (key == "n_sensors") {
      c.n_sensors.clear();
      for (const auto& v : detail::split(val, ',')) c.n_sensors.push_back(detail::parse_uint(v, key));
    } else if (key == "gains") {
      c.gains.clear();
      for (const auto& v : detail::split(val, ',')) c.gains.push_back(detail::parse_number(v, key));
    } else if (key == "dist") c.schedules.emplace_back(parse_dist(val));
    else if (key == "schedule") c.schedules.push_back(parse_schedule(val));
    else if (key == "optimize") {
      try {
        c.optimize.push_back(parse_family(val));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "horizon") c.horizon = detail::parse_uint(val, key);
    else if (key == "seeds") {
      c.seeds = parse_seeds(val);
      saw_seeds = true;
    } else if (key == "feedback_window") {
      c.window = val == "unbounded" ? FeedbackWindow::unbounded()
                                    : FeedbackWindow{static_cast<std::size_t>(detail::parse_uint(val, key))};
      if (c.window.slots && *c.window.slots < 1) throw ConfigError("feedback_window must be >= 1");
    } else if (key == "doppler_magnitude") c.doppler_magnitude = parse_angle(val);
    else if (key == "drift_model") {
      if (val == "uniform") c.drift_model = DriftModel::kUniform;
      else if (val == "random_sign") c.drift_model = DriftModel::kRandomSign;
      else throw ConfigError("unknown drift_model: " + val);
    } else if (key == "fraction") c.fraction = detail::parse_number(val, key);
    else if (key == "histogram_slot") c.histogram_slot = detail::parse_uint(val, key);
    else if (key == "tracking_slots") c.tracking_slots = detail::parse_uint(val, key);
    else if (key == "sweep") {
      if (val == "fixed") c.sweep = SweepMode::kFixed;
      else if (val == "optimized") c.sweep = SweepMode::kOptimized;
      else throw ConfigError("unknown sweep: " + val);
    } else if (key == "out_dir") c.out_dir = val;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (saw_seeds && c.seeds.empty()) throw ConfigError("seeds must not be empty");
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  return parse_config(in);
}

// Inverse of parse_config (round-trips every field).
inline std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto join = [](const auto& xs, auto fmt) {
    std::string s;
    for (const auto& x : xs) {
      if (!s.empty()) s += ",";
      s += fmt(x);
    }
    return s;
  };
  os << "[experiment]\n";
  os << "name = " << c.name << '\n';
  if (!c.reproduces.empty()) os << "reproduces = " << c.reproduces << '\n';
  os << "mode = " << to_string(c.mode) << '\n';
  os << "n_sensors = " << join(c.n_sensors, [](auto n) { return std::to_string(n); }) << '\n';
  if (!c.gains.empty()) os << "gains = " << join(c.gains, fmt_double) << '\n';
  for (const auto& s : c.schedules) {
    if (s.steps().size() == 1) os << "dist = " << format_dist(s.steps().front().dist) << '\n';
    else os << "schedule = " << format_schedule(s) << '\n';
  }
  for (auto f : c.optimize) os << "optimize = " << to_string(f) << '\n';
  os << "horizon = " << c.horizon << '\n';
  os << "seeds = " << join(c.seeds, [](auto s) { return std::to_string(s); }) << '\n';
  os << "feedback_window = " << (c.window.slots ? std::to_string(*c.window.slots) : "unbounded") << '\n';
  os << "doppler_magnitude = " << fmt_double(c.doppler_magnitude) << '\n';
  os << "drift_model = " << (c.drift_model == DriftModel::kUniform ? "uniform" : "random_sign") << '\n';
  os << "fraction = " << fmt_double(c.fraction) << '\n';
  if (c.histogram_slot) os << "histogram_slot = " << *c.histogram_slot << '\n';
  os << "tracking_slots = " << c.tracking_slots << '\n';
  os << "sweep = " << to_string(c.sweep) << '\n';
  os << "out_dir = " << c.out_dir.string() << '\n';
  return os.str();
}

}  // namespace dbf::harness

#endif  // DBF_HARNESS_CONFIG_HPP_
