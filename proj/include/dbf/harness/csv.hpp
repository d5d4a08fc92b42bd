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

// CSV emission for traces, schedules, and scaling reports. Optional
// metadata lines start with '#' and precede the header row. Doubles are
// written with 17 significant digits so reruns are byte-identical.

#ifndef DBF_HARNESS_CSV_HPP_
#define DBF_HARNESS_CSV_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dbf/errors.hpp"
#include "dbf/optimizer.hpp"
#include "dbf/protocol.hpp"
#include "dbf/scalability.hpp"

namespace dbf::harness {

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
}

inline constexpr const char* kTraceHeader = "timeslot,y,y_best,accepted,delta0_used";

inline void write_trace(std::ostream& os, std::span<const TraceRecord> trace, const Metadata& meta = {}) {
  write_metadata(os, meta);
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.timeslot << ',' << fmt_double(r.y) << ',' << fmt_double(r.y_best) << ','
       << (r.accepted ? 1 : 0) << ',' << fmt_double(r.delta0_used) << '\n';
  }
}

// Model traces share the protocol schema: y_best = y, accepted left blank.
// delta0 may vary per slot (optimized runs); pass one value per slot or
// a single value for all.
inline void write_model_trace(std::ostream& os, std::span<const double> y, std::span<const double> delta0,
                              const Metadata& meta = {}) {
  detail::require(delta0.size() == 1 || delta0.size() == y.size(), "write_model_trace: delta0 size");
  write_metadata(os, meta);
  os << kTraceHeader << '\n';
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double d = delta0.size() == 1 ? delta0[0] : delta0[k];
    os << (k + 1) << ',' << fmt_double(y[k]) << ',' << fmt_double(y[k]) << ",," << fmt_double(d) << '\n';
  }
}

inline void write_schedule(std::ostream& os, std::span<const ScheduleEntry> schedule, const Metadata& meta = {}) {
  write_metadata(os, meta);
  os << "timeslot,family,delta0,p,c_delta,c_2delta,y_predicted\n";
  for (const auto& e : schedule) {
    const auto& p = e.params;
    os << e.timeslot << ',' << to_string(p.family) << ',' << fmt_double(p.delta0) << ','
       << fmt_double(p.weight_p) << ',' << fmt_double(p.moments.c_delta) << ','
       << fmt_double(p.moments.c_2delta) << ',' << fmt_double(e.y_predicted) << '\n';
  }
}

// Entries that never reached the fraction have empty t_fraction/t_over_n.
inline void write_scaling(std::ostream& os, const ScalingReport& report, const Metadata& meta = {}) {
  write_metadata(os, meta);
  os << "n_sensors,t_fraction,t_over_n,mode,f\n";
  for (const auto& e : report.entries) {
    os << e.n_sensors << ',';
    if (e.t_fraction) os << *e.t_fraction << ',' << fmt_double(e.t_over_n);
    else os << ',';
    os << ',' << to_string(report.mode) << ',' << fmt_double(report.f) << '\n';
  }
}

// Opens `path` for writing, creating parent directories.
inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file: " + path.string());
  return os;
}

}  // namespace dbf::harness

#endif  // DBF_HARNESS_CSV_HPP_
