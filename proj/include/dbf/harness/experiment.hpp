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

// Executes an ExperimentConfig and writes its CSV outputs.

#ifndef DBF_HARNESS_EXPERIMENT_HPP_
#define DBF_HARNESS_EXPERIMENT_HPP_

#include <cmath>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

#include "dbf/harness/config.hpp"
#include "dbf/harness/csv.hpp"
#include "dbf/harness/histogram.hpp"
#include "dbf/model.hpp"
#include "dbf/optimizer.hpp"
#include "dbf/parallel.hpp"
#include "dbf/protocol.hpp"
#include "dbf/scalability.hpp"
#include "dbf/tracking.hpp"

namespace dbf::harness {

inline ProtocolConfig protocol_config(const ExperimentConfig& c, const DistSchedule& schedule,
                                      std::uint64_t seed) {
  ProtocolConfig p;
  p.n_sensors = c.n_sensors.front();
  p.gains = c.gains;
  p.schedule = schedule;
  p.horizon = c.horizon;
  p.seed = seed;
  p.window = c.window;
  p.doppler_magnitude = c.doppler_magnitude;
  p.drift_model = c.drift_model;
  return p;
}

// Monte-Carlo mean of the per-slot best strength over seeds.
inline std::vector<double> monte_carlo_mean(const ExperimentConfig& c, const DistSchedule& schedule) {
  std::vector<std::vector<double>> per_seed(c.seeds.size());
  parallel_for(c.seeds.size(), [&](std::size_t k) {
    const auto trace = run_protocol(protocol_config(c, schedule, c.seeds[k]));
    per_seed[k].reserve(trace.size());
    for (const auto& r : trace) per_seed[k].push_back(r.y_best);
  });
  std::vector<double> mean(c.horizon, 0.0);
  // Summed in seed order so the result does not depend on thread timing.
  for (const auto& ys : per_seed)
    for (std::size_t n = 0; n < ys.size(); ++n) mean[n] += ys[n];
  for (double& m : mean) m /= static_cast<double>(c.seeds.size());
  return mean;
}

class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig config, std::ostream* log = nullptr)
      : c_(std::move(config)), log_(log) {
    validate(c_);
  }

  std::vector<std::filesystem::path> run() {
    switch (c_.mode) {
      case Mode::kProtocol: run_protocol_mode(); break;
      case Mode::kModel: run_model_mode(); break;
      case Mode::kCompare: run_compare_mode(); break;
      case Mode::kOptimized: run_optimized_mode(); break;
      case Mode::kScaling: run_scaling_mode(); break;
      case Mode::kTracking: run_tracking_mode(); break;
      case Mode::kHistogram: run_histogram_mode(); break;
    }
    return written_;
  }

 private:
  Metadata meta(std::string extra_key = {}, std::string extra_val = {}) const {
    Metadata m{{"preset", c_.name}, {"mode", std::string(to_string(c_.mode))}};
    if (!c_.reproduces.empty()) m.emplace_back("reproduces", c_.reproduces);
    if (!extra_key.empty()) m.emplace_back(std::move(extra_key), std::move(extra_val));
    return m;
  }

  std::string label(std::size_t k) const {
    const auto& s = c_.schedules[k];
    return std::string(to_string(s.steps().front().dist.family())) + "_d" + std::to_string(k);
  }

  std::string describe(std::size_t k) const {
    const auto& s = c_.schedules[k];
    return s.steps().size() == 1 ? format_dist(s.steps().front().dist) : format_schedule(s);
  }

  template <typename Writer>
  void emit(const std::string& file, Writer&& write) {
    const auto path = c_.out_dir / file;
    auto os = open_output(path);
    write(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
    std::lock_guard lock(mu_);
    written_.push_back(path);
  }

  void note(const std::string& msg) {
    if (!log_) return;
    std::lock_guard lock(mu_);
    *log_ << msg << '\n';
  }

  std::vector<double> model_delta0(const DistSchedule& s) const {
    std::vector<double> d(c_.horizon);
    for (std::size_t n = 0; n < c_.horizon; ++n) d[n] = s.at(n + 1).delta0();
    return d;
  }

  ModelTrace model_trace(const DistSchedule& s) {
    auto t = run_model(c_.n_sensors.front(), s, c_.horizon);
    if (t.clamped_steps) note("model: clamped to N on " + std::to_string(t.clamped_steps) + " step(s)");
    return t;
  }

  void run_protocol_mode() {
    const std::size_t jobs = c_.schedules.size() * c_.seeds.size();
    parallel_for(jobs, [&](std::size_t j) {
      const std::size_t k = j / c_.seeds.size();
      const auto seed = c_.seeds[j % c_.seeds.size()];
      const auto trace = run_protocol(protocol_config(c_, c_.schedules[k], seed));
      emit("trace_" + label(k) + "_seed" + std::to_string(seed) + ".csv", [&](std::ostream& os) {
        auto m = meta("dist", describe(k));
        m.emplace_back("seed", std::to_string(seed));
        write_trace(os, trace, m);
      });
    });
  }

  void run_model_mode() {
    for (std::size_t k = 0; k < c_.schedules.size(); ++k) {
      const auto t = model_trace(c_.schedules[k]);
      emit("model_" + label(k) + ".csv",
           [&](std::ostream& os) { write_model_trace(os, t.y, model_delta0(c_.schedules[k]), meta("dist", describe(k))); });
    }
  }

  void run_compare_mode() {
    for (std::size_t k = 0; k < c_.schedules.size(); ++k) {
      const auto t = model_trace(c_.schedules[k]);
      const auto mean = monte_carlo_mean(c_, c_.schedules[k]);
      emit("model_" + label(k) + ".csv",
           [&](std::ostream& os) { write_model_trace(os, t.y, model_delta0(c_.schedules[k]), meta("dist", describe(k))); });
      emit("compare_" + label(k) + ".csv", [&](std::ostream& os) {
        auto m = meta("dist", describe(k));
        m.emplace_back("seeds", std::to_string(c_.seeds.size()));
        write_metadata(os, m);
        os << "timeslot,model_y,mc_mean_y_best,rel_gap\n";
        for (std::size_t n = 0; n < c_.horizon; ++n) {
          os << (n + 1) << ',' << fmt_double(t.y[n]) << ',' << fmt_double(mean[n]) << ','
             << fmt_double(std::abs(mean[n] - t.y[n]) / t.y[n]) << '\n';
        }
      });
    }
  }

  void run_optimized_mode() {
    const std::size_t n = c_.n_sensors.front();
    for (Family fam : c_.optimize) {
      const auto run = run_optimized_model(n, fam, c_.horizon);
      std::vector<double> d0(run.schedule.size());
      for (std::size_t k = 0; k < d0.size(); ++k) d0[k] = run.schedule[k].params.delta0;
      const std::string tag(to_string(fam));
      emit("optimized_" + tag + ".csv",
           [&](std::ostream& os) { write_model_trace(os, run.y, d0, meta("family", tag)); });
      emit("schedule_" + tag + ".csv", [&](std::ostream& os) { write_schedule(os, run.schedule, meta("family", tag)); });
    }
    run_model_mode();
  }

  void run_scaling_mode() {
    SweepSpec spec;
    spec.mode = c_.sweep;
    if (c_.sweep == SweepMode::kFixed) spec.schedule = c_.schedules.front();
    else spec.family = c_.optimize.front();
    const auto report = scaling_sweep(c_.n_sensors, c_.fraction, spec, c_.horizon);
    if (!report.all_reached) note("scaling: some N did not reach the fraction within the horizon");
    emit("scaling_" + std::string(to_string(c_.sweep)) + ".csv",
         [&](std::ostream& os) { write_scaling(os, report, meta()); });
  }

  void run_tracking_mode() {
    TrackingSpec spec;
    spec.doppler_magnitude = c_.doppler_magnitude;
    spec.drift_model = c_.drift_model;
    spec.acquisition_fraction = c_.fraction;
    spec.tracking_slots = c_.tracking_slots;
    std::vector<TrackingResult> results(c_.seeds.size());
    parallel_for(c_.seeds.size(), [&](std::size_t k) {
      auto p = protocol_config(c_, c_.schedules.front(), c_.seeds[k]);
      results[k] = run_tracking(p, spec);
      const auto seed = std::to_string(c_.seeds[k]);
      emit("tracking_seed" + seed + ".csv", [&](std::ostream& os) {
        auto m = meta("seed", seed);
        if (results[k].acquired_at) m.emplace_back("drift_from_slot", std::to_string(*results[k].acquired_at + 1));
        write_trace(os, results[k].trace, m);
      });
      if (results[k].acquired_at) {
        std::vector<double> slots_y = results[k].control;
        emit("control_seed" + seed + ".csv", [&](std::ostream& os) {
          write_metadata(os, meta("seed", seed));
          os << "timeslot,y\n";
          for (std::size_t n = 0; n < slots_y.size(); ++n) {
            os << (*results[k].acquired_at + 1 + n) << ',' << fmt_double(slots_y[n]) << '\n';
          }
        });
      }
    });
    emit("tracking_summary.csv", [&](std::ostream& os) {
      write_metadata(os, meta());
      os << "seed,acquired_at,tracking_mean,control_mean,ratio\n";
      for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        os << c_.seeds[k] << ',';
        if (r.acquired_at) {
          os << *r.acquired_at << ',' << fmt_double(r.tracking_mean) << ',' << fmt_double(r.control_mean) << ','
             << fmt_double(r.tracking_mean / r.control_mean) << '\n';
        } else {
          os << ",,,\n";
        }
      }
    });
  }

  void run_histogram_mode() {
    std::vector<std::optional<PhaseHistogram>> hist(c_.seeds.size());
    parallel_for(c_.seeds.size(), [&](std::size_t k) {
      const auto p = protocol_config(c_, c_.schedules.front(), c_.seeds[k]);
      hist[k] = c_.histogram_slot ? std::optional(emit_phase_histogram(p, *c_.histogram_slot))
                                  : histogram_at_fraction(p, c_.fraction);
      if (!hist[k]) return;
      const auto seed = std::to_string(c_.seeds[k]);
      emit("histogram_seed" + seed + ".csv", [&](std::ostream& os) { write_histogram(os, *hist[k], meta("seed", seed)); });
    });
    emit("histogram_summary.csv", [&](std::ostream& os) {
      write_metadata(os, meta());
      os << "seed,timeslot,y,phi0,ks_distance\n";
      for (std::size_t k = 0; k < hist.size(); ++k) {
        os << c_.seeds[k] << ',';
        if (hist[k]) {
          os << hist[k]->timeslot << ',' << fmt_double(hist[k]->y) << ',' << fmt_double(hist[k]->phi0) << ','
             << fmt_double(hist[k]->ks_distance) << '\n';
        } else {
          os << ",,,\n";
        }
      }
    });
  }

  ExperimentConfig c_;
  std::ostream* log_;
  std::mutex mu_;
  std::vector<std::filesystem::path> written_;
};

inline std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                         std::ostream* log = nullptr) {
  ExperimentRunner runner(config, log);
  auto files = runner.run();
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace dbf::harness

#endif  // DBF_HARNESS_EXPERIMENT_HPP_
