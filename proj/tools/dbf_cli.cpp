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

// Command-line front end: run a config file, run a named preset, or run
// the acceptance checks tied to a preset.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dbf/harness/checks.hpp"
#include "dbf/harness/config.hpp"
#include "dbf/harness/experiment.hpp"
#include "dbf/harness/presets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::optional<std::string> out_dir;
};

void apply(const Overrides& o, dbf::harness::ExperimentConfig& c) {
  if (o.seed) c.seeds = {*o.seed};
  if (o.horizon) c.horizon = *o.horizon;
  if (o.out_dir) c.out_dir = *o.out_dir;
  dbf::harness::validate(c);
}

int run_checks(const std::vector<dbf::harness::CheckFn>& checks) {
  bool all_passed = true;
  for (auto fn : checks) {
    const auto r = fn();
    std::cout << dbf::harness::format_result(r) << '\n' << std::flush;
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kExitOk : kExitCheckFailed;
}

int execute(const dbf::harness::ExperimentConfig& c, bool check) {
  // Resolve checks first so an unknown name fails before the run.
  const auto checks = check ? dbf::harness::checks_for(c.name) : std::vector<dbf::harness::CheckFn>{};
  const auto files = dbf::harness::run_experiment(c, &std::cerr);
  for (const auto& f : files) std::cout << f.string() << '\n';
  if (!check) return kExitOk;
  return run_checks(checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-bit feedback distributed beamforming simulator"};
  app.require_subcommand(1);

  Overrides overrides;
  app.add_option("--seed", overrides.seed, "replace the seed list with a single seed");
  app.add_option("--horizon", overrides.horizon, "number of timeslots")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", overrides.out_dir, "output directory");

  std::string config_path;
  bool run_check = false;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("--check", run_check, "run the acceptance checks for the config's preset name afterwards");

  std::string preset_name;
  bool dump = false;
  bool preset_check = false;
  auto* pre = app.add_subcommand("preset", "run a named preset");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_flag("--dump", dump, "print the equivalent config file and exit");
  pre->add_flag("--check", preset_check, "run the preset's acceptance checks afterwards");

  std::string check_name;
  auto* chk = app.add_subcommand("check", "run acceptance checks (preset name, 'properties' or 'all')");
  chk->add_option("name", check_name, "preset name")->required();

  app.add_subcommand("list", "list preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& n : dbf::harness::preset_names()) std::cout << n << '\n';
      return kExitOk;
    }
    if (*run) {
      auto c = dbf::harness::load_config(config_path);
      apply(overrides, c);
      return execute(c, run_check);
    }
    if (*pre) {
      auto c = dbf::harness::preset(preset_name);
      apply(overrides, c);
      if (dump) {
        std::cout << dbf::harness::dump_config(c);
        return kExitOk;
      }
      return execute(c, preset_check);
    }
    return run_checks(dbf::harness::checks_for(check_name));
  } catch (const dbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  }
}
