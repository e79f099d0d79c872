// Copyright 2026 The stratcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratcheck/error.hpp"
#include "stratcheck/report.hpp"
#include "stratcheck/scenario.hpp"

namespace {

using namespace stratcheck;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;

struct Flags {
  std::string scenario_path;
  std::string set;
  std::string out;
  std::string format = "md";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<double> tol;
  std::optional<int> threads;
  std::vector<double> a;
  std::vector<double> grid;
  std::vector<double> at;
};

void add_common(CLI::App* cmd, Flags& f, bool scenario_required) {
  auto* opt = cmd->add_option("scenario", f.scenario_path, "Scenario JSON file");
  if (scenario_required) opt->required();
  cmd->add_option("--set", f.set, "Catalog set name, used when no scenario file is given");
  cmd->add_option("--out", f.out, "Directory for report.md, summary.json and CSV tables");
  cmd->add_option("--format", f.format, "Format printed to stdout")->check(CLI::IsMember({"md", "json", "csv"}));
  cmd->add_option("--seed", f.seed, "Monte Carlo seed");
  cmd->add_option("--samples", f.samples, "Monte Carlo samples per radius and centre");
  cmd->add_option("--tol", f.tol, "Tolerance below which a limit counts as zero");
  cmd->add_option("--threads", f.threads, "Worker threads (default: STRATCHECK_THREADS or hardware)");
}

// Builds the scenario for a subcommand. `section` selects the checks a bare
// --set run enables.
Scenario build(const Flags& f, unsigned section) {
  Scenario sc;
  if (!f.scenario_path.empty()) {
    sc = load_scenario(f.scenario_path);
  } else {
    if (f.set.empty()) throw InputError("set", "give a scenario file or --set NAME");
    sc = default_scenario(f.set);
    if (!(section & kRegularity)) sc.conditions.clear();
    if (!(section & kCones)) sc.cones.n = sc.cones.npf = sc.cones.c1 = false;
    if (!(section & kDensity)) sc.density.enabled = false;
    if ((section & kSlices) && sc.slices.empty() && f.a.empty() && !sc.pairs.empty()) sc.slices = {0.5};
    if (section & kCones) sc.cones.grid = default_grid();
  }
  if (!f.a.empty()) sc.slices = f.a;
  if (!f.grid.empty()) {
    sc.cones.grid = f.grid;
    sc.density.grid = f.grid;
  }
  if (!f.at.empty()) {
    sc.density.grid = f.at;
    sc.density.enabled = true;
  }
  if (f.seed) sc.density.mc.seed = *f.seed;
  if (f.samples) {
    if (*f.samples == 0) throw InputError("--samples", "must be positive");
    sc.density.mc.samples = *f.samples;
  }
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw InputError("--tol", "must be positive");
    sc.tolerances.converged = *f.tol;
  }
  if (f.threads) sc.threads = *f.threads;
  return sc;
}

int execute(const Flags& f, unsigned section) {
  const Scenario sc = build(f, section);
  const Report report = run_scenario(sc, section);
  if (!f.out.empty()) write_outputs(f.out, report);
  if (f.format == "json") {
    std::cout << to_json(report).dump(2) << '\n';
  } else if (f.format == "csv") {
    write_csv(std::cout, check_table(report));
  } else {
    write_markdown(std::cout, report);
  }
  if (report.expectations_failed() > 0) {
    std::cerr << "stratcheck: " << report.expectations_failed() << " of " << report.expectations.size()
              << " expectations not met\n";
    return kExitMismatch;
  }
  if (report.expectations.empty() && !report.errors.empty()) {
    std::cerr << "stratcheck: " << report.errors.size() << " checks ended in an evaluation error\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of stratification regularity conditions"};
  app.require_subcommand(1);

  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    unsigned section;
  };
  const Sub subs[] = {
      {"run", "Run every check a scenario file configures", kAllSections},
      {"report", "Run the full bundle for a scenario or catalog set", kAllSections},
      {"check", "Regularity verdicts", kRegularity},
      {"cone", "Normal-cone fibers, (n), (npf) and C1 evidence", kCones},
      {"density", "Density profiles", kDensity},
      {"slice", "Codimension-one slices", kSlices},
  };
  std::vector<std::pair<CLI::App*, unsigned>> commands;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags, std::string(s.name) == "run");
    if (s.section & kSlices && s.section != kAllSections)
      cmd->add_option("--a", flags.a, "Slice levels z = a")->delimiter(',');
    if (s.section & (kCones | kDensity))
      cmd->add_option("--grid", flags.grid, "Coordinates along X, comma separated")->delimiter(',');
    if (s.section & kDensity)
      cmd->add_option("--at", flags.at, "Density centres along X, comma separated")->delimiter(',');
    commands.emplace_back(cmd, s.section);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    for (const auto& [cmd, section] : commands)
      if (cmd->parsed()) return execute(flags, section);
  } catch (const InputError& e) {
    std::cerr << "stratcheck: input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "stratcheck: expression error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "stratcheck: invalid JSON: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "stratcheck: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
