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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stratcheck/cones.hpp"
#include "stratcheck/density.hpp"
#include "stratcheck/regularity.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

struct DensitySettings {
  bool enabled = false;
  std::string stratum;       // empty: region stratum if any, else the first pair's Y
  std::vector<double> grid;  // coordinates along X
  std::vector<double> u_grid;
  MonteCarloConfig mc;
};

struct ConeSettings {
  bool n = false;
  bool npf = false;
  bool c1 = false;
  std::vector<double> grid;
};

struct Scenario {
  std::string name;
  StratifiedSet set;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<Vec<double>> basepoints;
  std::vector<std::string> conditions;  // regularity conditions only
  FamilyConfig family;
  Tolerances tolerances;
  ConeSettings cones;
  std::vector<double> slices;
  DensitySettings density;
  std::vector<std::pair<std::string, nlohmann::json>> expect;  // in file order
  int threads = 0;
};

// Throws InputError with a JSON path on schema violations.
Scenario parse_scenario(const nlohmann::json& doc, std::string name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

// Catalog set with every check enabled at default settings.
Scenario default_scenario(const std::string& set_name);

// Inline set: {"name", "ambient_dim", "strata": [...], "pairs": [[Y, X]], "notes": [...]}.
StratifiedSet parse_set(const nlohmann::json& j, const std::string& path);

std::vector<std::string> default_conditions();
std::vector<double> default_grid();

}  // namespace stratcheck
