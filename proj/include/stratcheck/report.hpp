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
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratcheck/scenario.hpp"

namespace stratcheck {

enum Section : unsigned {
  kRegularity = 1u << 0,
  kCones = 1u << 1,
  kSlices = 1u << 2,
  kDensity = 1u << 3,
  kAllSections = kRegularity | kCones | kSlices | kDensity,
};

struct CheckRow {
  std::string key;  // name used by expectations, e.g. "r", "slice(0.5):b", "theta@0"
  std::string section;
  std::string outcome;
  std::optional<double> value;
  std::optional<bool> flag;
  std::vector<int> dims;
  std::string witness;
  std::string detail;
};

struct ExpectationResult {
  std::string key;
  std::string expected;
  std::string actual;
  bool pass = false;
};

// A CSV table as rows of already formatted cells.
struct Table {
  std::string name;  // file name
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string scenario;
  std::string set;
  std::vector<std::string> notes;
  std::vector<CheckRow> rows;
  std::vector<ExpectationResult> expectations;
  std::vector<std::string> errors;  // evaluation errors, one per failed check
  std::vector<Table> tables;        // limits, fibers, rprofile, density

  const CheckRow* find(const std::string& key) const;
  std::size_t expectations_failed() const;
};

// Runs the selected sections of a scenario. Evaluation errors are recorded in
// the report; an expectation naming a check that does not exist throws
// InputError.
Report run_scenario(const Scenario& sc, unsigned sections = kAllSections);

void write_markdown(std::ostream& out, const Report& r);
nlohmann::ordered_json to_json(const Report& r);
void write_csv(std::ostream& out, const Table& t);
// Check rows as CSV.
Table check_table(const Report& r);

// Writes report.md, summary.json and one CSV per table into dir.
void write_outputs(const std::filesystem::path& dir, const Report& r);

// Number formatting shared by every output, fixed so files are reproducible.
std::string fmt(double v);

}  // namespace stratcheck
