// Copyright 2026 The structseq Authors
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

// Drives the command-line front end in-process, the way a shell script would.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli.hpp"

namespace structseq::testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> v(args);
  std::ostringstream out, err;
  const int code = cli::run(v, out, err);
  return {code, out.str(), err.str()};
}

// Changes the working directory for the lifetime of the guard.
class ScopedCwd {
 public:
  explicit ScopedCwd(const std::filesystem::path& dir) : saved_(std::filesystem::current_path()) {
    std::filesystem::create_directories(dir);
    std::filesystem::current_path(dir);
  }
  ~ScopedCwd() { std::filesystem::current_path(saved_); }
  ScopedCwd(const ScopedCwd&) = delete;
  ScopedCwd& operator=(const ScopedCwd&) = delete;

 private:
  std::filesystem::path saved_;
};

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// policy -> value from a study CSV, skipping comment lines.
inline std::map<std::string, double> read_study(const std::filesystem::path& p) {
  std::istringstream in(slurp(p));
  std::map<std::string, double> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "policy,per") continue;
    const auto comma = line.find(',');
    rows[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return rows;
}

// Synthetic benchmark end to end, run in the current directory with relative paths.
// Returns the first failing step's diagnostics, or an empty string.
inline std::string run_benchmark_pipeline() {
  const std::vector<std::vector<std::string>> steps{
      {"gen-data", "--out", "data", "--seed", "7"},
      {"train-linear", "--data", "data/train.txt", "--epochs", "30", "--seed", "7", "--out", "linear.model",
       "--report", "linear.csv"},
      {"nbest", "--data", "data/test.txt", "--model", "linear.model", "--n", "50", "--out", "test.cand"},
      {"train-sdnn", "--data", "data/train.txt", "--mode", "lattice", "--generator", "linear.model", "--loss", "bce",
       "--layers", "1", "--hidden", "64", "--epochs", "30", "--nbest", "50", "--seed", "7", "--out", "sdnn.model",
       "--report", "sdnn.csv"},
      {"infer", "--data", "data/test.txt", "--model", "sdnn.model", "--mode", "candidates", "--candidates",
       "test.cand", "--out", "test.hyp"},
      {"study", "--data", "data/test.txt", "--candidates", "test.cand", "--model", "sdnn.model", "--seed", "7",
       "--out", "study.csv"},
  };
  for (const auto& step : steps) {
    std::ostringstream out, err;
    const int code = cli::run(step, out, err);
    if (code != 0) return step.front() + " exited " + std::to_string(code) + ": " + err.str();
  }
  return {};
}

inline const std::vector<std::string>& pipeline_artifacts() {
  static const std::vector<std::string> files{"data/vocab.txt", "data/train.txt", "data/test.txt",
                                              "linear.model",   "linear.csv",     "test.cand",
                                              "sdnn.model",     "sdnn.csv",       "test.hyp",
                                              "study.csv"};
  return files;
}

}  // namespace structseq::testing
