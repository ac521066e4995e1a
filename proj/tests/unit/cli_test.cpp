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


#include <fstream>

#include "doctest.h"
#include "support/pipeline.hpp"

using namespace structseq::testing;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"no-such-command"}).code == 1);
  auto r = run_cli({"train-sdnn", "--mode", "lattice", "--out", "x.model"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--data") != std::string::npos);
  CHECK(run_cli({"evaluate", "--hyp", "h", "--ref", "r", "--metric", "bogus"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("evaluate") {
  auto dir = fresh_dir("structseq_cli_evaluate");
  ScopedCwd cwd(dir);
  write("vocab.txt", "A\nB\nC\n");
  write("ref.txt", "UTT a 4 1\n1 A\n2 B\n3 B\n4 C\n\nUTT b 2 1\n0 C\n0 C\n");
  write("same.txt", "HYP a 4\nA\nB\nB\nC\nHYP b 2\nC\nC\n");
  write("off.txt", "HYP a 4\nA\nB\nC\nC\nHYP b 2\nC\nC\n");

  auto r = run_cli({"evaluate", "--hyp", "same.txt", "--ref", "ref.txt", "--metric", "frame"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.000000\n");
  CHECK(run_cli({"evaluate", "--hyp", "off.txt", "--ref", "ref.txt", "--metric", "frame"}).out == "0.166667\n");

  SUBCASE("format errors exit 2 and name the line") {
    write("bad.txt", "UTT a 1 2\n1.0 2.0 3.0 A\n");
    auto b = run_cli({"evaluate", "--hyp", "same.txt", "--ref", "bad.txt", "--metric", "frame"});
    CHECK(b.code == 2);
    CHECK(b.err.find("line 2") != std::string::npos);
  }
  SUBCASE("missing files exit 2") {
    CHECK(run_cli({"evaluate", "--hyp", "nope.txt", "--ref", "ref.txt", "--metric", "frame"}).code == 2);
  }
  SUBCASE("mismatched ids exit 2") {
    write("short.txt", "HYP a 4\nA\nB\nB\nC\n");
    CHECK(run_cli({"evaluate", "--hyp", "short.txt", "--ref", "ref.txt", "--metric", "phone"}).code == 2);
  }
}

TEST_CASE("small pipeline") {
  auto dir = fresh_dir("structseq_cli_pipeline");
  ScopedCwd cwd(dir);
  REQUIRE(run_cli({"gen-data", "--out", "d", "--k", "3", "--dim", "2", "--num-train", "12", "--num-test", "4",
                   "--min-len", "4", "--max-len", "6", "--seed", "3"})
              .code == 0);
  CHECK(slurp("d/vocab.txt") == "p0\np1\np2\n");
  REQUIRE(run_cli({"train-linear", "--data", "d/train.txt", "--epochs", "3", "--out", "lin.model"}).code == 0);
  REQUIRE(run_cli({"nbest", "--data", "d/test.txt", "--model", "lin.model", "--n", "5", "--out", "c.txt"}).code == 0);
  REQUIRE(run_cli({"train-sdnn", "--data", "d/train.txt", "--mode", "nolattice", "--hidden", "4", "--epochs", "2",
                   "--num-random", "3", "--restarts", "1", "--out", "net.model", "--report", "net.csv"})
              .code == 0);
  CHECK(slurp("net.csv").find("epoch,loss,heldout_frame_acc,heldout_per,num_examples\n") != std::string::npos);
  for (std::string mode : {"bruteforce", "coord", "candidates"}) {
    auto r = run_cli({"infer", "--data", "d/test.txt", "--model", "net.model", "--mode", mode, "--candidates", "c.txt",
                      "--out", "h.txt"});
    CHECK(r.code == 0);
    CHECK(run_cli({"evaluate", "--hyp", "h.txt", "--ref", "d/test.txt", "--metric", "phone"}).code == 0);
  }
  CHECK(run_cli({"infer", "--data", "d/test.txt", "--model", "lin.model", "--mode", "viterbi", "--out", "v.txt"}).code == 0);
  // Viterbi needs a linear model.
  CHECK(run_cli({"infer", "--data", "d/test.txt", "--model", "net.model", "--mode", "viterbi", "--out", "v.txt"}).code != 0);
  CHECK(run_cli({"study", "--data", "d/test.txt", "--candidates", "c.txt", "--model", "net.model", "--out", "s.csv"}).code == 0);
  auto rows = read_study("s.csv");
  CHECK(rows.size() == 5);
  CHECK(rows.at("oracle_min") <= rows.at("oracle_max"));
}
