// Copyright 2026 The betanmf Authors. All Rights Reserved.
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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Outcome Run(const std::string& args) {
  const std::string cmd = std::string(BETANMF_CLI) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) o.output += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("betanmf_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<std::string> Lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("fit on an exactly factorizable matrix") {
  TempDir dir;
  // Rank one: outer product of (1,2,3) and (1,2).
  WriteText(dir / "v.csv", "1,2\n2,4\n3,6\n");
  for (const char* algo : {"jmm", "bmm"}) {
    CAPTURE(algo);
    const Outcome o = Run("fit --input " + (dir / "v.csv") + " --beta 1 --rank 1 --algo " +
                          algo + " --out " + (dir / "out"));
    CHECK(o.code == 0);
    CHECK(o.output.find("termination: converged") != std::string::npos);
    CHECK(o.output.find("iterations: 2") != std::string::npos);
    CHECK(Lines(dir / "out/W.csv").size() == 3);
    CHECK(Lines(dir / "out/H.csv").size() == 1);
    CHECK(Lines(dir / "out/trace.csv").size() == 3);
  }
}

TEST_CASE("fit writes a monotone trace") {
  TempDir dir;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::ostringstream csv;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 40; ++j) csv << (j ? "," : "") << u(rng);
    csv << "\n";
  }
  WriteText(dir / "v.csv", csv.str());
  const Outcome o = Run("fit --input " + (dir / "v.csv") +
                        " --beta 1 --rank 4 --algo jmm --sub-iters 2 --seed 3 --out " +
                        (dir / "out"));
  REQUIRE(o.code == 0);
  const auto lines = Lines(dir / "out/trace.csv");
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "iter,objective,seconds,kkt_w,kkt_h");
  double prev = 1e300;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string iter, obj;
    std::getline(row, iter, ',');
    std::getline(row, obj, ',');
    CHECK(std::stoi(iter) == static_cast<int>(i));
    const double value = std::stod(obj);
    CHECK(value <= prev * (1 + 1e-12));
    prev = value;
  }
  CHECK(Lines(dir / "out/W.csv").size() == 50);
  CHECK(Lines(dir / "out/H.csv").size() == 4);
}

TEST_CASE("fit reads matrix market and synthetic input") {
  TempDir dir;
  WriteText(dir / "v.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 1\n1 2 2\n2 1 3\n2 2 4\n");
  Outcome o = Run("fit --input " + (dir / "v.mtx") + " --format mtx --beta 2 --rank 1 --out " +
                  (dir / "a"));
  CHECK(o.code == 0);
  o = Run("fit --synthetic 30,20,3,0.1 --synthetic-seed 2 --beta 1.5 --rank 3 --out " +
          (dir / "b"));
  CHECK(o.code == 0);
  CHECK(Lines(dir / "b/W.csv").size() == 30);
  o = Run("fit --synthetic 30,20 --beta 1 --rank 3 --out " + (dir / "c"));
  CHECK(o.code == 1);
}

TEST_CASE("fit refuses zeros with beta < 1 unless kappa is given") {
  TempDir dir;
  WriteText(dir / "z.csv", "0,1\n2,3\n");
  Outcome o = Run("fit --input " + (dir / "z.csv") + " --beta 0 --rank 1 --out " + (dir / "o"));
  CHECK(o.code == 1);
  CHECK(o.output.find("--kappa") != std::string::npos);
  o = Run("fit --input " + (dir / "z.csv") + " --beta 0 --rank 1 --kappa 1e-3 --out " +
          (dir / "o"));
  CHECK(o.code == 0);
  CHECK(o.output.find("kappa: 0.001") != std::string::npos);
  // beta >= 1 handles zeros without a shift.
  o = Run("fit --input " + (dir / "z.csv") + " --beta 1 --rank 1 --out " + (dir / "o"));
  CHECK(o.code == 0);
}

TEST_CASE("fit hitting the iteration cap exits with 2") {
  TempDir dir;
  const Outcome o = Run("fit --synthetic 30,20,3,0.1 --beta 1 --rank 3 --max-iters 3 --out " +
                        (dir / "o"));
  CHECK(o.code == 2);
  CHECK(o.output.find("termination: max_iters") != std::string::npos);
  CHECK(Lines(dir / "o/trace.csv").size() == 4);
}

TEST_CASE("usage errors exit 1 with help") {
  Outcome o = Run("");
  CHECK(o.code == 1);
  o = Run("fit --beta 1 --out x");
  CHECK(o.code == 1);
  CHECK(o.output.find("--rank") != std::string::npos);
  CHECK(o.output.find("Usage") != std::string::npos);
  o = Run("fit --beta 1 --rank 0 --out x --synthetic 5,5,1,0");
  CHECK(o.code == 1);
  o = Run("fit --beta 1 --rank 1 --tol 0 --out x --synthetic 5,5,1,0");
  CHECK(o.code == 1);
  o = Run("fit --beta 1 --rank 1 --algo foo --out x --synthetic 5,5,1,0");
  CHECK(o.code == 1);
  o = Run("fit --beta 1 --rank 1 --out x");
  CHECK(o.code == 1);
  CHECK(o.output.find("--input") != std::string::npos);
  o = Run("fit --beta 1 --rank 1 --input /no/such.csv --out x");
  CHECK(o.code == 1);
  CHECK(o.output.find("error:") != std::string::npos);
  o = Run("verify --trials 0");
  CHECK(o.code == 1);
  o = Run("--version");
  CHECK(o.code == 0);
  CHECK(o.output.find("0.1.0") != std::string::npos);
}

TEST_CASE("verify") {
  Outcome o = Run("verify");
  CHECK(o.code == 0);
  CHECK(o.output.find("majorization") != std::string::npos);
  CHECK(o.output.find("FAIL") == std::string::npos);
  o = Run("verify --beta-grid 0.5,2 --trials 3 --seed 9");
  CHECK(o.code == 0);
  o = Run("verify --beta-grid 1,x");
  CHECK(o.code == 1);
}

TEST_CASE("bench writes a report") {
  TempDir dir;
  const Outcome o = Run("bench --synthetic 25,20,3,0.1 --beta 1 --rank 3 --seeds 5 "
                        "--max-iters 50 --report " + (dir / "r.json"));
  CHECK(o.code == 0);
  CHECK(o.output.find("acceleration") != std::string::npos);
  std::ifstream in(dir / "r.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["algorithms"]["bmm"]["runs"].size() == 5);
  CHECK(j["algorithms"]["jmm"]["runs"].size() == 5);
  CHECK(j["agreement"].size() == 5);
  CHECK(j["config"]["rank"] == 3);

  const Outcome single = Run("bench --synthetic 25,20,3,0.1 --beta 2 --rank 3 --seeds 2 "
                             "--algos jmm --jobs 2");
  CHECK(single.code == 0);
  CHECK(Run("bench --synthetic 25,20,3,0.1 --beta 1 --rank 3 --algos foo").code == 1);
}
