// Copyright 2026 The c2v Authors
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

// Runs the c2v binary as a subprocess.

#include <doctest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "c2v/gateway.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string(C2V_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const fs::path kData = fs::path(C2V_SOURCE_DIR) / "data/synthetic";

// Snapshots produced through the CLI once for all cases.
struct Fixture {
  fs::path dir = c2v::testing::scratch_dir("cli");
  std::string raw = (dir / "raw.c2v").string();
  std::string pca = (dir / "pca.c2v").string();
  std::string seg = (dir / "seg.c2v").string();
  std::string vectors = (kData / "vectors.txt").string();
  std::string pca_report;
  std::string seg_report;
  Fixture() {
    REQUIRE(run("embed --dataset " + (kData / "dataset.tsv").string() + " --vectors " + vectors +
                " --strategy text --out " + raw)
                .exit_code == 0);
    const auto p = run("pca --snapshot " + raw + " --threshold 0.9 --out " + pca);
    REQUIRE(p.exit_code == 0);
    pca_report = p.out;
    const auto s = run("segment fit --snapshot " + pca + " --k 8 --seed 3 --restarts 2 --out " + seg);
    REQUIRE(s.exit_code == 0);
    seg_report = s.out;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("peers --firm F1001").exit_code == 2);
  CHECK(run("peers --snapshot " + fixture().seg + " --firm F1001 --n 0").exit_code == 2);
  CHECK(run("peers --snapshot " + fixture().seg + " --firm nobody").exit_code == 2);
  CHECK(run("peers --snapshot /nonexistent.c2v --firm F1001").exit_code == 2);
  CHECK(run("--version").exit_code == 0);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("stage reports") {
  const auto& f = fixture();
  const auto pca = lines(f.pca_report);
  REQUIRE(pca.size() >= 4);
  CHECK(pca[0] == "input_dim\t24");
  CHECK(pca[2] == "component\texplained\tcumulative");
  CHECK(f.seg_report.find("k\t8\nseed\t3\n") == 0);
  const auto elbow = run("segment elbow --snapshot " + f.pca + " --k-min 1 --k-max 12 --seed 1");
  CHECK(elbow.exit_code == 0);
  CHECK(lines(elbow.out).size() == 14);
  CHECK(lines(elbow.out).back().rfind("# elbow\t", 0) == 0);
}

TEST_CASE("peer lines match the service") {
  const auto& f = fixture();
  const auto engine = c2v::gateway::Engine::open(f.seg);
  for (const char* firm : {"F1001", "F1200", "F1599"}) {
    CAPTURE(firm);
    const auto cli = run(std::string("peers --snapshot ") + f.seg + " --firm " + firm + " --n 7");
    REQUIRE(cli.exit_code == 0);
    const auto body = Json::parse(engine.peers(firm, 7).body);
    const auto got = lines(cli.out);
    REQUIRE(got.size() == body["peers"].size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      const auto& p = body["peers"][i];
      std::ostringstream want;
      want << p["rank"].get<int>() << '\t' << p["id"].get<std::string>() << '\t'
           << p["name"].get<std::string>() << '\t';
      CHECK(got[i].rfind(want.str(), 0) == 0);
    }
    const auto json = run(std::string("peers --json --snapshot ") + f.seg + " --firm " + firm + " --n 7");
    CHECK(Json::parse(json.out) == body);
  }

  const auto one = run("portfolio --json --snapshot " + f.seg + " --firms F1001 --n 5");
  CHECK(Json::parse(one.out) == Json::parse(engine.peers("F1001", 5).body));
  const std::vector<std::string> ids = {"F1001", "F1002", "F1003"};
  const auto many = run("portfolio --json --snapshot " + f.seg + " --firms F1001,F1002,F1003 --n 5");
  CHECK(Json::parse(many.out) == Json::parse(engine.portfolio_peers(ids, 5).body));

  const auto seg = run("segment-peers --json --snapshot " + f.seg + " --firm F1001");
  CHECK(Json::parse(seg.out) == Json::parse(engine.segment_peers("F1001").body));
}

TEST_CASE("semantic commands") {
  const auto& f = fixture();
  const auto top = run("topwords --snapshot " + f.seg + " --vectors " + f.vectors + " --firm F1001 --n 4");
  CHECK(top.exit_code == 0);
  CHECK(lines(top.out).size() == 4);
  CHECK(run("topwords --snapshot " + f.seg + " --firm F1001").exit_code == 2);
  const auto ana = run("analogy --snapshot " + f.seg + " --vectors " + f.vectors +
                       " --a word:topicA1 --b word:topicC1 --c firm:F1001 --n 3");
  CHECK(ana.exit_code == 0);
  CHECK(lines(ana.out).size() == 3);
  const auto map = run("map --snapshot " + f.seg);
  CHECK(map.exit_code == 0);
  CHECK(lines(map.out).size() == 601);
  CHECK(lines(map.out).front() == "company_id,x,y");
}

TEST_CASE("serve answers HTTP requests") {
  const auto& f = fixture();
  int fds[2];
  REQUIRE(::pipe(fds) == 0);
  const pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execl(C2V_CLI_PATH, C2V_CLI_PATH, "serve", "--snapshot", f.seg.c_str(), "--port", "0",
            "--threads", "2", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  std::string banner;
  char c = 0;
  while (::read(fds[0], &c, 1) == 1 && c != '\n') banner += c;
  ::close(fds[0]);
  REQUIRE(banner.rfind("listening on 127.0.0.1:", 0) == 0);
  const int port = std::stoi(banner.substr(banner.rfind(':') + 1));

  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(Json::parse(health->body)["rows"] == 600);
  CHECK(health->has_header("X-C2V-Digest"));
  const auto peers = client.Get("/peers/F1001?n=3");
  REQUIRE(peers);
  CHECK(Json::parse(peers->body)["peers"].size() == 3);
  const auto missing = client.Get("/peers/nobody");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  const auto post = client.Post("/portfolio-peers", R"({"ids":["F1001","F1002"],"n":4})", "application/json");
  REQUIRE(post);
  CHECK(post->status == 200);

  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}
