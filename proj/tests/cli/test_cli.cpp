#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"
#include "navth/io.hpp"
#include "navth/server.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace navth;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run navth_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.status = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("navth_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is);
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

/// Data rows of a TSV table (comment and header lines removed).
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::istringstream is(slurp(p));
  bool header = true;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

void check_ok(const Run& r) {
  INFO(r.err);
  CHECK(r.status == 0);
  CHECK(r.err.empty());
}

void check_error(const Run& r, const std::string& code) {
  CHECK(r.status != 0);
  const json rec = json::parse(r.err);
  CHECK(rec["error"]["code"] == code);
  CHECK(rec["error"]["message"].is_string());
}

}  // namespace

TEST_CASE("gen-scenes is deterministic and respects split hygiene") {
  TempDir tmp("gen");
  check_ok(navth_cli({"gen-scenes", "--splits", "6,2,2", "--seed", "1", "--out", tmp / "a"}));
  check_ok(navth_cli({"gen-scenes", "--splits", "6,2,2", "--seed", "1", "--out", tmp / "b"}));
  CHECK(tree(tmp / "a") == tree(tmp / "b"));

  const Corpus c = load_corpus(tmp / "a");
  CHECK(c.scenes.size() == 10);
  CHECK(c.split_scenes(SplitName::train).size() == 5);
  CHECK(c.split_scenes(SplitName::val).size() == 1);
  CHECK(c.split_scenes(SplitName::test_dev).size() == 2);
  CHECK(c.split_scenes(SplitName::test_standard).size() == 2);

  // Train and val share one pool; pools must not share layouts.
  std::map<std::string, std::set<std::string>> layouts;
  for (const auto& sp : c.splits)
    for (const auto& id : sp.scene_ids)
      layouts[sp.name == SplitName::val ? "train" : to_string(sp.name)].insert(c.scene(id).layout_id);
  REQUIRE(layouts.size() == 3);
  for (auto a = layouts.begin(); a != layouts.end(); ++a)
    for (auto b = std::next(a); b != layouts.end(); ++b)
      for (const auto& l : a->second) CHECK(b->second.count(l) == 0);

  const json m = json::parse(slurp(fs::path(tmp / "a") / "manifest.json"));
  CHECK(m["command"] == "gen-scenes");
  CHECK(m["seeds"]["corpus"] == 1);
  CHECK(m["config"]["splits"] == "6,2,2");
  CHECK(m["tool_version"].is_string());
  CHECK(m["started_at"].is_string());
  CHECK(m["finished_at"].is_string());
  CHECK(!m["outputs"].empty());

  check_ok(navth_cli({"gen-scenes", "--splits", "6,2,2", "--seed", "2", "--out", tmp / "c"}));
  CHECK(tree(tmp / "a") != tree(tmp / "c"));
}

TEST_CASE("stats tables match a manual tally and are reproducible") {
  TempDir tmp("stats");
  check_ok(navth_cli({"gen-scenes", "--splits", "0,1,0", "--out", tmp / "corpus"}));
  check_ok(navth_cli({"stats", "--corpus", tmp / "corpus", "--samples", "40", "--out", tmp / "s1"}));
  check_ok(navth_cli({"stats", "--corpus", tmp / "corpus", "--samples", "40", "--out", tmp / "s2"}));
  CHECK(tree(tmp / "s1") == tree(tmp / "s2"));

  // Category counts straight from the scene document.
  const json corpus = json::parse(slurp(fs::path(tmp / "corpus") / "corpus.json"));
  const std::string id = corpus["splits"]["test-dev"][0];
  const json scene = json::parse(slurp(fs::path(tmp / "corpus") / "scenes" / (id + ".json")));
  std::map<std::string, long> tally;
  for (const auto& o : scene["objects"]) ++tally[o["category"].get<std::string>()];
  for (const auto& f : scene["furniture"]) ++tally[f["category"].get<std::string>()];
  std::map<std::string, long> table;
  for (const auto& r : rows(fs::path(tmp / "s1") / "categories.tsv")) table[r[1]] += std::stol(r[2]);
  CHECK(table == tally);

  const std::string vis = slurp(fs::path(tmp / "s1") / "visible_objects.tsv");
  CHECK(vis.rfind("# samples=40\n", 0) == 0);
  long sum = 0;
  for (const auto& r : rows(fs::path(tmp / "s1") / "visible_objects.tsv")) sum += std::stol(r[1]);
  CHECK(sum == 40);

  long pairs = 0;
  for (const auto& r : rows(fs::path(tmp / "s1") / "path_actions.tsv")) pairs += std::stol(r[2]);
  const std::string path = slurp(fs::path(tmp / "s1") / "path_actions.tsv");
  CHECK(path.rfind("# samples=" + std::to_string(pairs) + " ", 0) == 0);

  const auto heat = rows(fs::path(tmp / "s1") / "heatmap_walls.tsv");
  CHECK(!heat.empty());
  for (const auto& r : heat) {
    const double v = std::stod(r[4]);
    CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("eval reports and results are reproducible") {
  TempDir tmp("eval");
  check_ok(navth_cli({"gen-scenes", "--splits", "5,2,0", "--out", tmp / "corpus"}));
  const std::vector<std::string> base{"eval", "--corpus", tmp / "corpus", "--starts-per-scene", "15"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };

  check_ok(navth_cli(with({"--agent", "instant_done", "--out", tmp / "done"})));
  const auto report = rows(fs::path(tmp / "done") / "report.tsv");
  REQUIRE(report.size() == 3);
  for (const auto& r : report) {
    CHECK(std::stod(r[1]) > 0);
    CHECK(std::stod(r[2]) == 0.0);
    CHECK(std::stod(r[4]) == 1.0);
  }

  check_ok(navth_cli(with({"--agent", "random", "--seed", "4", "--out", tmp / "r1"})));
  check_ok(navth_cli(with({"--agent", "random", "--seed", "4", "--workers", "3", "--out", tmp / "r2"})));
  CHECK(slurp(fs::path(tmp / "r1") / "results.ndjson") == slurp(fs::path(tmp / "r2") / "results.ndjson"));
  check_ok(navth_cli(with({"--agent", "random", "--seed", "5", "--out", tmp / "r3"})));
  CHECK(slurp(fs::path(tmp / "r1") / "results.ndjson") != slurp(fs::path(tmp / "r3") / "results.ndjson"));

  std::ifstream is(fs::path(tmp / "r1") / "results.ndjson");
  CHECK(read_results(is).size() == 30);
  const json m = json::parse(slurp(fs::path(tmp / "r1") / "manifest.json"));
  CHECK(m["command"] == "eval");
  CHECK(m["seeds"].contains("starts"));
  CHECK(m["seeds"].contains("episodes"));
}

TEST_CASE("replay of an oracle trajectory overlays the shortest path") {
  TempDir tmp("replay");
  check_ok(navth_cli({"gen-scenes", "--splits", "5,1,0", "--out", tmp / "corpus"}));
  check_ok(navth_cli({"eval", "--corpus", tmp / "corpus", "--agent", "oracle", "--noise-free", "--trajectories",
                      "--starts-per-scene", "6", "--out", tmp / "ev"}));
  int replayed = 0;
  for (const auto& e : fs::directory_iterator(fs::path(tmp / "ev") / "trajectories")) {
    const std::string out = tmp / ("rp" + std::to_string(replayed++));
    check_ok(navth_cli({"replay", "--corpus", tmp / "corpus", "--trajectory", e.path().string(), "--out", out}));
    const json summary = json::parse(slurp(fs::path(out) / "summary.json"));
    CHECK(summary["outcome"] == "success");
    CHECK(summary["taken_equals_shortest"] == true);
    std::vector<std::vector<std::string>> taken, shortest;
    for (auto& r : rows(fs::path(out) / "overlay.tsv")) {
      auto& dst = r[0] == "taken" ? taken : shortest;
      dst.push_back({r.begin() + 1, r.end()});
    }
    CHECK(taken == shortest);
  }
  CHECK(replayed == 6);
}

TEST_CASE("train writes a checkpoint that eval can load") {
  TempDir tmp("train");
  check_ok(navth_cli({"gen-scenes", "--splits", "5,1,0", "--out", tmp / "corpus"}));
  check_ok(navth_cli({"train", "--corpus", tmp / "corpus", "--episodes", "4", "--workers", "1", "--out",
                      tmp / "run"}));
  CHECK(fs::exists(fs::path(tmp / "run") / "policy.ckpt"));
  CHECK(fs::exists(fs::path(tmp / "run") / "training_log.ndjson"));
  check_ok(navth_cli({"eval", "--corpus", tmp / "corpus", "--checkpoint", (fs::path(tmp / "run") / "policy.ckpt").string(),
                      "--starts-per-scene", "3", "--out", tmp / "ev"}));
  const json m = json::parse(slurp(fs::path(tmp / "ev") / "manifest.json"));
  CHECK(m["inputs"].size() == 2);
}

TEST_CASE("config file mirrors flags and flags win") {
  TempDir tmp("config");
  {
    std::ofstream os(tmp / "run.toml");
    os << "seed = 9\n\n[gen-scenes]\nsplits = \"5,1,1\"\n";
  }
  check_ok(navth_cli({"--config", tmp / "run.toml", "gen-scenes", "--out", tmp / "a"}));
  json m = json::parse(slurp(fs::path(tmp / "a") / "manifest.json"));
  CHECK(m["config"]["seed"] == 9);
  CHECK(m["config"]["splits"] == "5,1,1");
  check_ok(navth_cli({"--config", tmp / "run.toml", "gen-scenes", "--seed", "3", "--out", tmp / "b"}));
  m = json::parse(slurp(fs::path(tmp / "b") / "manifest.json"));
  CHECK(m["config"]["seed"] == 3);
  CHECK(m["config"]["splits"] == "5,1,1");
}

TEST_CASE("errors produce exactly one record and a nonzero status") {
  TempDir tmp("errors");
  check_error(navth_cli({"eval", "--corpus", tmp / "missing", "--out", tmp / "x"}), "missing_corpus");
  check_error(navth_cli({"gen-scenes", "--splits", "5,x,1", "--out", tmp / "x"}), "invalid_argument");
  check_error(navth_cli({"gen-scenes", "--catalog", tmp / "nope.json", "--out", tmp / "x"}), "missing_file");
  {
    std::ofstream os(tmp / "bad.json");
    os << "{\"schema\": \"navth-catalog/1\"}";
  }
  check_error(navth_cli({"gen-scenes", "--catalog", tmp / "bad.json", "--out", tmp / "x"}), "invalid_catalog");
  {
    std::ofstream os(tmp / "file");
    os << "x";
  }
  check_error(navth_cli({"gen-scenes", "--splits", "1,0,0", "--out", tmp / "file"}), "unwritable_path");
  check_error(navth_cli({"gen-scenes", "--no-such-flag"}), "usage");
  check_error(navth_cli({}), "usage");

  check_ok(navth_cli({"gen-scenes", "--splits", "5,1,0", "--out", tmp / "corpus"}));
  check_error(navth_cli({"eval", "--corpus", tmp / "corpus", "--agent", "nobody", "--out", tmp / "x"}),
              "invalid_argument");
  check_error(navth_cli({"eval", "--corpus", tmp / "corpus", "--split", "test-standard", "--out", tmp / "x"}),
              "empty_corpus");
  check_error(navth_cli({"eval", "--corpus", tmp / "corpus", "--fov", "-3", "--out", tmp / "x"}), "invalid_camera");

  const Run help = navth_cli({"--help"});
  CHECK(help.status == 0);
  CHECK(help.err.empty());
  CHECK(help.out.find("gen-scenes") != std::string::npos);
}

TEST_CASE("serve answers the HTTP protocol and records finished episodes") {
  TempDir tmp("serve");
  check_ok(navth_cli({"gen-scenes", "--splits", "5,1,0", "--out", tmp / "corpus"}));
  Run served;
  std::thread t([&] {
    served = navth_cli({"serve", "--corpus", tmp / "corpus", "--port", "0", "--envs", "2", "--duration", "3",
                        "--out", tmp / "srv"});
  });
  const fs::path endpoint = fs::path(tmp / "srv") / "endpoint.json";
  for (int i = 0; i < 200 && !fs::exists(endpoint); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  REQUIRE(fs::exists(endpoint));
  const json ep = json::parse(slurp(endpoint));
  {
    RemoteEnvClient cli("127.0.0.1", ep["port"].get<int>());
    CHECK(cli.health()["envs"].size() == 2);
    cli.acquire("env-1");
    cli.reset();
    const json r = cli.step("Done");
    CHECK(r["terminated"] == true);
    cli.release();
  }
  t.join();
  check_ok(served);
  std::ifstream is(fs::path(tmp / "srv") / "results.ndjson");
  CHECK(read_results(is).size() == 1);
  CHECK(fs::exists(fs::path(tmp / "srv") / "manifest.json"));
}
