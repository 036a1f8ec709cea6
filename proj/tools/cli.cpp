#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "navth/agents.hpp"
#include "navth/io.hpp"
#include "navth/pathing.hpp"
#include "navth/server.hpp"

#ifndef NAVTH_VERSION
#define NAVTH_VERSION "0.0.0"
#endif

namespace navth::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string split;
  double fov = 42.5;
  double sigma_t = MotionNoiseModel::robot().translation_std;
  double sigma_r = MotionNoiseModel::robot().rotation_std;
  bool noise_free = false;
  int workers = 8;
  long episodes = 0;  // 0 = per-command default
  std::string target = "Television";

  std::string splits = "75,4,10";
  std::string catalog;

  std::string corpus;
  int samples = 100;
  int max_scenes = 0;

  double lr = 1e-4;
  bool blind = false;
  std::string targets;

  std::string agent = "random";
  std::string checkpoint;
  int starts_per_scene = 100;
  bool trajectories = false;

  std::string host = "127.0.0.1";
  int port = 8080;
  int envs = 1;
  std::string scene;
  double duration = 0.0;

  std::string trajectory;
};

json options_json(const Options& o) {
  return {{"seed", o.seed},         {"out", o.out},
          {"split", o.split},       {"fov", o.fov},
          {"noise_sigma_t", o.sigma_t}, {"noise_sigma_r", o.sigma_r},
          {"noise_free", o.noise_free}, {"workers", o.workers},
          {"episodes", o.episodes}, {"target", o.target},
          {"splits", o.splits},     {"catalog", o.catalog},
          {"corpus", o.corpus},     {"samples", o.samples},
          {"max_scenes", o.max_scenes}, {"lr", o.lr},
          {"blind", o.blind},       {"targets", o.targets},
          {"agent", o.agent},       {"checkpoint", o.checkpoint},
          {"starts_per_scene", o.starts_per_scene}, {"trajectories", o.trajectories},
          {"host", o.host},         {"port", o.port},
          {"envs", o.envs},         {"scene", o.scene},
          {"duration", o.duration}, {"trajectory", o.trajectory}};
}

class Manifest {
 public:
  Manifest(std::string command, const Options& opts, std::vector<std::string> argv)
      : command_(std::move(command)), opts_(opts), argv_(std::move(argv)),
        started_(format_timestamp(WallClock::now())) {}

  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const std::string& path) { outputs_.push_back(path); }

  void write() const {
    const fs::path path = fs::path(opts_.out) / "manifest.json";
    std::ofstream os(path);
    if (!os) throw Error("unwritable_path", "cannot write " + path.string());
    json seeds = json::object();
    for (const auto& [k, v] : seeds_) seeds[k] = v;
    os << json{{"schema", "navth-manifest/1"},
               {"command", command_},
               {"argv", argv_},
               {"config", options_json(opts_)},
               {"seeds", seeds},
               {"inputs", inputs_},
               {"outputs", outputs_},
               {"tool_version", NAVTH_VERSION},
               {"started_at", started_},
               {"finished_at", format_timestamp(WallClock::now())}}
              .dump(2)
       << '\n';
  }

 private:
  std::string command_;
  const Options& opts_;
  std::vector<std::string> argv_;
  std::string started_;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("unwritable_path", "cannot create directory " + dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("unwritable_path", "cannot write " + path.string());
  return os;
}

template <class F>
void write_file(const fs::path& path, F&& fill) {
  auto os = open_out(path);
  fill(os);
  if (!os) throw Error("unwritable_path", "write failed: " + path.string());
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("missing_file", "cannot read " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "a,b,c": train+val pool a (val takes a fifth), test-dev b, test-standard c.
SplitSizes parse_splits(const std::string& s) {
  const auto parts = split_list(s);
  if (parts.size() != 3) throw PreconditionError("invalid_argument", "--splits expects a,b,c");
  std::array<int, 3> n{};
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      n[i] = std::stoi(parts[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != parts[i].size() || n[i] < 0)
      throw PreconditionError("invalid_argument", "--splits entry is not a count: " + parts[i]);
  }
  SplitSizes sizes;
  sizes.val = n[0] / 5;
  sizes.train = n[0] - sizes.val;
  sizes.test_dev = n[1];
  sizes.test_standard = n[2];
  return sizes;
}

AssetCatalog read_catalog(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return catalog_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw PreconditionError("invalid_catalog", path + ": " + e.what());
  } catch (const Error& e) {
    throw PreconditionError("invalid_catalog", path + ": " + e.what());
  }
}

struct LoadedCorpus {
  AssetCatalog catalog;
  Corpus corpus;
};

LoadedCorpus read_corpus(const std::string& dir, Manifest& manifest) {
  if (dir.empty()) throw PreconditionError("invalid_argument", "--corpus is required");
  LoadedCorpus lc;
  const fs::path cat = fs::path(dir) / "catalog.json";
  lc.catalog = fs::exists(cat) ? read_catalog(cat.string()) : default_catalog();
  lc.corpus = load_corpus(dir, lc.catalog);
  manifest.input(dir);
  return lc;
}

std::vector<const Scene*> select_scenes(const Corpus& corpus, const std::string& split, int max_scenes) {
  std::vector<const Scene*> scenes;
  if (split.empty() || split == "all") {
    for (const auto& s : corpus.scenes) scenes.push_back(&s);
  } else {
    scenes = corpus.split_scenes(split_from_string(split));
  }
  if (max_scenes > 0 && static_cast<int>(scenes.size()) > max_scenes) scenes.resize(static_cast<std::size_t>(max_scenes));
  if (scenes.empty()) throw PreconditionError("empty_corpus", "no scenes in split '" + split + "'");
  return scenes;
}

MotionNoiseModel noise_of(const Options& o) {
  if (o.noise_free) return MotionNoiseModel::none();
  MotionNoiseModel m = MotionNoiseModel::robot();
  m.translation_std = o.sigma_t;
  m.rotation_std = o.sigma_r;
  if (!(m.translation_std >= 0.0) || !(m.rotation_std >= 0.0))
    throw PreconditionError("invalid_argument", "noise sigmas must be >= 0");
  return m;
}

TaskSpec spec_of(const Options& o) {
  TaskSpec spec;
  spec.target_category = o.target;
  spec.camera.fov = o.fov;
  spec.validate();
  return spec;
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

// Commands --------------------------------------------------------------

void cmd_gen_scenes(const Options& o, Manifest& m, std::ostream& out) {
  const AssetCatalog catalog = o.catalog.empty() ? default_catalog() : read_catalog(o.catalog);
  if (!o.catalog.empty()) m.input(o.catalog);
  const SplitSizes sizes = parse_splits(o.splits);
  ensure_dir(o.out);
  m.seed("corpus", o.seed);
  const Corpus corpus = generate_corpus(catalog, sizes, o.seed);
  save_corpus(corpus, o.out);
  if (!o.catalog.empty()) open_out(fs::path(o.out) / "catalog.json") << catalog_to_json(catalog).dump(2) << '\n';
  m.output(o.out + "/corpus.json");
  m.output(o.out + "/scenes");
  out << "generated " << corpus.scenes.size() << " scenes";
  for (const auto& sp : corpus.splits) out << ' ' << to_string(sp.name) << '=' << sp.scene_ids.size();
  out << '\n';
}

void write_heatmap(const fs::path& path, const Heatmap& h, std::size_t scenes) {
  auto os = open_out(path);
  os << "# scenes=" << scenes << '\n' << "col\trow\tx\ty\tfrequency\n";
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols; ++c)
      os << c << '\t' << r << '\t' << (c + 0.5) * h.resolution << '\t' << (r + 0.5) * h.resolution << '\t'
         << h.at(c, r) << '\n';
}

void cmd_stats(const Options& o, Manifest& m, std::ostream& out) {
  const LoadedCorpus lc = read_corpus(o.corpus, m);
  const auto scenes = select_scenes(lc.corpus, o.split, o.max_scenes);
  if (o.samples < 1) throw PreconditionError("invalid_argument", "--samples must be >= 1");
  ensure_dir(o.out);
  const fs::path dir(o.out);

  const SceneStats st = scene_stats(scenes, lc.catalog);
  {
    auto os = open_out(dir / "categories.tsv");
    os << "# scenes=" << st.scene_count << " objects=" << st.object_count << '\n' << "kind\tcategory\tcount\n";
    for (const auto& [k, v] : st.object_category_counts)
      os << (lc.catalog.is_target(k) ? "target" : "object") << '\t' << k << '\t' << v << '\n';
    for (const auto& [k, v] : st.furniture_category_counts) os << "furniture\t" << k << '\t' << v << '\n';
  }
  write_heatmap(dir / "heatmap_targets.tsv", st.target_objects, st.scene_count);
  write_heatmap(dir / "heatmap_objects.tsv", st.background_objects, st.scene_count);
  write_heatmap(dir / "heatmap_furniture.tsv", st.furniture, st.scene_count);
  write_heatmap(dir / "heatmap_walls.tsv", st.walls, st.scene_count);

  const TaskSpec spec = spec_of(o);
  const std::uint64_t vis_seed = mix_seed(o.seed, 1);
  const std::uint64_t path_seed = mix_seed(o.seed, 2);
  m.seed("visible_objects", vis_seed);
  m.seed("path_actions", path_seed);
  const VisibleHistogram vh =
      visible_object_histogram(scenes, spec.camera, spec.visibility_distance, o.samples, vis_seed);
  {
    auto os = open_out(dir / "visible_objects.tsv");
    os << "# samples=" << vh.samples << '\n' << "visible\tposes\tfraction\n";
    for (const auto& [k, v] : vh.counts)
      os << k << '\t' << v << '\t' << static_cast<double>(v) / static_cast<double>(vh.samples) << '\n';
  }
  const PathHistogram ph = path_histogram(scenes, lc.catalog.target_categories(), o.samples, path_seed, spec);
  {
    auto os = open_out(dir / "path_actions.tsv");
    os << "# samples=" << ph.samples << " unreachable=" << ph.unreachable << '\n' << "moves\trotations\tpairs\n";
    for (const auto& [k, v] : ph.counts) os << k.first << '\t' << k.second << '\t' << v << '\n';
  }
  for (const char* f : {"categories.tsv", "heatmap_targets.tsv", "heatmap_objects.tsv", "heatmap_furniture.tsv",
                        "heatmap_walls.tsv", "visible_objects.tsv", "path_actions.tsv"})
    m.output((dir / f).string());
  out << "scenes " << st.scene_count << ", objects " << st.object_count << ", visibility samples " << vh.samples
      << ", path samples " << ph.samples << " (" << ph.unreachable << " unreachable)\n";
}

void cmd_train(const Options& o, Manifest& m, std::ostream& out) {
  const LoadedCorpus lc = read_corpus(o.corpus, m);
  const auto scenes = select_scenes(lc.corpus, o.split.empty() ? to_string(SplitName::train) : o.split, o.max_scenes);
  TrainConfig cfg;
  cfg.workers = o.workers;
  cfg.episodes = o.episodes > 0 ? o.episodes : cfg.episodes;
  cfg.seed = o.seed;
  cfg.learning_rate = o.lr;
  cfg.blind = o.blind;
  cfg.targets = split_list(o.targets);
  cfg.validate();
  ensure_dir(o.out);
  m.seed("train", cfg.seed);
  const TrainResult res = train_actor_critic(cfg, scenes, spec_of(o), noise_of(o));
  const fs::path dir(o.out);
  write_file(dir / "policy.ckpt", [&](std::ostream& os) { save_checkpoint(os, *res.policy); });
  write_file(dir / "training_log.ndjson", [&](std::ostream& os) { res.log.write(os); });
  m.output((dir / "policy.ckpt").string());
  m.output((dir / "training_log.ndjson").string());
  out << "trained " << cfg.episodes << " episodes on " << scenes.size() << " scenes, " << res.log.updates
      << " updates";
  if (!res.log.windows.empty()) {
    const auto& w = res.log.windows.back();
    out << ", last window success " << percent(100.0 * w.success_rate) << "% return " << w.mean_return;
  }
  out << '\n';
}

std::unique_ptr<Agent> make_agent(const Options& o, TaskSpec& spec) {
  if (!o.checkpoint.empty() || o.agent == "checkpoint") {
    if (o.checkpoint.empty()) throw PreconditionError("invalid_argument", "--agent checkpoint needs --checkpoint");
    std::ifstream is(o.checkpoint);
    if (!is) throw PreconditionError("missing_file", "cannot read " + o.checkpoint);
    auto policy = std::make_shared<const ActorCriticPolicy>(load_checkpoint(is));
    spec.camera.ray_count = policy->encoder().ray_count();
    spec.action_space = policy->action_space();
    return policy_agent(policy);
  }
  if (o.agent == "random") return policy_agent(std::shared_ptr<const Policy>(random_policy(spec.action_space)));
  if (o.agent == "instant_done")
    return policy_agent(std::shared_ptr<const Policy>(instant_done_policy(spec.action_space)));
  if (o.agent == "oracle") return oracle_agent();
  throw PreconditionError("invalid_argument", "unknown agent: " + o.agent);
}

void cmd_eval(const Options& o, Manifest& m, std::ostream& out) {
  const LoadedCorpus lc = read_corpus(o.corpus, m);
  const auto scenes = select_scenes(lc.corpus, o.split.empty() ? to_string(SplitName::test_dev) : o.split, o.max_scenes);
  TaskSpec spec = spec_of(o);
  const auto agent = make_agent(o, spec);
  if (!o.checkpoint.empty()) m.input(o.checkpoint);
  const int reps = o.episodes > 0 ? static_cast<int>(o.episodes) : 1;
  const std::uint64_t start_seed = mix_seed(o.seed, 11);
  const std::uint64_t episode_seed = mix_seed(o.seed, 12);
  m.seed("starts", start_seed);
  m.seed("episodes", episode_seed);
  const auto starts = make_eval_starts(scenes, spec, o.starts_per_scene, start_seed);
  std::vector<EpisodeState> episodes;
  const auto results =
      evaluate(*agent, starts, spec, noise_of(o), reps, episode_seed, std::max(1, o.workers),
               o.trajectories ? &episodes : nullptr);

  ensure_dir(o.out);
  const fs::path dir(o.out);
  write_file(dir / "results.ndjson", [&](std::ostream& os) { write_results(os, results); });
  const BenchmarkReport report = benchmark_report(results);
  open_out(dir / "report.tsv") << report.to_tsv();
  open_out(dir / "report.txt") << report.to_text();
  m.output((dir / "results.ndjson").string());
  m.output((dir / "report.tsv").string());
  m.output((dir / "report.txt").string());
  if (o.trajectories) {
    ensure_dir((dir / "trajectories").string());
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%05zu.traj", i);
      write_file(dir / "trajectories" / name,
                 [&](std::ostream& os) { write_trajectory(os, trajectory_of(episodes[i])); });
    }
    m.output((dir / "trajectories").string());
  }
  out << agent->name() << " on " << scenes.size() << " scenes, " << results.size() << " episodes\n"
      << report.to_text();
}

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void cmd_serve(const Options& o, Manifest& m, std::ostream& out) {
  const LoadedCorpus lc = read_corpus(o.corpus, m);
  std::vector<const Scene*> scenes;
  if (!o.scene.empty()) scenes.push_back(&lc.corpus.scene(o.scene));
  else scenes = select_scenes(lc.corpus, o.split.empty() ? to_string(SplitName::test_dev) : o.split, o.max_scenes);
  if (o.envs < 1) throw PreconditionError("invalid_argument", "--envs must be >= 1");
  const TaskSpec spec = spec_of(o);
  std::vector<EnvSetup> envs;
  for (int i = 0; i < o.envs; ++i) {
    EnvSetup e;
    e.env_id = "env-" + std::to_string(i);
    e.scene = *scenes[static_cast<std::size_t>(i) % scenes.size()];
    e.spec = spec;
    e.noise = noise_of(o);
    e.seed = mix_seed(o.seed, static_cast<std::uint64_t>(i));
    m.seed(e.env_id, e.seed);
    envs.push_back(std::move(e));
  }
  ensure_dir(o.out);
  ServiceOptions so;
  so.results_path = (fs::path(o.out) / "results.ndjson").string();
  so.upload_dir = (fs::path(o.out) / "uploads").string();
  ensure_dir(so.upload_dir);
  m.output(so.results_path);
  m.output(so.upload_dir);
  EnvService service(std::move(envs), so);
  HttpServer server(service, std::max(4, o.workers));
  const int port = server.bind(o.host, o.port);
  write_file(fs::path(o.out) / "endpoint.json",
             [&](std::ostream& os) { os << json{{"host", o.host}, {"port", port}}.dump() << '\n'; });
  m.output((fs::path(o.out) / "endpoint.json").string());
  m.write();
  g_stop = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  server.start();
  out << "listening on " << o.host << ':' << port << " with " << o.envs << " environment(s)" << std::endl;
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(o.duration);
  while (!g_stop && (o.duration <= 0.0 || std::chrono::steady_clock::now() < until))
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  out << "served " << service.results().size() << " finished episode(s)\n";
}

void cmd_replay(const Options& o, Manifest& m, std::ostream& out) {
  if (o.trajectory.empty()) throw PreconditionError("invalid_argument", "--trajectory is required");
  const LoadedCorpus lc = read_corpus(o.corpus, m);
  std::ifstream is(o.trajectory);
  if (!is) throw PreconditionError("missing_file", "cannot read " + o.trajectory);
  m.input(o.trajectory);
  const TrajectoryFile traj = read_trajectory(is);
  const Scene& scene = lc.corpus.scene(traj.scene_id);
  TaskSpec spec = spec_of(o);
  spec.target_category = traj.target;

  std::vector<AgentState> taken{traj.start};
  for (const auto& s : traj.steps)
    if (s.action != Action::Done) taken.push_back(s.state);
  const NavGraph graph(scene, spec);
  std::vector<AgentState> optimal;
  std::string note;
  try {
    optimal = shortest_path_poses(graph, scene, traj.start);
  } catch (const PreconditionError& e) {
    if (e.code() != "unreachable_target") throw;
    note = "unreachable";
  }
  auto length = [](const std::vector<AgentState>& path) {
    double l = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) l += distance(path[i - 1].position, path[i].position);
    return l;
  };
  const bool same = taken.size() == optimal.size() &&
                    std::equal(taken.begin(), taken.end(), optimal.begin(), [](const auto& a, const auto& b) {
                      return distance(a.position, b.position) < 1e-9 && std::abs(a.heading - b.heading) < 1e-9;
                    });

  ensure_dir(o.out);
  const fs::path dir(o.out);
  {
    auto os = open_out(dir / "overlay.tsv");
    os << "# scene=" << traj.scene_id << " target=" << traj.target << " taken_poses=" << taken.size()
       << " shortest_poses=" << optimal.size() << '\n'
       << "series\tindex\tx\ty\theading\n";
    auto rows = [&](const char* series, const std::vector<AgentState>& path) {
      for (std::size_t i = 0; i < path.size(); ++i)
        os << series << '\t' << i << '\t' << path[i].position.x << '\t' << path[i].position.y << '\t'
           << path[i].heading << '\n';
    };
    rows("taken", taken);
    rows("shortest", optimal);
  }
  const json summary{{"scene", traj.scene_id},
                     {"target", traj.target},
                     {"outcome", to_string(traj.outcome)},
                     {"steps", traj.steps.size()},
                     {"shortest_poses", optimal.empty() ? json(nullptr) : json(optimal.size())},
                     {"taken_path_m", length(taken)},
                     {"shortest_path_m", optimal.empty() ? json(nullptr) : json(length(optimal))},
                     {"taken_equals_shortest", same},
                     {"note", note}};
  open_out(dir / "summary.json") << summary.dump(2) << '\n';
  m.output((dir / "overlay.tsv").string());
  m.output((dir / "summary.json").string());
  out << "replayed " << traj.steps.size() << " steps; shortest path "
      << (optimal.empty() ? std::string("unreachable") : std::to_string(optimal.size()) + " poses")
      << (same ? "; taken path equals shortest path" : "") << '\n';
}

void emit_error(std::ostream& err, const std::string& code, const std::string& message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"navth: scenes, statistics, training, evaluation, serving and replay", "navth"};
  app.set_version_flag("--version", NAVTH_VERSION);
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags win");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", o.seed, "Base seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--split", o.split, "Scene split (train, val, test-dev, test-standard, all)");
  app.add_option("--fov", o.fov, "Horizontal field of view, degrees");
  app.add_option("--noise-sigma-t", o.sigma_t, "Translation noise std, metres");
  app.add_option("--noise-sigma-r", o.sigma_r, "Rotation noise std, degrees");
  app.add_flag("--noise-free", o.noise_free, "Disable motion noise");
  app.add_option("--workers", o.workers, "Worker threads");
  app.add_option("--episodes", o.episodes, "Training episodes, or evaluation episodes per start");
  app.add_option("--target", o.target, "Target category");

  auto* gen = app.add_subcommand("gen-scenes", "Generate a scene corpus");
  gen->add_option("--splits", o.splits, "train+val,test_dev,test_standard scene counts");
  gen->add_option("--catalog", o.catalog, "Asset catalog JSON (default: built-in)");

  auto corpus_opts = [&](CLI::App* sub) {
    sub->add_option("--corpus", o.corpus, "Corpus directory")->required();
    sub->add_option("--max-scenes", o.max_scenes, "Use at most this many scenes of the split (0 = all)");
  };
  auto* stats = app.add_subcommand("stats", "Corpus statistics as TSV tables");
  corpus_opts(stats);
  stats->add_option("--samples", o.samples, "Sampled poses per scene");

  auto* train = app.add_subcommand("train", "Train an actor-critic policy");
  corpus_opts(train);
  train->add_option("--lr", o.lr, "Learning rate");
  train->add_flag("--blind", o.blind, "Zero all perception features");
  train->add_option("--targets", o.targets, "Comma-separated targets sampled per episode");

  auto* eval = app.add_subcommand("eval", "Evaluate an agent per difficulty bucket");
  corpus_opts(eval);
  eval->add_option("--agent", o.agent, "random, instant_done, oracle or checkpoint");
  eval->add_option("--checkpoint", o.checkpoint, "Policy checkpoint");
  eval->add_option("--starts-per-scene", o.starts_per_scene, "Sampled start poses per scene");
  eval->add_flag("--trajectories", o.trajectories, "Write one navth-traj/1 file per episode");

  auto* serve = app.add_subcommand("serve", "Serve environments over HTTP");
  corpus_opts(serve);
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port (0 = any free port)");
  serve->add_option("--envs", o.envs, "Number of environments");
  serve->add_option("--scene", o.scene, "Serve this scene id only");
  serve->add_option("--duration", o.duration, "Stop after this many seconds (0 = until interrupted)");

  auto* replay = app.add_subcommand("replay", "Trajectory vs shortest path overlay");
  corpus_opts(replay);
  replay->add_option("--trajectory", o.trajectory, "navth-traj/1 file")->required();

  for (auto* sub : {gen, stats, train, eval, serve, replay}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << NAVTH_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Manifest manifest(sub->get_name(), o, args);
  try {
    if (sub == gen) cmd_gen_scenes(o, manifest, out);
    else if (sub == stats) cmd_stats(o, manifest, out);
    else if (sub == train) cmd_train(o, manifest, out);
    else if (sub == eval) cmd_eval(o, manifest, out);
    else if (sub == serve) cmd_serve(o, manifest, out);
    else cmd_replay(o, manifest, out);
    manifest.write();
  } catch (const Error& e) {
    emit_error(err, e.code(), e.what());
    return 1;
  } catch (const json::exception& e) {
    emit_error(err, "schema_violation", e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace navth::cli
