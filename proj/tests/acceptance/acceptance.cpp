// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by name.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "navth/agents.hpp"
#include "navth/io.hpp"
#include "navth/pathing.hpp"
#include "server_harness.hpp"
#include "test_support.hpp"

using namespace navth;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<const Scene*> ptrs(const std::vector<Scene>& v) {
  std::vector<const Scene*> out;
  for (const auto& s : v) out.push_back(&s);
  return out;
}

std::vector<Scene> layout_scenes(const std::vector<std::string>& layouts, int count, std::uint64_t seed) {
  std::vector<Scene> out;
  for (int i = 0; i < count; ++i)
    out.push_back(generate_scene(default_catalog(), layouts[static_cast<std::size_t>(i) % layouts.size()],
                                 seed + static_cast<std::uint64_t>(i)));
  return out;
}

// Ten training scenes from the train/val pool and two held-out test-dev scenes.
const std::vector<Scene>& train_scenes() {
  static const auto s = layout_scenes(default_catalog().splits.train_val, 10, 1000);
  return s;
}
const std::vector<Scene>& heldout_scenes() {
  static const auto s = layout_scenes(default_catalog().splits.test_dev, 2, 2000);
  return s;
}

// Easy-bucket success in percent.
double easy_success(const std::vector<EpisodeResult>& results) {
  return benchmark_report(results).row(DifficultyBucket::easy).success_pct;
}

std::size_t easy_episodes(const std::vector<EpisodeResult>& results) {
  return benchmark_report(results).row(DifficultyBucket::easy).episodes;
}

// Criteria ------------------------------------------------------------------

Verdict noise_fidelity() {
  const auto t0 = Clock::now();
  Scene open;
  open.width = 1e6;
  open.depth = 20;
  Rng rng(77);
  const auto noise = MotionNoiseModel::robot();
  const int n = 100000;
  double sum = 0, sq = 0, rsum = 0, rsq = 0;
  for (int i = 0; i < n; ++i) {
    const double e = step(open, {{10, 10}, 0, 0}, Action::MoveAhead, noise, rng).state.position.x - 10.0 - kStepSize;
    sum += e;
    sq += e * e;
    const double r = angle_difference(step(open, {{10, 10}, 90, 0}, Action::RotateRight, noise, rng).state.heading, 45.0);
    rsum += r;
    rsq += r * r;
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  const double rmean = rsum / n, rsd = std::sqrt(rsq / n - rmean * rmean);
  const double secs = seconds_since(t0);
  const bool ok = std::abs(mean - 0.001) <= 0.0002 && std::abs(sd - 0.005) <= 0.0005 && std::abs(rmean) <= 0.02 &&
                  std::abs(rsd - 0.5) <= 0.05 && secs < 10.0;
  return {ok, fmt("translation mean %.5f m std %.5f m; rotation mean %.4f deg std %.4f deg; %.2f s", mean, sd, rmean,
                  rsd, secs)};
}

Verdict spl_arithmetic() {
  auto ep = [](int s, double l, double p) {
    EpisodeResult r;
    r.success = s;
    r.shortest_path_m = l;
    r.path_m = p;
    return r;
  };
  bool ok = spl({ep(1, 4, 5)}) == 0.8 && spl({ep(0, 4, 5)}) == 0.0 && spl({ep(1, 4, 4)}) == 1.0;
  Rng rng(31);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<EpisodeResult> rs;
    const int n = 1 + static_cast<int>(rng.below(50));
    for (int i = 0; i < n; ++i) {
      const double l = rng.uniform(0, 12);
      rs.push_back(ep(rng.bernoulli(0.5), l, l + rng.uniform(0, 12)));
    }
    if (spl(rs) > success_rate(rs)) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, fmt("hand-computed cases %s; SPL > success rate in %d of 1000 random sets", ok ? "exact" : "differ",
                  violations)};
}

Verdict oracle_equivalence() {
  const auto& cat = default_catalog();
  const auto targets = cat.target_categories();
  std::vector<Scene> scenes;
  for (int i = 0; i < 100; ++i)
    scenes.push_back(generate_scene(cat, cat.layouts[static_cast<std::size_t>(i) % cat.layouts.size()].id,
                                    5000 + static_cast<std::uint64_t>(i)));
  long compared = 0, mismatched = 0;
  std::vector<EvalStart> starts;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& s = scenes[i];
    const TaskSpec spec = test_support::spec_for(targets[i % targets.size()]);
    const NavGraph graph(s, spec);
    const auto cells = navigable_positions(s);
    Rng rng(i);
    for (int k = 0; k < 5; ++k) {
      const AgentState start{cells[rng.below(cells.size())], 45.0 * static_cast<double>(rng.below(8)), 0.0};
      const double l = shortest_path_length_m(graph, start.position);
      const double bfs = test_support::bfs_length_oracle(s, start.position, spec);
      ++compared;
      if (!(bfs < 0 ? l == kInf : l == bfs)) ++mismatched;
      if (l != kInf) starts.push_back({&s, spec.target_category, start, l, DifficultyBucket::easy});
    }
  }
  const auto results = evaluate(*oracle_agent(), starts, TaskSpec{}, MotionNoiseModel::none(), 1, 3);
  const double sr = success_rate(results), v = spl(results);
  const bool ok = mismatched == 0 && sr == 1.0 && v == 1.0;
  return {ok, fmt("%ld starts on 100 scenes, %ld length mismatches; oracle follower success %.4f SPL %.17g over %zu "
                  "episodes",
                  compared, mismatched, sr, v, results.size())};
}

Verdict instant_done() {
  TaskSpec spec;
  std::vector<EvalStart> starts;
  long trivial = 0;
  for (const Scene& s : heldout_scenes()) {
    std::vector<AgentState> poses;
    for (Vec2 p : navigable_positions(s))
      for (int h = 0; h < 8; ++h) poses.push_back({p, 45.0 * h, 0.0});
    const BucketedStarts b = bucket_difficulty(s, poses, spec);
    for (std::size_t i = 0; i < b.starts.size(); ++i) {
      starts.push_back({&s, spec.target_category, b.starts[i], b.shortest_path_m[i], b.buckets[i]});
      if (check_success(s, b.starts[i], spec)) ++trivial;
    }
  }
  const auto agent = policy_agent(std::shared_ptr<const Policy>(instant_done_policy()));
  const auto results = evaluate(*agent, starts, spec, MotionNoiseModel::robot(), 1, 5);
  const auto report = benchmark_report(results);
  long successes = 0;
  for (const auto& r : results) successes += r.success;
  bool ok = successes == trivial;
  std::string lengths;
  for (const auto& row : report.rows) {
    ok = ok && row.episodes > 0 && row.mean_episode_length == 1.0;
    lengths += fmt(" %s=%.2f", to_string(row.bucket), row.mean_episode_length);
  }
  return {ok, fmt("episode length%s; success %ld/%zu = %.4f%%, trivial spawn poses %ld/%zu", lengths.c_str(),
                  successes, results.size(), 100.0 * successes / results.size(), trivial, starts.size())};
}

Verdict random_floor() {
  const auto t0 = Clock::now();
  const TaskSpec spec;
  const auto starts = make_eval_starts(ptrs(heldout_scenes()), spec, 300, 41);
  const auto agent = policy_agent(std::shared_ptr<const Policy>(random_policy()));
  const auto results = evaluate(*agent, starts, spec, MotionNoiseModel::robot(), 2, 43);
  const BucketRow hard = benchmark_report(results).row(DifficultyBucket::hard);
  const double secs = seconds_since(t0);
  const bool ok = hard.episodes >= 200 && hard.success_pct <= 2.0 && secs < 120.0;
  return {ok, fmt("hard bucket success %.2f%% over %zu episodes; %.1f s", hard.success_pct, hard.episodes, secs)};
}

Verdict stratification() {
  std::vector<double> lengths(100);
  std::iota(lengths.begin(), lengths.end(), 1.0);
  Rng rng(3);
  for (std::size_t i = lengths.size() - 1; i > 0; --i) std::swap(lengths[i], lengths[rng.below(i + 1)]);
  for (auto& l : lengths) l *= kStepSize;
  auto sizes = [](const std::vector<DifficultyBucket>& b) {
    std::array<int, 3> n{};
    for (auto x : b) ++n[static_cast<std::size_t>(x)];
    return n;
  };
  const auto distinct = sizes(bucket_lengths(lengths));
  bool ok = distinct == std::array<int, 3>{20, 40, 40};

  // Starts from a generated scene: ties may move whole tie groups across a
  // boundary, never split them.
  const Scene& s = heldout_scenes()[0];
  const auto starts = make_eval_starts({&s}, TaskSpec{}, 100, 9);
  std::map<double, std::set<DifficultyBucket>> by_length;
  std::vector<double> ls;
  for (const auto& st : starts) {
    by_length[st.shortest_path_m].insert(st.bucket);
    ls.push_back(st.shortest_path_m);
  }
  bool groups_whole = true;
  for (const auto& [l, b] : by_length) groups_whole = groups_whole && b.size() == 1;
  std::sort(ls.begin(), ls.end());
  std::array<int, 3> expect{};
  for (double l : ls) {
    const double pct = static_cast<double>(std::lower_bound(ls.begin(), ls.end(), l) - ls.begin() + 1) / ls.size();
    ++expect[l == ls.front() || pct <= 0.2 ? 0 : pct <= 0.6 ? 1 : 2];
  }
  std::array<int, 3> got{};
  for (const auto& st : starts) ++got[static_cast<std::size_t>(st.bucket)];
  ok = ok && groups_whole && got == expect;
  return {ok, fmt("distinct lengths: %d/%d/%d; scene starts: %d/%d/%d (rank oracle %d/%d/%d, %zu tie groups)",
                  distinct[0], distinct[1], distinct[2], got[0], got[1], got[2], expect[0], expect[1], expect[2],
                  by_length.size())};
}

TrainConfig acceptance_train_config(bool blind, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.workers = 1;
  cfg.episodes = 20000;
  cfg.blind = blind;
  cfg.seed = seed;
  cfg.log_window = 1000;
  return cfg;
}

Verdict learning_signal() {
  const auto t0 = Clock::now();
  const TaskSpec spec;
  const auto noise = MotionNoiseModel::robot();
  const auto train = ptrs(train_scenes());
  std::shared_ptr<const Policy> image(train_actor_critic(acceptance_train_config(false, 1), train, spec, noise).policy);
  std::shared_ptr<const Policy> blind(train_actor_critic(acceptance_train_config(true, 2), train, spec, noise).policy);
  const auto starts = make_eval_starts(ptrs(heldout_scenes()), spec, 300, 51);
  auto run = [&](std::shared_ptr<const Policy> p) {
    return evaluate(*policy_agent(std::move(p)), starts, spec, noise, 1, 53);
  };
  const auto ri = run(image), rb = run(blind), rr = run(std::shared_ptr<const Policy>(random_policy()));
  const double si = easy_success(ri), sb = easy_success(rb), sr = easy_success(rr);
  const double secs = seconds_since(t0);
  const bool ok = si >= sb + 20.0 && si >= sr + 30.0 && secs <= 7200.0;
  return {ok, fmt("easy success: actor-critic %.2f%%, blind %.2f%%, random %.2f%% over %zu easy episodes "
                  "(need +20 / +30 points); %.0f s",
                  si, sb, sr, easy_episodes(ri), secs)};
}

Verdict fov_mismatch() {
  TaskSpec wide;
  wide.camera.fov = 90.0;
  const auto noise = MotionNoiseModel::robot();
  std::shared_ptr<const Policy> policy(
      train_actor_critic(acceptance_train_config(false, 3), ptrs(train_scenes()), wide, noise).policy);
  const auto starts = make_eval_starts(ptrs(heldout_scenes()), TaskSpec{}, 300, 61);
  const auto r = fov_mismatch_experiment(policy, 90.0, 42.5, starts, wide, noise, 2, 63);
  const auto& m = r.matched.row(DifficultyBucket::easy);
  const auto& x = r.mismatched.row(DifficultyBucket::easy);
  const bool ok = m.episodes >= 200 && x.success_pct < m.success_pct;
  return {ok, fmt("easy success trained at 90: matched %.2f%%, evaluated at 42.5 %.2f%% over %zu episodes",
                  m.success_pct, x.success_pct, m.episodes)};
}

// Five-point central difference.
template <class F>
double derivative(double& param, double eps, F&& f) {
  const double keep = param;
  const double offs[4] = {eps, -eps, 2 * eps, -2 * eps};
  double v[4];
  for (int k = 0; k < 4; ++k) {
    param = keep + offs[k];
    v[k] = f();
  }
  param = keep;
  return (8 * (v[0] - v[1]) - (v[2] - v[3])) / (12 * eps);
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

Verdict gradient_check() {
  const Scene& s = train_scenes()[0];
  ActorCriticPolicy pol(FeatureEncoder::for_catalog(default_catalog(), 64), ActionSpace::four_action, false, 5);
  Network& net = pol.network();
  Rng rng(6);
  for (double& p : net.params()) p += rng.uniform(-0.05, 0.05);
  const TaskSpec spec;
  double worst = 0.0;
  long checked = 0, kinks = 0;
  // Frozen minibatch: three rollout segments scored with fixed returns and advantages.
  for (int b = 0; b < 3; ++b) {
    EpisodeState ep = reset(s, spec, rng);
    Segment seg;
    seg.h0.assign(pol.memory_size(), 0.0);
    for (double& h : seg.h0) h = rng.uniform(-0.3, 0.3);
    Observation obs = episode_observation(ep, false);
    for (int t = 0; t < 10 && !ep.terminated(); ++t) {
      seg.inputs.push_back(pol.features(obs));
      seg.targets.push_back(pol.encoder().target_index(obs.target));
      seg.actions.push_back(static_cast<int>(rng.below(3)));
      seg.returns.push_back(rng.uniform(-0.2, 2));
      seg.advantages.push_back(rng.uniform(-1, 1));
      obs = episode_step(ep, actions_of(spec.action_space)[static_cast<std::size_t>(seg.actions.back())], MotionNoiseModel::robot(), rng)
                .observation;
    }
    const LossWeights w{0.5, 0.01};
    std::vector<double> grad;
    segment_loss(net, seg, w, &grad);
    for (int k = 0; k < 300; ++k) {
      const std::size_t i = rng.below(net.size());
      const auto loss = [&] { return segment_loss(net, seg, w); };
      double fd = derivative(net.params()[i], 1e-4, loss);
      // A stencil straddling a ReLU kink is no derivative estimate; shrink it.
      if (const double fine = derivative(net.params()[i], 1e-6, loss); rel_error(fd, fine) > 1e-3) {
        fd = fine;
        ++kinks;
      }
      if (std::abs(grad[i]) < 1e-7 && std::abs(fd) < 1e-7) continue;
      worst = std::max(worst, rel_error(grad[i], fd));
      ++checked;
    }
  }
  const bool ok = checked > 0 && worst <= 1e-4;
  return {ok, fmt("worst relative error %.3g over %ld parameters (%ld stencils re-taken at a ReLU kink)", worst,
                  checked, kinks)};
}

Verdict mutual_exclusion() {
  const auto t0 = Clock::now();
  const auto rep = harness::lease_fuzz(16, 1000, 4, 91);
  std::string codes;
  for (const auto& [c, n] : rep.unexpected_codes) codes += fmt("; %ld x %s", n, c.c_str());
  const bool ok = rep.rounds >= 1000 && rep.grants > 0 && rep.double_holders == 0 && rep.foreign_accepted == 0 &&
                  rep.audit_violations == 0 && rep.unexpected_errors == 0;
  return {ok, fmt("%ld rounds by 16 clients: %ld grants, %ld busy, %ld steps; %ld double holders, %ld non-holder "
                  "steps accepted (%ld rejected), %zu audit violations in %zu events, %ld unexpected errors; %.1f s",
                  rep.rounds, rep.grants, rep.busy, rep.steps_accepted, rep.double_holders, rep.foreign_accepted,
                  rep.foreign_rejected, rep.audit_violations, rep.audit_events, rep.unexpected_errors,
                  seconds_since(t0)) +
                     codes};
}

Verdict transparency() {
  EnvSetup env;
  env.scene = heldout_scenes()[1];
  EnvService service({env});
  HttpServer server(service, 4);
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  RemoteEnvClient cli("127.0.0.1", port);
  cli.acquire(env.env_id);
  int identical = 0;
  long steps = 0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t seed = 700 + static_cast<std::uint64_t>(i);
    const auto actions = harness::scripted_actions(seed * 3, env.spec.max_steps);
    const auto local = harness::local_transcript(env, seed, actions);
    const auto remote = harness::remote_transcript(cli, seed, actions);
    identical += local == remote;
    steps += static_cast<long>(local.size()) - 2;
  }
  cli.release();
  server.stop();
  return {identical == 50, fmt("%d of 50 episodes identical (%ld steps)", identical, steps)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"noise_fidelity", noise_fidelity},
      {"spl_arithmetic", spl_arithmetic},
      {"oracle_equivalence", oracle_equivalence},
      {"instant_done", instant_done},
      {"random_floor", random_floor},
      {"stratification", stratification},
      {"learning_signal", learning_signal},
      {"fov_mismatch", fov_mismatch},
      {"gradient_check", gradient_check},
      {"mutual_exclusion", mutual_exclusion},
      {"transparency", transparency},
  };
  const std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
