#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "navth/agents.hpp"
#include "navth/error.hpp"

namespace navth {

using json = nlohmann::json;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw PreconditionError("invalid_config", "learning_rate must be > 0");
  if (workers < 1) throw PreconditionError("invalid_config", "workers must be >= 1");
  if (episodes < 1) throw PreconditionError("invalid_config", "episodes must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("invalid_config", "gamma must lie in (0, 1]");
  if (entropy_weight < 0.0 || value_loss_weight < 0.0)
    throw PreconditionError("invalid_config", "loss weights must be >= 0");
  if (n_steps < 1) throw PreconditionError("invalid_config", "n_steps must be >= 1");
  if (log_window < 1) throw PreconditionError("invalid_config", "log_window must be >= 1");
}

void TrainingLog::write(std::ostream& os) const {
  for (const auto& e : episodes)
    os << json{{"episode", e.episode},
               {"return", e.episode_return},
               {"success", e.success},
               {"length", e.length},
               {"worker", e.worker}}
              .dump()
       << '\n';
  for (const auto& w : windows)
    os << json{{"window_end", w.end_episode}, {"success_rate", w.success_rate}, {"mean_return", w.mean_return}}.dump()
       << '\n';
}

namespace {

struct Worker {
  int id = 0;
  Rng rng;
  bool running = false;
  EpisodeState ep;
  Observation obs;
  std::vector<double> memory;
  double adv_mean = 0.0;
};

struct SegmentOutcome {
  std::vector<double> grad;
  double loss = 0.0;
  std::vector<EpisodeLog> finished;  // episode index left for the updater
};

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const std::vector<const Scene*>& scenes, const TaskSpec& spec,
          const MotionNoiseModel& noise)
      : cfg_(cfg), scenes_(scenes), spec_(spec), noise_(noise) {
    targets_ = cfg.targets.empty() ? std::vector<std::string>{spec.target_category} : cfg.targets;
    actions_ = actions_of(spec.action_space);
  }

  SegmentOutcome collect(const ActorCriticPolicy& policy, Worker& w) const {
    if (!w.running) begin_episode(policy, w);
    std::vector<StepCache> caches;
    std::vector<int> picks;
    std::vector<double> rewards;
    caches.reserve(static_cast<std::size_t>(cfg_.n_steps));
    SegmentOutcome out;
    bool terminated = false;
    for (int t = 0; t < cfg_.n_steps; ++t) {
      caches.emplace_back();
      StepCache& c = caches.back();
      policy.step(w.obs, w.memory, c);
      const int a = sample(c.log_probs, w.rng);
      picks.push_back(a);
      const auto r = episode_step(w.ep, actions_[static_cast<std::size_t>(a)], noise_, w.rng);
      rewards.push_back(r.reward);
      w.obs = r.observation;
      w.memory = c.h;
      if (r.terminated) {
        terminated = true;
        out.finished.push_back({0, w.ep.episode_return(), w.ep.outcome == Outcome::success, w.ep.t, w.id});
        w.running = false;
        break;
      }
    }
    double bootstrap = 0.0;
    if (!terminated) {
      StepCache next;
      policy.step(w.obs, w.memory, next);
      bootstrap = next.value;
    }
    const auto returns = discounted_returns(rewards, bootstrap, cfg_.gamma);
    std::vector<double> adv(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) adv[i] = returns[i] - caches[i].value;
    if (cfg_.advantage_centering > 0.0) {
      for (double& a : adv) {
        const double centred = a - w.adv_mean;
        w.adv_mean += cfg_.advantage_centering * (a - w.adv_mean);
        a = centred;
      }
    }
    out.grad.assign(policy.network().size(), 0.0);
    out.loss = segment_backward(policy.network(), caches, picks, returns, adv,
                                {cfg_.value_loss_weight, cfg_.entropy_weight}, out.grad);
    bool finite = std::isfinite(out.loss);
    for (std::size_t i = 0; finite && i < out.grad.size(); ++i) finite = std::isfinite(out.grad[i]);
    if (!finite) dump_and_abort(w, caches, picks, rewards, returns, out.loss);
    return out;
  }

  const TrainConfig& config() const { return cfg_; }

 private:
  void begin_episode(const ActorCriticPolicy& policy, Worker& w) const {
    const Scene& scene = *scenes_[w.rng.below(scenes_.size())];
    TaskSpec task = spec_;
    task.target_category = targets_[w.rng.below(targets_.size())];
    w.ep = reset(scene, task, w.rng);
    w.obs = episode_observation(w.ep, false);
    w.memory.assign(policy.memory_size(), 0.0);
    w.running = true;
  }

  static int sample(const std::vector<double>& log_probs, Rng& rng) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < log_probs.size(); ++i) {
      const double p = std::exp(log_probs[i]);
      if (u < p) return static_cast<int>(i);
      u -= p;
    }
    return static_cast<int>(log_probs.size()) - 1;
  }

  [[noreturn]] void dump_and_abort(const Worker& w, const std::vector<StepCache>& caches, const std::vector<int>& picks,
                                   const std::vector<double>& rewards, const std::vector<double>& returns,
                                   double loss) const {
    json dump;
    dump["worker"] = w.id;
    dump["scene"] = w.ep.scene ? w.ep.scene->id : "";
    dump["target"] = w.ep.spec.target_category;
    dump["t"] = w.ep.t;
    dump["loss"] = std::isfinite(loss) ? json(loss) : json(std::to_string(loss));
    dump["actions"] = picks;
    dump["rewards"] = rewards;
    dump["returns"] = returns;
    json values = json::array(), logp = json::array();
    for (const auto& c : caches) {
      values.push_back(std::isfinite(c.value) ? json(c.value) : json(std::to_string(c.value)));
      json row = json::array();
      for (double v : c.log_probs) row.push_back(std::isfinite(v) ? json(v) : json(std::to_string(v)));
      logp.push_back(row);
    }
    dump["values"] = values;
    dump["log_probs"] = logp;
    if (!cfg_.dump_path.empty()) std::ofstream(cfg_.dump_path) << dump.dump(2) << '\n';
    throw Error("non_finite_loss", "non-finite loss or gradient; state: " + dump.dump());
  }

  TrainConfig cfg_;
  std::vector<const Scene*> scenes_;
  TaskSpec spec_;
  MotionNoiseModel noise_;
  std::vector<std::string> targets_;
  std::vector<Action> actions_;
};

class Recorder {
 public:
  Recorder(const TrainConfig& cfg, TrainingLog& log, const std::function<void(const EpisodeLog&)>& cb)
      : cfg_(cfg), log_(log), cb_(cb) {}

  bool done() const { return static_cast<long>(log_.episodes.size()) >= cfg_.episodes; }

  void record(std::vector<EpisodeLog>& finished) {
    for (auto& e : finished) {
      if (done()) return;
      e.episode = static_cast<long>(log_.episodes.size());
      log_.episodes.push_back(e);
      if (cb_) cb_(e);
      const long n = static_cast<long>(log_.episodes.size());
      if (n % cfg_.log_window == 0) {
        WindowLog wl{n, 0.0, 0.0};
        for (long i = n - cfg_.log_window; i < n; ++i) {
          wl.success_rate += log_.episodes[static_cast<std::size_t>(i)].success;
          wl.mean_return += log_.episodes[static_cast<std::size_t>(i)].episode_return;
        }
        wl.success_rate /= cfg_.log_window;
        wl.mean_return /= cfg_.log_window;
        log_.windows.push_back(wl);
      }
    }
  }

 private:
  const TrainConfig& cfg_;
  TrainingLog& log_;
  const std::function<void(const EpisodeLog&)>& cb_;
};

}  // namespace

TrainResult train_actor_critic(const TrainConfig& config, const std::vector<const Scene*>& scenes,
                               const TaskSpec& spec, const MotionNoiseModel& noise,
                               const std::function<void(const EpisodeLog&)>& on_episode) {
  config.validate();
  spec.validate();
  if (scenes.empty()) throw PreconditionError("empty_scenes", "training needs at least one scene");

  auto master = std::make_unique<ActorCriticPolicy>(
      FeatureEncoder::for_catalog(default_catalog(), spec.camera.ray_count), spec.action_space, config.blind,
      config.seed, config.embed_dim, config.dense_dim, config.hidden_dim);
  {
    const auto acts = actions_of(spec.action_space);
    const auto done = static_cast<std::size_t>(std::find(acts.begin(), acts.end(), Action::Done) - acts.begin());
    Network& net = master->network();
    net.params()[net.tensor("policy.bias").offset + done] = config.initial_done_logit;
  }
  for (const auto& t : config.targets) master->encoder().target_index(t);
  master->encoder().target_index(spec.target_category);

  const Trainer trainer(config, scenes, spec, noise);
  Adam adam(config.learning_rate);
  TrainResult result;
  Recorder recorder(config, result.log, on_episode);

  auto apply = [&](SegmentOutcome& seg) {
    clip_gradient(seg.grad, config.max_grad_norm);
    adam.step(master->network().params(), seg.grad);
    ++result.log.updates;
    recorder.record(seg.finished);
  };

  if (config.workers == 1) {
    Worker w;
    w.rng.reseed(mix_seed(config.seed, 1));
    while (!recorder.done()) {
      SegmentOutcome seg = trainer.collect(*master, w);
      apply(seg);
    }
    result.policy = std::move(master);
    return result;
  }

  // Parallel collection: workers read immutable snapshots and push gradients
  // into a bounded channel drained by this thread.
  std::mutex snap_mu;
  std::shared_ptr<const ActorCriticPolicy> snapshot = std::make_shared<ActorCriticPolicy>(*master);
  std::mutex q_mu;
  std::condition_variable q_cv;
  std::deque<SegmentOutcome> queue;
  const std::size_t capacity = static_cast<std::size_t>(config.workers) * 2;
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  std::vector<std::thread> threads;
  for (int i = 0; i < config.workers; ++i)
    threads.emplace_back([&, i] {
      Worker w;
      w.id = i;
      w.rng.reseed(mix_seed(config.seed, static_cast<std::uint64_t>(i) + 1));
      try {
        while (!stop.load()) {
          std::shared_ptr<const ActorCriticPolicy> params;
          {
            std::lock_guard lock(snap_mu);
            params = snapshot;
          }
          SegmentOutcome seg = trainer.collect(*params, w);
          std::unique_lock lock(q_mu);
          q_cv.wait(lock, [&] { return stop.load() || queue.size() < capacity; });
          if (stop.load()) break;
          queue.push_back(std::move(seg));
          q_cv.notify_all();
        }
      } catch (...) {
        std::lock_guard lock(q_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
        q_cv.notify_all();
      }
    });

  while (true) {
    SegmentOutcome seg;
    {
      std::unique_lock lock(q_mu);
      q_cv.wait(lock, [&] { return !queue.empty() || stop.load(); });
      if (queue.empty()) break;
      seg = std::move(queue.front());
      queue.pop_front();
      q_cv.notify_all();
    }
    apply(seg);
    {
      std::lock_guard lock(snap_mu);
      snapshot = std::make_shared<ActorCriticPolicy>(*master);
    }
    if (recorder.done()) {
      std::lock_guard lock(q_mu);
      stop = true;
      q_cv.notify_all();
      break;
    }
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  result.policy = std::move(master);
  return result;
}

}  // namespace navth
