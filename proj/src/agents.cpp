#include "navth/agents.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "navth/error.hpp"
#include "navth/pathing.hpp"

namespace navth {

using json = nlohmann::json;

FeatureEncoder::FeatureEncoder(int ray_count, std::vector<std::string> categories, std::vector<std::string> targets)
    : ray_count_(ray_count), categories_(std::move(categories)), targets_(std::move(targets)) {
  if (ray_count_ < 2) throw PreconditionError("invalid_encoder", "ray_count must be >= 2");
  if (targets_.empty()) throw PreconditionError("invalid_encoder", "encoder needs at least one target");
}

FeatureEncoder FeatureEncoder::for_catalog(const AssetCatalog& catalog, int ray_count) {
  std::vector<std::string> cats;
  for (const auto& c : catalog.object_categories) cats.push_back(c.name);
  return FeatureEncoder(ray_count, std::move(cats), catalog.target_categories());
}

int FeatureEncoder::target_index(const std::string& target) const {
  auto it = std::find(targets_.begin(), targets_.end(), target);
  if (it == targets_.end()) throw PreconditionError("unknown_target", "encoder has no target " + target);
  return static_cast<int>(it - targets_.begin());
}

std::vector<double> FeatureEncoder::encode(const Observation& obs) const {
  if (static_cast<int>(obs.rays.size()) != ray_count_)
    throw PreconditionError("ray_count_mismatch", "observation has " + std::to_string(obs.rays.size()) +
                                                      " rays, encoder expects " + std::to_string(ray_count_));
  std::vector<double> x(static_cast<std::size_t>(dim()), 0.0);
  const double range = obs.max_range > 0.0 ? obs.max_range : 1.0;
  for (int i = 0; i < ray_count_; ++i) {
    const RayHit& r = obs.rays[static_cast<std::size_t>(i)];
    double* slot = x.data() + static_cast<std::size_t>(i) * (1 + kRayClasses);
    slot[0] = std::min(1.0, r.distance / range);
    int cls = static_cast<int>(r.kind);
    if (r.kind == HitKind::object && r.category == obs.target) cls = 4;
    slot[1 + cls] = 1.0;
  }
  double* det = x.data() + ray_block();
  double* tgt = det + categories_.size() * kBearingBuckets;
  for (const auto& d : obs.detections) {
    const int b = std::clamp(d.bearing_bucket, 0, kBearingBuckets - 1);
    auto it = std::find(categories_.begin(), categories_.end(), d.category);
    if (it != categories_.end()) {
      double& v = det[(it - categories_.begin()) * kBearingBuckets + b];
      v = std::max(v, d.confidence);
    }
    if (d.category == obs.target) tgt[b] = std::max(tgt[b], d.confidence);
  }
  x.back() = obs.last_action_collided ? 1.0 : 0.0;
  return x;
}

namespace {

class UniformPolicy : public Policy {
 public:
  explicit UniformPolicy(ActionSpace space) : space_(space) {}
  std::string name() const override { return "random"; }
  ActionSpace action_space() const override { return space_; }
  PolicyOutput act(const Observation&, const std::vector<double>&) const override {
    const std::size_t n = actions_of(space_).size();
    return {std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0, {}};
  }
  bool sampled_evaluation() const override { return true; }

 private:
  ActionSpace space_;
};

class DonePolicy : public Policy {
 public:
  explicit DonePolicy(ActionSpace space) : space_(space) {}
  std::string name() const override { return "instant_done"; }
  ActionSpace action_space() const override { return space_; }
  PolicyOutput act(const Observation&, const std::vector<double>&) const override {
    const auto actions = actions_of(space_);
    std::vector<double> p(actions.size(), 0.0);
    p[static_cast<std::size_t>(std::find(actions.begin(), actions.end(), Action::Done) - actions.begin())] = 1.0;
    return {p, 0.0, {}};
  }

 private:
  ActionSpace space_;
};

}  // namespace

std::unique_ptr<Policy> random_policy(ActionSpace space) { return std::make_unique<UniformPolicy>(space); }
std::unique_ptr<Policy> instant_done_policy(ActionSpace space) { return std::make_unique<DonePolicy>(space); }

ActorCriticPolicy::ActorCriticPolicy(FeatureEncoder encoder, ActionSpace space, bool blind, std::uint64_t seed,
                                     int embed_dim, int dense_dim, int hidden_dim)
    : encoder_(std::move(encoder)), space_(space), blind_(blind) {
  NetShape shape;
  shape.input_dim = encoder_.dim();
  shape.targets = static_cast<int>(encoder_.targets().size());
  shape.embed_dim = embed_dim;
  shape.dense_dim = dense_dim;
  shape.hidden_dim = hidden_dim;
  shape.actions = static_cast<int>(actions_of(space).size());
  net_ = Network(shape, seed);
}

ActorCriticPolicy::ActorCriticPolicy(FeatureEncoder encoder, ActionSpace space, bool blind, Network net)
    : encoder_(std::move(encoder)), space_(space), blind_(blind), net_(std::move(net)) {
  const NetShape& s = net_.shape();
  if (s.input_dim != encoder_.dim() || s.targets != static_cast<int>(encoder_.targets().size()) ||
      s.actions != static_cast<int>(actions_of(space).size()))
    throw PreconditionError("shape_mismatch", "network shape does not fit the encoder and action space");
}

std::vector<double> ActorCriticPolicy::features(const Observation& obs) const {
  if (blind_) return std::vector<double>(static_cast<std::size_t>(encoder_.dim()), 0.0);
  return encoder_.encode(obs);
}

void ActorCriticPolicy::step(const Observation& obs, const std::vector<double>& memory, StepCache& cache) const {
  const std::vector<double> h = memory.empty() ? std::vector<double>(memory_size(), 0.0) : memory;
  net_.forward(features(obs), encoder_.target_index(obs.target), h, cache);
}

PolicyOutput ActorCriticPolicy::act(const Observation& obs, const std::vector<double>& memory) const {
  StepCache c;
  step(obs, memory, c);
  PolicyOutput out;
  out.probs.reserve(c.log_probs.size());
  for (double lp : c.log_probs) out.probs.push_back(std::exp(lp));
  out.value = c.value;
  out.memory = std::move(c.h);
  return out;
}

std::unique_ptr<ActorCriticPolicy> blind_policy(const AssetCatalog& catalog, ActionSpace space, std::uint64_t seed,
                                                int ray_count) {
  return std::make_unique<ActorCriticPolicy>(FeatureEncoder::for_catalog(catalog, ray_count), space, true, seed);
}

void save_checkpoint(std::ostream& os, const ActorCriticPolicy& policy) {
  const Network& net = policy.network();
  const NetShape& s = net.shape();
  json doc;
  doc["schema"] = "navth-ckpt/1";
  doc["policy"] = policy.name();
  doc["blind"] = policy.blind();
  doc["action_space"] = to_string(policy.action_space());
  doc["encoder"] = {{"ray_count", policy.encoder().ray_count()},
                    {"categories", policy.encoder().categories()},
                    {"targets", policy.encoder().targets()}};
  doc["shape"] = {{"input_dim", s.input_dim}, {"targets", s.targets},       {"embed_dim", s.embed_dim},
                  {"dense_dim", s.dense_dim}, {"hidden_dim", s.hidden_dim}, {"actions", s.actions}};
  json tensors = json::array();
  for (const auto& t : net.tensors()) {
    std::vector<double> data(net.params().begin() + static_cast<std::ptrdiff_t>(t.offset),
                             net.params().begin() + static_cast<std::ptrdiff_t>(t.offset + t.size()));
    tensors.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}, {"data", data}});
  }
  doc["tensors"] = tensors;
  os << doc.dump() << '\n';
}

ActorCriticPolicy load_checkpoint(std::istream& is) {
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("$", std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("schema") != "navth-ckpt/1") throw SchemaError("$.schema", "expected navth-ckpt/1");
    const json& enc = doc.at("encoder");
    FeatureEncoder encoder(enc.at("ray_count").get<int>(), enc.at("categories").get<std::vector<std::string>>(),
                           enc.at("targets").get<std::vector<std::string>>());
    const json& sj = doc.at("shape");
    NetShape shape{sj.at("input_dim").get<int>(),  sj.at("targets").get<int>(),    sj.at("embed_dim").get<int>(),
                   sj.at("dense_dim").get<int>(), sj.at("hidden_dim").get<int>(), sj.at("actions").get<int>()};
    Network net(shape, 0);
    std::vector<char> seen(net.tensors().size(), 0);
    for (const auto& t : doc.at("tensors")) {
      const std::string name = t.at("name").get<std::string>();
      const TensorView& view = net.tensor(name);
      const auto dims = t.at("shape").get<std::vector<int>>();
      const auto data = t.at("data").get<std::vector<double>>();
      if (dims.size() != 2 || dims[0] != view.rows || dims[1] != view.cols || data.size() != view.size())
        throw SchemaError("$.tensors." + name, "shape does not match the declared network");
      std::copy(data.begin(), data.end(), net.params().begin() + static_cast<std::ptrdiff_t>(view.offset));
      seen[static_cast<std::size_t>(&view - net.tensors().data())] = 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw SchemaError("$.tensors", "missing tensor " + net.tensors()[i].name);
    return ActorCriticPolicy(std::move(encoder), action_space_from_string(doc.at("action_space").get<std::string>()),
                             doc.at("blind").get<bool>(), std::move(net));
  } catch (const json::exception& e) {
    throw SchemaError("$", std::string("malformed checkpoint: ") + e.what());
  }
}

namespace {

class PolicyAgent : public Agent {
 public:
  explicit PolicyAgent(std::shared_ptr<const Policy> p) : policy_(std::move(p)) {}
  std::string name() const override { return policy_->name(); }
  void begin(const EpisodeState& ep) override {
    if (ep.spec.action_space != policy_->action_space())
      throw PreconditionError("action_space_mismatch", "policy and task use different action spaces");
    actions_ = actions_of(policy_->action_space());
    memory_.assign(policy_->memory_size(), 0.0);
  }
  Action act(const Observation& obs, Rng& rng) override {
    PolicyOutput out = policy_->act(obs, memory_);
    memory_ = std::move(out.memory);
    std::size_t pick = 0;
    if (policy_->sampled_evaluation()) {
      double u = rng.uniform();
      pick = out.probs.size() - 1;
      for (std::size_t i = 0; i < out.probs.size(); ++i) {
        if (u < out.probs[i]) {
          pick = i;
          break;
        }
        u -= out.probs[i];
      }
    } else {
      pick = static_cast<std::size_t>(std::max_element(out.probs.begin(), out.probs.end()) - out.probs.begin());
    }
    return actions_[pick];
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PolicyAgent>(policy_); }

 private:
  std::shared_ptr<const Policy> policy_;
  std::vector<Action> actions_;
  std::vector<double> memory_;
};

class OracleAgent : public Agent {
 public:
  std::string name() const override { return "oracle"; }
  void begin(const EpisodeState& ep) override {
    next_ = 0;
    try {
      plan_ = shortest_path_actions(*ep.scene, ep.start, ep.spec, PathObjective::metric_then_actions);
    } catch (const PreconditionError&) {
      plan_.clear();
    }
  }
  Action act(const Observation&, Rng&) override { return next_ < plan_.size() ? plan_[next_++] : Action::Done; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<OracleAgent>(); }

 private:
  std::vector<Action> plan_;
  std::size_t next_ = 0;
};

}  // namespace

std::unique_ptr<Agent> policy_agent(std::shared_ptr<const Policy> policy) {
  return std::make_unique<PolicyAgent>(std::move(policy));
}
std::unique_ptr<Agent> oracle_agent() { return std::make_unique<OracleAgent>(); }

std::vector<EvalStart> make_eval_starts(const std::vector<const Scene*>& scenes, const TaskSpec& spec, int per_scene,
                                        std::uint64_t seed) {
  if (per_scene < 1) throw PreconditionError("invalid_samples", "starts per scene must be >= 1");
  std::vector<EvalStart> out;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = *scenes[si];
    Rng rng(mix_seed(seed, si));
    const NavGraph graph(scene, spec);
    std::vector<EvalStart> local;
    std::vector<double> lengths;
    for (int k = 0; k < per_scene; ++k) {
      const EpisodeState ep = reset(scene, spec, rng);
      const double l = shortest_path_length_m(graph, ep.start.position);
      if (l == kInf) continue;
      local.push_back({&scene, spec.target_category, ep.start, l, DifficultyBucket::easy});
      lengths.push_back(l);
    }
    const auto buckets = bucket_lengths(lengths);
    for (std::size_t i = 0; i < local.size(); ++i) local[i].bucket = buckets[i];
    out.insert(out.end(), local.begin(), local.end());
  }
  return out;
}

std::vector<EpisodeResult> evaluate(const Agent& agent, const std::vector<EvalStart>& starts, const TaskSpec& spec,
                                    const MotionNoiseModel& noise, int episodes_per_start, std::uint64_t seed,
                                    int threads, std::vector<EpisodeState>* episodes) {
  if (episodes_per_start < 1) throw PreconditionError("invalid_samples", "episodes per start must be >= 1");
  spec.validate();
  const std::size_t reps = static_cast<std::size_t>(episodes_per_start);
  const std::size_t total = starts.size() * reps;
  std::vector<EpisodeResult> results(total);
  std::vector<EpisodeState> states(episodes ? total : 0);

  auto run = [&](Agent& a, std::size_t job) {
    const EvalStart& s = starts[job / reps];
    TaskSpec task = spec;
    task.target_category = s.target;
    Rng rng(mix_seed(seed, job));
    EpisodeState ep = reset_at(*s.scene, task, s.start);
    a.begin(ep);
    Observation obs = episode_observation(ep, false);
    while (!ep.terminated()) obs = episode_step(ep, a.act(obs, rng), noise, rng).observation;
    results[job] = summarize_episode(ep, s.shortest_path_m, s.bucket);
    if (episodes) states[job] = std::move(ep);
  };

  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (n_threads == 1) {
    auto a = agent.clone();
    for (std::size_t j = 0; j < total; ++j) run(*a, j);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        try {
          auto a = agent.clone();
          for (std::size_t j = static_cast<std::size_t>(t); j < total; j += static_cast<std::size_t>(n_threads))
            run(*a, j);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  if (episodes) *episodes = std::move(states);
  return results;
}

FovMismatchResult fov_mismatch_experiment(std::shared_ptr<const Policy> policy, double train_fov, double eval_fov,
                                          const std::vector<EvalStart>& starts, const TaskSpec& spec,
                                          const MotionNoiseModel& noise, int episodes_per_start, std::uint64_t seed) {
  if (const auto* ac = dynamic_cast<const ActorCriticPolicy*>(policy.get());
      ac && ac->encoder().ray_count() != spec.camera.ray_count)
    throw PreconditionError("ray_count_mismatch", "both cameras must keep the policy's ray count");
  TaskSpec matched = spec, mismatched = spec;
  matched.camera.fov = train_fov;
  mismatched.camera.fov = eval_fov;
  const auto agent = policy_agent(policy);
  FovMismatchResult out;
  out.matched_results = evaluate(*agent, starts, matched, noise, episodes_per_start, seed);
  out.mismatched_results = evaluate(*agent, starts, mismatched, noise, episodes_per_start, seed);
  out.matched = benchmark_report(out.matched_results);
  out.mismatched = benchmark_report(out.mismatched_results);
  return out;
}

}  // namespace navth
