#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "navth/metrics.hpp"
#include "navth/nn.hpp"
#include "navth/task.hpp"

namespace navth {

/// Fixed-size vector encoding of an Observation.
///
/// Layout: per ray [distance / max_range, one-hot{none, wall, furniture,
/// object, target}], then per object category and bearing bucket the max
/// detection confidence, then the target's own per-bucket max confidence,
/// then the collision flag.
class FeatureEncoder {
 public:
  static constexpr int kRayClasses = 5;

  FeatureEncoder() = default;
  FeatureEncoder(int ray_count, std::vector<std::string> categories, std::vector<std::string> targets);
  static FeatureEncoder for_catalog(const AssetCatalog& catalog, int ray_count);

  int ray_count() const { return ray_count_; }
  int dim() const { return ray_count_ * (1 + kRayClasses) + static_cast<int>(categories_.size()) * kBearingBuckets +
                           kBearingBuckets + 1; }
  int ray_block() const { return ray_count_ * (1 + kRayClasses); }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& targets() const { return targets_; }
  int target_index(const std::string& target) const;

  /// Throws PreconditionError on a ray-count mismatch or unknown target.
  std::vector<double> encode(const Observation& obs) const;

  friend bool operator==(const FeatureEncoder&, const FeatureEncoder&) = default;

 private:
  int ray_count_ = 0;
  std::vector<std::string> categories_;
  std::vector<std::string> targets_;
};

struct PolicyOutput {
  std::vector<double> probs;  // over actions_of(action_space())
  double value = 0.0;
  std::vector<double> memory;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual std::size_t memory_size() const { return 0; }
  /// Deterministic in (parameters, observation, memory).
  virtual PolicyOutput act(const Observation& obs, const std::vector<double>& memory) const = 0;
  /// Whether evaluation samples from the distribution instead of taking
  /// the argmax (true only where argmax would degenerate).
  virtual bool sampled_evaluation() const { return false; }
};

std::unique_ptr<Policy> random_policy(ActionSpace space = ActionSpace::four_action);
std::unique_ptr<Policy> instant_done_policy(ActionSpace space = ActionSpace::four_action);

/// Recurrent actor-critic over FeatureEncoder inputs. A blind policy sees
/// only the target and its own memory: every perception feature is zeroed.
class ActorCriticPolicy : public Policy {
 public:
  ActorCriticPolicy(FeatureEncoder encoder, ActionSpace space, bool blind, std::uint64_t seed,
                    int embed_dim = 64, int dense_dim = 128, int hidden_dim = 128);
  ActorCriticPolicy(FeatureEncoder encoder, ActionSpace space, bool blind, Network net);

  std::string name() const override { return blind_ ? "blind" : "actor_critic"; }
  ActionSpace action_space() const override { return space_; }
  std::size_t memory_size() const override { return static_cast<std::size_t>(net_.shape().hidden_dim); }
  PolicyOutput act(const Observation& obs, const std::vector<double>& memory) const override;

  bool blind() const { return blind_; }
  const FeatureEncoder& encoder() const { return encoder_; }
  const Network& network() const { return net_; }
  Network& network() { return net_; }

  /// Encoded (and, for blind policies, masked) network input.
  std::vector<double> features(const Observation& obs) const;
  /// Forward step with caching for training.
  void step(const Observation& obs, const std::vector<double>& memory, StepCache& cache) const;

 private:
  FeatureEncoder encoder_;
  ActionSpace space_;
  bool blind_;
  Network net_;
};

std::unique_ptr<ActorCriticPolicy> blind_policy(const AssetCatalog& catalog, ActionSpace space,
                                                std::uint64_t seed, int ray_count = 64);

/// Checkpoint "navth-ckpt/1": encoder, flags and every tensor with its shape.
void save_checkpoint(std::ostream& os, const ActorCriticPolicy& policy);
ActorCriticPolicy load_checkpoint(std::istream& is);

/// Episode driver used by evaluation. Implementations may keep per-episode
/// state; `begin` is called once before the first `act`.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual void begin(const EpisodeState& episode) = 0;
  virtual Action act(const Observation& obs, Rng& rng) = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;
};

/// Drives a Policy: argmax actions, or sampled ones when the policy asks.
std::unique_ptr<Agent> policy_agent(std::shared_ptr<const Policy> policy);
/// Privileged executor of the metric-optimal shortest path, then Done.
std::unique_ptr<Agent> oracle_agent();

struct EvalStart {
  const Scene* scene = nullptr;
  std::string target;
  AgentState start;
  double shortest_path_m = 0.0;
  DifficultyBucket bucket = DifficultyBucket::easy;
};

/// Samples `per_scene` spawn poses per scene (as reset does), drops starts
/// with an unreachable target and buckets the rest by path-length
/// percentile within each scene.
std::vector<EvalStart> make_eval_starts(const std::vector<const Scene*>& scenes, const TaskSpec& spec,
                                        int per_scene, std::uint64_t seed);

/// One result per (start, repetition), each from its own seeded stream.
std::vector<EpisodeResult> evaluate(const Agent& agent, const std::vector<EvalStart>& starts,
                                    const TaskSpec& spec, const MotionNoiseModel& noise,
                                    int episodes_per_start, std::uint64_t seed, int threads = 1,
                                    std::vector<EpisodeState>* episodes = nullptr);

struct TrainConfig {
  double learning_rate = 1e-4;
  int workers = 8;
  long episodes = 20000;
  double gamma = 0.99;
  double entropy_weight = 0.01;
  double value_loss_weight = 0.5;
  int n_steps = 20;
  double max_grad_norm = 40.0;
  std::uint64_t seed = 1;
  bool blind = false;
  /// Targets sampled per episode; empty means the task spec's target.
  std::vector<std::string> targets;
  int log_window = 100;
  int embed_dim = 64;
  int dense_dim = 128;
  int hidden_dim = 128;
  /// Initial policy logit of Done relative to the other actions.
  double initial_done_logit = -2.0;
  /// Rate of the running advantage mean subtracted from each advantage; 0 = off.
  double advantage_centering = 0.0;
  /// Where the non-finite-loss diagnostic is written; empty = not written.
  std::string dump_path;

  void validate() const;
};

struct EpisodeLog {
  long episode = 0;
  double episode_return = 0.0;
  bool success = false;
  int length = 0;
  int worker = 0;
};

struct WindowLog {
  long end_episode = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  std::vector<WindowLog> windows;
  long updates = 0;

  /// Line-delimited records, one per episode then one per window.
  void write(std::ostream& os) const;
};

struct TrainResult {
  std::unique_ptr<ActorCriticPolicy> policy;
  TrainingLog log;
};

/// Advantage actor-critic. Each worker samples a random scene and spawn,
/// rolls out n-step segments and sends their gradients to a single updater
/// that applies Adam in arrival order and republishes parameters. With one
/// worker, training runs inline and is bit-reproducible.
TrainResult train_actor_critic(const TrainConfig& config, const std::vector<const Scene*>& scenes,
                               const TaskSpec& spec, const MotionNoiseModel& noise = MotionNoiseModel::robot(),
                               const std::function<void(const EpisodeLog&)>& on_episode = {});

struct FovMismatchResult {
  BenchmarkReport matched;
  BenchmarkReport mismatched;
  std::vector<EpisodeResult> matched_results;
  std::vector<EpisodeResult> mismatched_results;
};

/// Evaluates one policy on the same starts with its training field of view
/// and with `eval_fov`; both cameras keep the policy's ray count.
FovMismatchResult fov_mismatch_experiment(std::shared_ptr<const Policy> policy, double train_fov, double eval_fov,
                                          const std::vector<EvalStart>& starts, const TaskSpec& spec,
                                          const MotionNoiseModel& noise, int episodes_per_start,
                                          std::uint64_t seed);

}  // namespace navth
