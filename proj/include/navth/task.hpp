#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "navth/world.hpp"

namespace navth {

enum class ActionSpace { four_action, six_action };
const char* to_string(ActionSpace s);
ActionSpace action_space_from_string(const std::string& s);

/// Actions of a space in a fixed order; the policy output index follows it.
std::vector<Action> actions_of(ActionSpace space);
bool permits(ActionSpace space, Action a);

struct RewardConfig {
  double success_reward = 5.0;
  double step_penalty = -0.01;
};

struct TaskSpec {
  std::string target_category = "Television";
  double success_distance = 1.0;
  double visibility_distance = 1.0;
  int max_steps = 200;
  ActionSpace action_space = ActionSpace::four_action;
  RewardConfig reward;
  CameraModel camera;

  void validate() const;
};

enum class Outcome { running, success, failed_done, timeout };
const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct TrajectoryEntry {
  AgentState state;  // pose after the action
  Action action = Action::Done;
  double reward = 0.0;
  bool collided = false;
  double displacement = 0.0;
};

struct EpisodeState {
  const Scene* scene = nullptr;
  TaskSpec spec;
  AgentState start;
  AgentState agent;
  int t = 0;
  Outcome outcome = Outcome::running;
  std::vector<TrajectoryEntry> trajectory;

  bool terminated() const { return outcome != Outcome::running; }
  double path_length() const;
  int collisions() const;
  double episode_return() const;
};

/// Navigable cells of a scene at the navigation resolution (step size).
std::vector<Vec2> navigable_positions(const Scene& scene);

/// Start uniformly over navigable cells, heading a uniform multiple of 45,
/// level pitch. Throws PreconditionError if the target is absent or no cell
/// is navigable.
EpisodeState reset(const Scene& scene, const TaskSpec& spec, Rng& rng);

/// Starts an episode from a given pose.
EpisodeState reset_at(const Scene& scene, const TaskSpec& spec, const AgentState& start);

struct EpisodeStepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
};

/// Observation of the current pose, with an optional domain shift.
Observation episode_observation(const EpisodeState& ep, bool collided,
                                const DomainShift* shift = nullptr, Rng* shift_rng = nullptr);

EpisodeStepResult episode_step(EpisodeState& ep, Action action, const MotionNoiseModel& noise,
                               Rng& rng, const DomainShift* shift = nullptr);

/// Conditions (a) and (b) of success: some instance of the target is visible
/// and within success_distance. Condition (c) is the caller issuing Done.
bool check_success(const Scene& scene, const AgentState& state, const TaskSpec& spec);

enum class DifficultyBucket { easy, medium, hard };
const char* to_string(DifficultyBucket b);
DifficultyBucket bucket_from_string(const std::string& s);

/// Percentile bucketing of path lengths. A length's percentile is
/// (number of strictly shorter lengths + 1) / n; the shortest tie group is
/// always easy; <= 0.2 easy, <= 0.6 medium, otherwise hard.
std::vector<DifficultyBucket> bucket_lengths(const std::vector<double>& lengths);

struct VisibleHistogram {
  /// Number of visible objects -> poses.
  std::map<std::size_t, std::size_t> counts;
  std::size_t samples = 0;
};

/// Samples spawn poses as reset does and counts objects visible within
/// `visibility_distance`.
VisibleHistogram visible_object_histogram(const std::vector<const Scene*>& scenes, const CameraModel& camera,
                                          double visibility_distance, int samples_per_scene, std::uint64_t seed);

struct BucketedStarts {
  std::vector<AgentState> starts;
  std::vector<double> shortest_path_m;
  std::vector<DifficultyBucket> buckets;
  /// Starts dropped because the target was unreachable from them.
  std::vector<AgentState> unreachable;
};

BucketedStarts bucket_difficulty(const Scene& scene, const std::vector<AgentState>& starts,
                                 const TaskSpec& spec);

}  // namespace navth
