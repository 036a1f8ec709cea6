#include "navth/task.hpp"

#include <algorithm>
#include <numeric>

#include "navth/error.hpp"
#include "navth/pathing.hpp"

namespace navth {

const char* to_string(ActionSpace s) {
  return s == ActionSpace::four_action ? "four_action" : "six_action";
}

ActionSpace action_space_from_string(const std::string& s) {
  if (s == "four_action" || s == "4") return ActionSpace::four_action;
  if (s == "six_action" || s == "6") return ActionSpace::six_action;
  throw PreconditionError("invalid_action_space", "unknown action space '" + s + "'");
}

std::vector<Action> actions_of(ActionSpace space) {
  if (space == ActionSpace::four_action)
    return {Action::MoveAhead, Action::RotateRight, Action::RotateLeft, Action::Done};
  return {Action::MoveAhead, Action::RotateRight, Action::RotateLeft,
          Action::LookUp,    Action::LookDown,    Action::Done};
}

bool permits(ActionSpace space, Action a) {
  return space == ActionSpace::six_action || (a != Action::LookUp && a != Action::LookDown);
}

void TaskSpec::validate() const {
  camera.validate();
  if (!(success_distance > 0.0) || success_distance > visibility_distance)
    throw PreconditionError("invalid_task", "need 0 < success_distance <= visibility_distance");
  if (max_steps < 1) throw PreconditionError("invalid_task", "max_steps must be >= 1");
  if (reward.step_penalty > 0.0 || reward.success_reward < 0.0)
    throw PreconditionError("invalid_task", "need step_penalty <= 0 <= success_reward");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::success: return "success";
    case Outcome::failed_done: return "failed_done";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

Outcome outcome_from_string(const std::string& s) {
  for (Outcome o : {Outcome::running, Outcome::success, Outcome::failed_done, Outcome::timeout})
    if (s == to_string(o)) return o;
  throw SchemaError("outcome", "unknown outcome '" + s + "'");
}

double EpisodeState::path_length() const {
  double p = 0.0;
  for (const auto& e : trajectory) p += e.displacement;
  return p;
}

int EpisodeState::collisions() const {
  return static_cast<int>(std::count_if(trajectory.begin(), trajectory.end(),
                                        [](const TrajectoryEntry& e) { return e.collided; }));
}

double EpisodeState::episode_return() const {
  double g = 0.0;
  for (const auto& e : trajectory) g += e.reward;
  return g;
}

std::vector<Vec2> navigable_positions(const Scene& scene) {
  const auto grid = occupancy_grid(scene, kStepSize);
  std::vector<Vec2> out;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (grid.free(c, r)) out.push_back(grid.cell_center(c, r));
  return out;
}

EpisodeState reset_at(const Scene& scene, const TaskSpec& spec, const AgentState& start) {
  if (!scene.has_category(spec.target_category))
    throw PreconditionError("missing_target",
                            "scene " + scene.id + " contains no " + spec.target_category);
  EpisodeState ep;
  ep.scene = &scene;
  ep.spec = spec;
  ep.start = start;
  ep.agent = start;
  return ep;
}

EpisodeState reset(const Scene& scene, const TaskSpec& spec, Rng& rng) {
  if (!scene.has_category(spec.target_category))
    throw PreconditionError("missing_target",
                            "scene " + scene.id + " contains no " + spec.target_category);
  const auto cells = navigable_positions(scene);
  if (cells.empty())
    throw PreconditionError("no_navigable_start", "scene " + scene.id + " has no navigable cell");
  const Vec2 p = cells[rng.below(cells.size())];
  const double heading = kRotationStep * static_cast<double>(rng.below(8));
  return reset_at(scene, spec, {p, heading, 0.0});
}

Observation episode_observation(const EpisodeState& ep, bool collided, const DomainShift* shift,
                                Rng* shift_rng) {
  Observation obs = observe(*ep.scene, ep.agent, ep.spec.camera, ep.spec.target_category, collided);
  if (shift && shift_rng) obs = apply_domain_shift(obs, *shift, {}, *shift_rng);
  return obs;
}

EpisodeStepResult episode_step(EpisodeState& ep, Action action, const MotionNoiseModel& noise,
                               Rng& rng, const DomainShift* shift) {
  if (ep.terminated())
    throw PreconditionError("episode_terminated", "cannot step a terminated episode");
  if (!permits(ep.spec.action_space, action))
    throw PreconditionError("action_not_permitted", std::string(to_string(action)) +
                                                        " is outside the configured action space");
  const StepResult moved = step(*ep.scene, ep.agent, action, noise, rng);
  ep.agent = moved.state;
  ++ep.t;
  double reward = ep.spec.reward.step_penalty;
  if (action == Action::Done) {
    const bool ok = check_success(*ep.scene, ep.agent, ep.spec);
    if (ok) reward += ep.spec.reward.success_reward;
    ep.outcome = ok ? Outcome::success : Outcome::failed_done;
  } else if (ep.t >= ep.spec.max_steps) {
    ep.outcome = Outcome::timeout;
  }
  ep.trajectory.push_back({ep.agent, action, reward, moved.collided, moved.displacement});
  return {episode_observation(ep, moved.collided, shift, &rng), reward, ep.terminated()};
}

bool check_success(const Scene& scene, const AgentState& state, const TaskSpec& spec) {
  for (const auto& v : visible_objects(scene, state, spec.camera, spec.visibility_distance))
    if (scene.objects[v.index].category == spec.target_category && v.distance <= spec.success_distance)
      return true;
  return false;
}

const char* to_string(DifficultyBucket b) {
  switch (b) {
    case DifficultyBucket::easy: return "easy";
    case DifficultyBucket::medium: return "medium";
    case DifficultyBucket::hard: return "hard";
  }
  return "?";
}

DifficultyBucket bucket_from_string(const std::string& s) {
  if (s == "easy") return DifficultyBucket::easy;
  if (s == "medium") return DifficultyBucket::medium;
  if (s == "hard") return DifficultyBucket::hard;
  throw SchemaError("bucket", "unknown difficulty bucket '" + s + "'");
}

std::vector<DifficultyBucket> bucket_lengths(const std::vector<double>& lengths) {
  std::vector<double> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(lengths.size());
  std::vector<DifficultyBucket> out;
  out.reserve(lengths.size());
  for (double l : lengths) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin();
    const double pct = (static_cast<double>(below) + 1.0) / n;
    if (below == 0 || pct <= 0.2 + 1e-12)
      out.push_back(DifficultyBucket::easy);
    else if (pct <= 0.6 + 1e-12)
      out.push_back(DifficultyBucket::medium);
    else
      out.push_back(DifficultyBucket::hard);
  }
  return out;
}

BucketedStarts bucket_difficulty(const Scene& scene, const std::vector<AgentState>& starts,
                                 const TaskSpec& spec) {
  const NavGraph graph(scene, spec);
  BucketedStarts out;
  for (const auto& s : starts) {
    const double l = shortest_path_length_m(graph, s.position);
    if (l == kInf) {
      out.unreachable.push_back(s);
      continue;
    }
    out.starts.push_back(s);
    out.shortest_path_m.push_back(l);
  }
  out.buckets = bucket_lengths(out.shortest_path_m);
  return out;
}

VisibleHistogram visible_object_histogram(const std::vector<const Scene*>& scenes, const CameraModel& camera,
                                          double visibility_distance, int samples_per_scene, std::uint64_t seed) {
  if (samples_per_scene < 1) throw PreconditionError("invalid_samples", "samples per scene must be >= 1");
  VisibleHistogram hist;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = *scenes[si];
    const auto cells = navigable_positions(scene);
    if (cells.empty()) continue;
    Rng rng(mix_seed(seed, si));
    for (int k = 0; k < samples_per_scene; ++k) {
      const Vec2 p = cells[rng.below(cells.size())];
      const double heading = kRotationStep * static_cast<double>(rng.below(8));
      ++hist.counts[visible_objects(scene, {p, heading, 0.0}, camera, visibility_distance).size()];
      ++hist.samples;
    }
  }
  return hist;
}

}  // namespace navth
