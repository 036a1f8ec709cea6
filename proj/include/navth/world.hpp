#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "navth/random.hpp"
#include "navth/scene.hpp"

namespace navth {

inline constexpr double kStepSize = 0.25;
inline constexpr double kRotationStep = 45.0;
inline constexpr double kPitchStep = 30.0;
inline constexpr double kContactMargin = 0.01;
/// Floor objects closer than this are below the frame at level pitch.
inline constexpr double kFloorNearBlind = 0.4;
/// Looking down exposes floor objects up to this range.
inline constexpr double kLookDownRange = 1.5;

struct AgentState {
  Vec2 position;
  double heading = 0.0;  // degrees in [0, 360), counterclockwise from +x
  double pitch = 0.0;    // one of -30, 0, +30

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class Action { MoveAhead, RotateRight, RotateLeft, LookUp, LookDown, Done };

inline constexpr Action kAllActions[] = {Action::MoveAhead, Action::RotateRight, Action::RotateLeft,
                                         Action::LookUp,    Action::LookDown,    Action::Done};

const char* to_string(Action a);
/// Throws PreconditionError("malformed_action") for unknown names.
Action action_from_string(const std::string& s);

struct MotionNoiseModel {
  double translation_mean = 0.0;
  double translation_std = 0.0;
  double rotation_mean = 0.0;
  double rotation_std = 0.0;

  /// The measured actuation noise of the physical robot.
  static MotionNoiseModel robot() { return {0.001, 0.005, 0.0, 0.5}; }
  static MotionNoiseModel none() { return {}; }
};

struct CameraModel {
  double fov = 42.5;
  int ray_count = 64;
  double max_range = 5.0;

  void validate() const;
};

enum class HitKind { none, wall, furniture, object };
const char* to_string(HitKind k);

struct RayHit {
  double distance = 0.0;
  HitKind kind = HitKind::none;
  std::string category;  // furniture or object category; empty otherwise

  friend bool operator==(const RayHit&, const RayHit&) = default;
};

struct Detection {
  std::string category;
  double confidence = 0.0;
  int bearing_bucket = 0;
  double distance = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

inline constexpr int kBearingBuckets = 3;

struct Observation {
  std::vector<RayHit> rays;
  std::vector<Detection> detections;
  std::string target;
  bool last_action_collided = false;
  double max_range = 5.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Parametric sim-to-real observation gap.
struct DomainShift {
  double default_tp_rate = 1.0;
  std::map<std::string, double> tp_rate;
  std::map<std::string, double> fp_rate;  // expected spurious detections per frame
  double confidence_noise_std = 0.0;
  double ray_distance_jitter_std = 0.0;
  /// Row-stochastic relabelling over `confusion_categories`; empty = identity.
  std::vector<std::string> confusion_categories;
  std::vector<std::vector<double>> class_confusion;

  static DomainShift identity() { return {}; }
  double tp(const std::string& category) const;
  void validate() const;
};

struct StepResult {
  AgentState state;
  bool collided = false;
  double displacement = 0.0;
};

/// Applies one action with actuation noise. MoveAhead sweeps the agent disc
/// (as a point against obstacles inflated by `agent_radius`) and stops 1 cm
/// short of first contact.
StepResult step(const Scene& scene, const AgentState& state, Action action,
                const MotionNoiseModel& noise, Rng& rng, double step_size = kStepSize,
                double agent_radius = kAgentRadius);

/// Whether a height class is in frame at the given pitch and distance.
bool height_visible(HeightClass h, double pitch, double distance);

/// Ray directions uniformly span [heading - fov/2, heading + fov/2].
std::vector<RayHit> cast_rays(const Scene& scene, const AgentState& state,
                              const CameraModel& camera);

struct VisibleObject {
  std::size_t index = 0;  // into scene.objects
  double distance = 0.0;
  double bearing = 0.0;  // relative to heading, degrees, positive = left
};

/// Line-of-sight test from `from` to an object's centre; the object's own
/// support surface never occludes it.
bool line_of_sight(const Scene& scene, Vec2 from, std::size_t object_index);

std::vector<VisibleObject> visible_objects(const Scene& scene, const AgentState& state,
                                           const CameraModel& camera,
                                           double visibility_distance);

int bearing_bucket(double relative_bearing, double fov);

/// Detection confidence before noise; decays with distance.
double base_confidence(double distance);

std::vector<Detection> emulate_detections(const Scene& scene,
                                          const std::vector<VisibleObject>& visible,
                                          const CameraModel& camera, const DomainShift& shift,
                                          const std::vector<std::string>& reportable_categories,
                                          Rng& rng);

/// Perturbs rays and re-emulates existing detections under `shift`; target
/// and collision flag are left untouched.
Observation apply_domain_shift(const Observation& obs, const DomainShift& shift,
                               const std::vector<std::string>& reportable_categories, Rng& rng);

/// Full egocentric observation under the identity shift.
Observation observe(const Scene& scene, const AgentState& state, const CameraModel& camera,
                    const std::string& target, bool collided);

}  // namespace navth
