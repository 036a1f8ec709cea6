#include "navth/world.hpp"

#include <algorithm>

#include "navth/error.hpp"

namespace navth {

const char* to_string(Action a) {
  switch (a) {
    case Action::MoveAhead: return "MoveAhead";
    case Action::RotateRight: return "RotateRight";
    case Action::RotateLeft: return "RotateLeft";
    case Action::LookUp: return "LookUp";
    case Action::LookDown: return "LookDown";
    case Action::Done: return "Done";
  }
  return "?";
}

Action action_from_string(const std::string& s) {
  for (Action a : kAllActions)
    if (s == to_string(a)) return a;
  throw PreconditionError("malformed_action", "unknown action '" + s + "'");
}

const char* to_string(HitKind k) {
  switch (k) {
    case HitKind::none: return "none";
    case HitKind::wall: return "wall";
    case HitKind::furniture: return "furniture";
    case HitKind::object: return "object";
  }
  return "?";
}

void CameraModel::validate() const {
  if (!(fov > 0.0 && fov < 180.0)) throw PreconditionError("invalid_camera", "fov must lie in (0, 180)");
  if (ray_count < 2) throw PreconditionError("invalid_camera", "ray_count must be >= 2");
  if (!(max_range > 0.0)) throw PreconditionError("invalid_camera", "max_range must be > 0");
}

double DomainShift::tp(const std::string& category) const {
  auto it = tp_rate.find(category);
  return it == tp_rate.end() ? default_tp_rate : it->second;
}

void DomainShift::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(default_tp_rate)) throw PreconditionError("invalid_shift", "tp rate must lie in [0,1]");
  for (const auto& [k, v] : tp_rate)
    if (!in_unit(v)) throw PreconditionError("invalid_shift", "tp rate of " + k + " must lie in [0,1]");
  for (const auto& [k, v] : fp_rate)
    if (!(v >= 0.0)) throw PreconditionError("invalid_shift", "fp rate of " + k + " must be >= 0");
  if (!(confidence_noise_std >= 0.0) || !(ray_distance_jitter_std >= 0.0))
    throw PreconditionError("invalid_shift", "noise standard deviations must be >= 0");
  if (!class_confusion.empty()) {
    if (class_confusion.size() != confusion_categories.size())
      throw PreconditionError("invalid_shift", "confusion matrix must be square over its categories");
    for (const auto& row : class_confusion) {
      if (row.size() != confusion_categories.size())
        throw PreconditionError("invalid_shift", "confusion matrix must be square over its categories");
      double sum = 0.0;
      for (double v : row) {
        if (v < 0.0) throw PreconditionError("invalid_shift", "confusion entries must be >= 0");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw PreconditionError("invalid_shift", "confusion rows must sum to 1");
    }
  }
}

StepResult step(const Scene& scene, const AgentState& state, Action action,
                const MotionNoiseModel& noise, Rng& rng, double step_size, double agent_radius) {
  StepResult out{state, false, 0.0};
  auto rotation_noise = [&] {
    return noise.rotation_std > 0.0 ? rng.normal(noise.rotation_mean, noise.rotation_std)
                                    : noise.rotation_mean;
  };
  switch (action) {
    case Action::MoveAhead: {
      const double eps = noise.translation_std > 0.0
                             ? rng.normal(noise.translation_mean, noise.translation_std)
                             : noise.translation_mean;
      const double wanted = std::max(0.0, step_size + eps);
      const Vec2 dir = heading_vector(state.heading);
      const Vec2 p = state.position;
      const Rect inner{{agent_radius, agent_radius},
                       {scene.width - agent_radius, scene.depth - agent_radius}};
      double contact = ray_rect_exit(p, dir, inner);
      for (const auto& w : scene.walls)
        if (auto t = ray_rect_entry(p, dir, w.footprint().inflated(agent_radius)))
          contact = std::min(contact, *t);
      for (const auto& f : scene.furniture)
        if (auto t = ray_rect_entry(p, dir, f.footprint.inflated(agent_radius)))
          contact = std::min(contact, *t);
      double travel = wanted;
      if (contact < wanted) {
        travel = std::max(0.0, contact - kContactMargin);
        out.collided = true;
      }
      out.state.position = p + travel * dir;
      out.displacement = travel;
      break;
    }
    case Action::RotateRight:
      out.state.heading = wrap_degrees(state.heading - kRotationStep + rotation_noise());
      break;
    case Action::RotateLeft:
      out.state.heading = wrap_degrees(state.heading + kRotationStep + rotation_noise());
      break;
    case Action::LookUp:
      out.state.pitch = std::min(kPitchStep, state.pitch + kPitchStep);
      break;
    case Action::LookDown:
      out.state.pitch = std::max(-kPitchStep, state.pitch - kPitchStep);
      break;
    case Action::Done:
      break;
  }
  return out;
}

bool height_visible(HeightClass h, double pitch, double distance) {
  if (h == HeightClass::surface) return true;
  if (pitch > 0.0) return false;
  if (pitch < 0.0) return distance <= kLookDownRange;
  return distance >= kFloorNearBlind;
}

namespace {

constexpr double kMinRayDistance = 1e-6;

struct BlockHit {
  double t = kInf;
  HitKind kind = HitKind::none;
  int index = -1;
};

}  // namespace

std::vector<RayHit> cast_rays(const Scene& scene, const AgentState& state, const CameraModel& camera) {
  camera.validate();
  std::vector<RayHit> rays;
  rays.reserve(static_cast<std::size_t>(camera.ray_count));
  const Vec2 p = state.position;
  const Rect bounds = scene.bounds();
  const bool inside = bounds.contains(p);

  std::vector<int> supports(scene.objects.size());
  std::vector<char> in_frame(scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    supports[i] = scene.support_of(i);
    const auto& o = scene.objects[i];
    in_frame[i] = height_visible(o.height, state.pitch, distance(p, o.position));
  }
  std::vector<double> furniture_t(scene.furniture.size());

  for (int i = 0; i < camera.ray_count; ++i) {
    const double angle =
        state.heading - 0.5 * camera.fov + camera.fov * i / static_cast<double>(camera.ray_count - 1);
    const Vec2 dir = heading_vector(angle);

    BlockHit wall_hit;
    if (inside) wall_hit = {ray_rect_exit(p, dir, bounds), HitKind::wall, -1};
    for (std::size_t w = 0; w < scene.walls.size(); ++w)
      if (auto t = ray_rect_entry(p, dir, scene.walls[w].footprint()); t && *t < wall_hit.t)
        wall_hit = {*t, HitKind::wall, static_cast<int>(w)};
    BlockHit best = wall_hit;
    for (std::size_t f = 0; f < scene.furniture.size(); ++f) {
      auto t = ray_rect_entry(p, dir, scene.furniture[f].footprint);
      furniture_t[f] = t ? *t : kInf;
      if (furniture_t[f] < best.t) best = {furniture_t[f], HitKind::furniture, static_cast<int>(f)};
    }

    // An object is seen unless something other than its own support is in front.
    double obj_t = kInf;
    int obj_index = -1;
    for (std::size_t o = 0; o < scene.objects.size(); ++o) {
      if (!in_frame[o]) continue;
      auto t = ray_circle_entry(p, dir, scene.objects[o].position, kObjectRadius);
      if (!t || *t >= obj_t) continue;
      double occluder = wall_hit.t;
      for (std::size_t f = 0; f < scene.furniture.size(); ++f)
        if (static_cast<int>(f) != supports[o]) occluder = std::min(occluder, furniture_t[f]);
      if (*t < occluder) {
        obj_t = *t;
        obj_index = static_cast<int>(o);
      }
    }

    RayHit hit;
    if (obj_index >= 0) {
      hit = {obj_t, HitKind::object, scene.objects[static_cast<std::size_t>(obj_index)].category};
    } else if (best.kind == HitKind::furniture) {
      hit = {best.t, HitKind::furniture, scene.furniture[static_cast<std::size_t>(best.index)].category};
    } else {
      hit = {best.t, best.kind, {}};
    }
    if (hit.distance > camera.max_range || hit.kind == HitKind::none) hit = {camera.max_range, HitKind::none, {}};
    hit.distance = std::max(hit.distance, kMinRayDistance);
    rays.push_back(std::move(hit));
  }
  return rays;
}

bool line_of_sight(const Scene& scene, Vec2 from, std::size_t object_index) {
  const Vec2 to = scene.objects.at(object_index).position;
  for (const auto& w : scene.walls)
    if (segment_crosses_rect(from, to, w.footprint())) return false;
  const int support = scene.support_of(object_index);
  for (std::size_t f = 0; f < scene.furniture.size(); ++f)
    if (static_cast<int>(f) != support && segment_crosses_rect(from, to, scene.furniture[f].footprint))
      return false;
  return true;
}

std::vector<VisibleObject> visible_objects(const Scene& scene, const AgentState& state,
                                           const CameraModel& camera, double visibility_distance) {
  if (!(visibility_distance > 0.0))
    throw PreconditionError("invalid_distance", "visibility_distance must be > 0");
  std::vector<VisibleObject> out;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    const double d = distance(state.position, o.position);
    if (d > visibility_distance) continue;
    const double rel = d == 0.0 ? 0.0 : angle_difference(bearing_to(state.position, o.position), state.heading);
    if (std::abs(rel) > 0.5 * camera.fov) continue;
    if (!height_visible(o.height, state.pitch, d)) continue;
    if (!line_of_sight(scene, state.position, i)) continue;
    out.push_back({i, d, rel});
  }
  return out;
}

int bearing_bucket(double relative_bearing, double fov) {
  const double u = (0.5 * fov - relative_bearing) / fov;  // 0 at the left edge
  return std::clamp(static_cast<int>(std::floor(u * kBearingBuckets)), 0, kBearingBuckets - 1);
}

double base_confidence(double distance) { return std::exp(-0.25 * distance); }

namespace {

bool reportable(const std::vector<std::string>& cats, const std::string& c) {
  return cats.empty() || std::find(cats.begin(), cats.end(), c) != cats.end();
}

std::string relabel(const DomainShift& shift, const std::string& category, Rng& rng) {
  if (shift.class_confusion.empty()) return category;
  auto it = std::find(shift.confusion_categories.begin(), shift.confusion_categories.end(), category);
  if (it == shift.confusion_categories.end()) return category;
  const auto& row = shift.class_confusion[static_cast<std::size_t>(it - shift.confusion_categories.begin())];
  double u = rng.uniform();
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (u < row[j]) return shift.confusion_categories[j];
    u -= row[j];
  }
  return shift.confusion_categories.back();
}

// Keeps, relabels and perturbs one candidate detection; false when dropped.
bool shift_detection(Detection& d, const DomainShift& shift,
                     const std::vector<std::string>& cats, Rng& rng) {
  const double tp = shift.tp(d.category);
  if (tp < 1.0 && !rng.bernoulli(tp)) return false;
  d.category = relabel(shift, d.category, rng);
  if (shift.confidence_noise_std > 0.0)
    d.confidence = std::clamp(d.confidence + rng.normal(0.0, shift.confidence_noise_std), 0.0, 1.0);
  return reportable(cats, d.category);
}

void inject_false_positives(std::vector<Detection>& out, const DomainShift& shift, double max_range,
                            const std::vector<std::string>& cats, Rng& rng) {
  for (const auto& [category, rate] : shift.fp_rate) {
    const int k = rng.poisson(rate);
    for (int i = 0; i < k; ++i) {
      Detection d{category, rng.uniform(0.0, 0.5), static_cast<int>(rng.below(kBearingBuckets)),
                  rng.uniform(0.2, max_range)};
      if (reportable(cats, category)) out.push_back(std::move(d));
    }
  }
}

}  // namespace

std::vector<Detection> emulate_detections(const Scene& scene, const std::vector<VisibleObject>& visible,
                                          const CameraModel& camera, const DomainShift& shift,
                                          const std::vector<std::string>& reportable_categories,
                                          Rng& rng) {
  std::vector<Detection> out;
  for (const auto& v : visible) {
    Detection d{scene.objects.at(v.index).category, base_confidence(v.distance),
                bearing_bucket(v.bearing, camera.fov), v.distance};
    if (shift_detection(d, shift, reportable_categories, rng)) out.push_back(std::move(d));
  }
  inject_false_positives(out, shift, camera.max_range, reportable_categories, rng);
  return out;
}

Observation apply_domain_shift(const Observation& obs, const DomainShift& shift,
                               const std::vector<std::string>& reportable_categories, Rng& rng) {
  Observation out = obs;
  if (shift.ray_distance_jitter_std > 0.0)
    for (auto& r : out.rays)
      r.distance = std::clamp(r.distance + rng.normal(0.0, shift.ray_distance_jitter_std),
                              kMinRayDistance, obs.max_range);
  out.detections.clear();
  for (Detection d : obs.detections)
    if (shift_detection(d, shift, reportable_categories, rng)) out.detections.push_back(std::move(d));
  inject_false_positives(out.detections, shift, obs.max_range, reportable_categories, rng);
  return out;
}

Observation observe(const Scene& scene, const AgentState& state, const CameraModel& camera,
                    const std::string& target, bool collided) {
  Observation obs;
  obs.rays = cast_rays(scene, state, camera);
  Rng unused;
  obs.detections = emulate_detections(scene, visible_objects(scene, state, camera, camera.max_range),
                                      camera, DomainShift::identity(), {}, unused);
  obs.target = target;
  obs.last_action_collided = collided;
  obs.max_range = camera.max_range;
  return obs;
}

}  // namespace navth
