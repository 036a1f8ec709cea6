#include "navth/io.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <ostream>

#include "navth/error.hpp"

namespace navth {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

double require_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

namespace {

bool require_bool(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_boolean()) throw SchemaError(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

const json& require_array(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw SchemaError(path + "." + key, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void check_schema(const json& doc, const char* expected) {
  const std::string got = require_string(doc, "schema", "$");
  if (got != expected)
    throw SchemaError("$.schema", "expected '" + std::string(expected) + "', got '" + got + "'");
}

}  // namespace

json scene_to_json(const Scene& scene) {
  json walls = json::array(), furniture = json::array(), objects = json::array();
  for (const auto& w : scene.walls) walls.push_back({{"a", vec(w.a)}, {"b", vec(w.b)}, {"thickness", w.thickness}});
  for (const auto& f : scene.furniture)
    furniture.push_back({{"category", f.category}, {"min", vec(f.footprint.min)}, {"max", vec(f.footprint.max)}});
  for (const auto& o : scene.objects)
    objects.push_back({{"category", o.category}, {"position", vec(o.position)}, {"height", to_string(o.height)}});
  return {{"schema", kSceneSchema},
          {"id", scene.id},
          {"seed", scene.seed},
          {"bounds", {{"width", scene.width}, {"depth", scene.depth}}},
          {"walls", walls},
          {"furniture", furniture},
          {"objects", objects},
          {"layout_id", scene.layout_id}};
}

Scene scene_from_json(const json& doc, const AssetCatalog& catalog) {
  check_schema(doc, kSceneSchema);
  Scene s;
  s.id = require_string(doc, "id", "$");
  const json& seed = require(doc, "seed", "$");
  if (!seed.is_number_integer()) throw SchemaError("$.seed", "expected an integer");
  s.seed = seed.get<std::uint64_t>();
  const json& bounds = require(doc, "bounds", "$");
  s.width = require_number(bounds, "width", "$.bounds");
  s.depth = require_number(bounds, "depth", "$.bounds");
  const auto& walls = require_array(doc, "walls", "$");
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const std::string p = "$.walls[" + std::to_string(i) + "]";
    s.walls.push_back({vec_from(walls[i], "a", p), vec_from(walls[i], "b", p),
                       require_number(walls[i], "thickness", p)});
  }
  const auto& furniture = require_array(doc, "furniture", "$");
  for (std::size_t i = 0; i < furniture.size(); ++i) {
    const std::string p = "$.furniture[" + std::to_string(i) + "]";
    s.furniture.push_back({require_string(furniture[i], "category", p),
                           {vec_from(furniture[i], "min", p), vec_from(furniture[i], "max", p)}});
  }
  const auto& objects = require_array(doc, "objects", "$");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string p = "$.objects[" + std::to_string(i) + "]";
    const std::string h = require_string(objects[i], "height", p);
    if (h != "floor" && h != "surface") throw SchemaError(p + ".height", "expected 'floor' or 'surface'");
    s.objects.push_back({require_string(objects[i], "category", p), vec_from(objects[i], "position", p),
                         height_class_from_string(h)});
  }
  s.layout_id = require_string(doc, "layout_id", "$");
  validate_scene(s, catalog);
  return s;
}

std::string save_scene(const Scene& scene) { return scene_to_json(scene).dump(2); }

Scene load_scene(const std::string& text, const AssetCatalog& catalog) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed document: ") + e.what());
  }
  return scene_from_json(doc, catalog);
}

json catalog_to_json(const AssetCatalog& c) {
  json layouts = json::array(), furniture = json::array(), objects = json::array();
  for (const auto& l : c.layouts) {
    json walls = json::array();
    for (const auto& w : l.walls) walls.push_back({{"a", vec(w.a)}, {"b", vec(w.b)}, {"thickness", w.thickness}});
    layouts.push_back({{"id", l.id}, {"walls", walls}});
  }
  for (const auto& f : c.furniture_categories)
    furniture.push_back({{"name", f.name},
                         {"width", {f.min_width, f.max_width}},
                         {"depth", {f.min_depth, f.max_depth}}});
  for (const auto& o : c.object_categories)
    objects.push_back({{"name", o.name}, {"height", to_string(o.height)}, {"target", o.target}});
  return {{"schema", kCatalogSchema},
          {"bounds", {{"width", c.width}, {"depth", c.depth}}},
          {"layouts", layouts},
          {"splits",
           {{"train_val", c.splits.train_val},
            {"test_dev", c.splits.test_dev},
            {"test_standard", c.splits.test_standard}}},
          {"furniture_categories", furniture},
          {"object_categories", objects}};
}

AssetCatalog catalog_from_json(const json& doc) {
  check_schema(doc, kCatalogSchema);
  AssetCatalog c;
  const json& bounds = require(doc, "bounds", "$");
  c.width = require_number(bounds, "width", "$.bounds");
  c.depth = require_number(bounds, "depth", "$.bounds");
  const auto& layouts = require_array(doc, "layouts", "$");
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    const std::string p = "$.layouts[" + std::to_string(i) + "]";
    WallLayout l{require_string(layouts[i], "id", p), {}};
    const auto& walls = require_array(layouts[i], "walls", p);
    for (std::size_t k = 0; k < walls.size(); ++k) {
      const std::string q = p + ".walls[" + std::to_string(k) + "]";
      l.walls.push_back({vec_from(walls[k], "a", q), vec_from(walls[k], "b", q),
                         require_number(walls[k], "thickness", q)});
    }
    c.layouts.push_back(std::move(l));
  }
  const json& splits = require(doc, "splits", "$");
  auto ids = [&](const char* key) {
    const auto& a = require_array(splits, key, "$.splits");
    std::vector<std::string> out;
    for (const auto& v : a) out.push_back(v.get<std::string>());
    return out;
  };
  c.splits = {ids("train_val"), ids("test_dev"), ids("test_standard")};
  const auto& furniture = require_array(doc, "furniture_categories", "$");
  for (std::size_t i = 0; i < furniture.size(); ++i) {
    const std::string p = "$.furniture_categories[" + std::to_string(i) + "]";
    const json& w = require(furniture[i], "width", p);
    const json& d = require(furniture[i], "depth", p);
    if (!w.is_array() || w.size() != 2) throw SchemaError(p + ".width", "expected [min, max]");
    if (!d.is_array() || d.size() != 2) throw SchemaError(p + ".depth", "expected [min, max]");
    c.furniture_categories.push_back({require_string(furniture[i], "name", p), w[0].get<double>(),
                                      w[1].get<double>(), d[0].get<double>(), d[1].get<double>()});
  }
  const auto& objects = require_array(doc, "object_categories", "$");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string p = "$.object_categories[" + std::to_string(i) + "]";
    c.object_categories.push_back({require_string(objects[i], "name", p),
                                   height_class_from_string(require_string(objects[i], "height", p)),
                                   require_bool(objects[i], "target", p)});
  }
  c.validate();
  return c;
}

json pose_to_json(const AgentState& s) {
  return {{"x", s.position.x}, {"y", s.position.y}, {"heading", s.heading}, {"pitch", s.pitch}};
}

AgentState pose_from_json(const json& j, const std::string& path) {
  return {{require_number(j, "x", path), require_number(j, "y", path)},
          require_number(j, "heading", path),
          require_number(j, "pitch", path)};
}

namespace {

std::string hit_label(const RayHit& r) {
  if (r.kind == HitKind::furniture || r.kind == HitKind::object)
    return std::string(to_string(r.kind)) + ":" + r.category;
  return to_string(r.kind);
}

RayHit hit_from_label(double distance, const std::string& label, const std::string& path) {
  if (label == "none") return {distance, HitKind::none, {}};
  if (label == "wall") return {distance, HitKind::wall, {}};
  const auto colon = label.find(':');
  if (colon != std::string::npos) {
    const std::string kind = label.substr(0, colon);
    if (kind == "furniture") return {distance, HitKind::furniture, label.substr(colon + 1)};
    if (kind == "object") return {distance, HitKind::object, label.substr(colon + 1)};
  }
  throw SchemaError(path, "unknown hit class '" + label + "'");
}

}  // namespace

json observation_to_json(const Observation& obs) {
  json distances = json::array(), hits = json::array(), detections = json::array();
  for (const auto& r : obs.rays) {
    distances.push_back(r.distance);
    hits.push_back(hit_label(r));
  }
  for (const auto& d : obs.detections)
    detections.push_back({{"category", d.category},
                          {"confidence", d.confidence},
                          {"bearing_bucket", d.bearing_bucket},
                          {"distance", d.distance}});
  return {{"schema", kObservationSchema},
          {"ray_distance", distances},
          {"ray_hit", hits},
          {"max_range", obs.max_range},
          {"detections", detections},
          {"target", obs.target},
          {"last_action_collided", obs.last_action_collided}};
}

Observation observation_from_json(const json& doc) {
  check_schema(doc, kObservationSchema);
  Observation obs;
  const auto& distances = require_array(doc, "ray_distance", "$");
  const auto& hits = require_array(doc, "ray_hit", "$");
  if (distances.size() != hits.size()) throw SchemaError("$.ray_hit", "length differs from ray_distance");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const std::string p = "$.ray_hit[" + std::to_string(i) + "]";
    if (!distances[i].is_number()) throw SchemaError("$.ray_distance[" + std::to_string(i) + "]", "expected a number");
    if (!hits[i].is_string()) throw SchemaError(p, "expected a string");
    obs.rays.push_back(hit_from_label(distances[i].get<double>(), hits[i].get<std::string>(), p));
  }
  obs.max_range = require_number(doc, "max_range", "$");
  const auto& dets = require_array(doc, "detections", "$");
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string p = "$.detections[" + std::to_string(i) + "]";
    obs.detections.push_back({require_string(dets[i], "category", p), require_number(dets[i], "confidence", p),
                              static_cast<int>(require_number(dets[i], "bearing_bucket", p)),
                              require_number(dets[i], "distance", p)});
  }
  obs.target = require_string(doc, "target", "$");
  obs.last_action_collided = require_bool(doc, "last_action_collided", "$");
  return obs;
}

json result_to_json(const EpisodeResult& r) {
  return {{"success", r.success},
          {"shortest_path_m", r.shortest_path_m},
          {"path_m", r.path_m},
          {"actions", r.actions},
          {"collisions", r.collisions},
          {"bucket", r.bucket ? json(to_string(*r.bucket)) : json(nullptr)},
          {"target", r.target_category},
          {"scene_id", r.scene_id}};
}

EpisodeResult result_from_json(const json& j) {
  EpisodeResult r;
  r.success = static_cast<int>(require_number(j, "success", "$"));
  if (r.success != 0 && r.success != 1) throw SchemaError("$.success", "expected 0 or 1");
  r.shortest_path_m = require_number(j, "shortest_path_m", "$");
  r.path_m = require_number(j, "path_m", "$");
  r.actions = static_cast<int>(require_number(j, "actions", "$"));
  r.collisions = static_cast<int>(require_number(j, "collisions", "$"));
  const json& b = require(j, "bucket", "$");
  if (!b.is_null()) r.bucket = bucket_from_string(b.get<std::string>());
  r.target_category = require_string(j, "target", "$");
  r.scene_id = require_string(j, "scene_id", "$");
  return r;
}

void write_results(std::ostream& os, const std::vector<EpisodeResult>& results) {
  os << json{{"schema", kResultsSchema}}.dump() << '\n';
  for (const auto& r : results) os << result_to_json(r).dump() << '\n';
}

std::vector<EpisodeResult> read_results(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("$", "empty results file");
  check_schema(json::parse(line), kResultsSchema);
  std::vector<EpisodeResult> out;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(result_from_json(json::parse(line)));
  return out;
}

TrajectoryFile trajectory_of(const EpisodeState& ep) {
  return {ep.scene ? ep.scene->id : std::string{}, ep.spec.target_category, ep.start, ep.trajectory,
          ep.outcome};
}

void write_trajectory(std::ostream& os, const TrajectoryFile& traj) {
  os << json{{"schema", kTrajectorySchema},
             {"scene_id", traj.scene_id},
             {"target", traj.target},
             {"start", pose_to_json(traj.start)}}
            .dump()
     << '\n';
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& e = traj.steps[i];
    const bool last = i + 1 == traj.steps.size();
    os << json{{"t", i + 1},
               {"pose", pose_to_json(e.state)},
               {"action", to_string(e.action)},
               {"reward", e.reward},
               {"collided", e.collided},
               {"displacement", e.displacement},
               {"outcome", to_string(last ? traj.outcome : Outcome::running)}}
              .dump()
       << '\n';
  }
}

TrajectoryFile read_trajectory(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("$", "empty trajectory file");
  const json header = json::parse(line);
  check_schema(header, kTrajectorySchema);
  TrajectoryFile traj;
  traj.scene_id = require_string(header, "scene_id", "$");
  traj.target = require_string(header, "target", "$");
  traj.start = pose_from_json(require(header, "start", "$"), "$.start");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string p = "$[" + std::to_string(traj.steps.size() + 1) + "]";
    TrajectoryEntry e;
    e.state = pose_from_json(require(j, "pose", p), p + ".pose");
    e.action = action_from_string(require_string(j, "action", p));
    e.reward = require_number(j, "reward", p);
    e.collided = require_bool(j, "collided", p);
    e.displacement = j.value("displacement", 0.0);
    traj.outcome = outcome_from_string(require_string(j, "outcome", p));
    traj.steps.push_back(e);
  }
  return traj;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "scenes");
  json splits = json::object();
  for (const auto& sp : corpus.splits) splits[to_string(sp.name)] = sp.scene_ids;
  for (const auto& s : corpus.scenes) {
    std::ofstream os(root / "scenes" / (s.id + ".json"));
    if (!os) throw Error("unwritable_path", "cannot write scene " + s.id + " under " + dir);
    os << save_scene(s) << '\n';
  }
  std::ofstream os(root / "corpus.json");
  if (!os) throw Error("unwritable_path", "cannot write " + (root / "corpus.json").string());
  os << json{{"schema", kCorpusSchema}, {"splits", splits}}.dump(2) << '\n';
}

Corpus load_corpus(const std::string& dir, const AssetCatalog& catalog) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream is(root / "corpus.json");
  if (!is) throw PreconditionError("missing_corpus", "no corpus.json under " + dir);
  const json doc = json::parse(is);
  check_schema(doc, kCorpusSchema);
  const json& splits = require(doc, "splits", "$");
  if (!splits.is_object()) throw SchemaError("$.splits", "expected an object");
  Corpus corpus;
  for (auto it = splits.begin(); it != splits.end(); ++it) {
    SceneSplit sp{split_from_string(it.key()), {}};
    for (const auto& id : it.value()) {
      const std::string sid = id.get<std::string>();
      std::ifstream ss(root / "scenes" / (sid + ".json"));
      if (!ss) throw PreconditionError("missing_scene", "scene file for " + sid + " not found");
      std::stringstream buf;
      buf << ss.rdbuf();
      Scene scene = load_scene(buf.str(), catalog);
      if (scene.id != sid) throw SchemaError("$.splits." + it.key(), "scene file id differs: " + scene.id);
      corpus.scenes.push_back(std::move(scene));
      sp.scene_ids.push_back(sid);
    }
    corpus.splits.push_back(std::move(sp));
  }
  check_split_hygiene(corpus);
  return corpus;
}

}  // namespace navth
