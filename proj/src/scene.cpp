#include "navth/scene.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "navth/error.hpp"
#include "navth/random.hpp"
#include "navth/world.hpp"

namespace navth {

bool Scene::has_category(const std::string& category) const {
  return std::any_of(objects.begin(), objects.end(),
                     [&](const PlacedObject& o) { return o.category == category; });
}

int Scene::support_of(std::size_t object_index) const {
  const auto& o = objects.at(object_index);
  if (o.height != HeightClass::surface) return -1;
  for (std::size_t i = 0; i < furniture.size(); ++i)
    if (furniture[i].footprint.contains(o.position)) return static_cast<int>(i);
  return -1;
}

std::size_t OccupancyGrid::free_count() const {
  return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), false));
}

OccupancyGrid occupancy_grid(const Scene& scene, double resolution, double agent_radius) {
  if (!(resolution > 0.0)) throw PreconditionError("invalid_resolution", "resolution must be > 0");
  const int cols = static_cast<int>(std::floor(scene.width / resolution + 1e-9));
  const int rows = static_cast<int>(std::floor(scene.depth / resolution + 1e-9));
  OccupancyGrid grid(cols, rows, resolution);

  std::vector<Rect> inflated;
  inflated.reserve(scene.walls.size() + scene.furniture.size());
  for (const auto& w : scene.walls) inflated.push_back(w.footprint().inflated(agent_radius));
  for (const auto& f : scene.furniture) inflated.push_back(f.footprint.inflated(agent_radius));
  const Rect inner{{agent_radius, agent_radius},
                   {scene.width - agent_radius, scene.depth - agent_radius}};

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Rect cell{{c * resolution, r * resolution}, {(c + 1) * resolution, (r + 1) * resolution}};
      bool blocked = cell.min.x < inner.min.x || cell.min.y < inner.min.y ||
                     cell.max.x > inner.max.x || cell.max.y > inner.max.y;
      for (std::size_t i = 0; !blocked && i < inflated.size(); ++i)
        blocked = inflated[i].overlaps(cell);
      grid.set_blocked(c, r, blocked);
    }
  }
  return grid;
}

std::pair<std::vector<int>, int> free_components(const OccupancyGrid& grid) {
  std::vector<int> label(static_cast<std::size_t>(grid.cols()) * grid.rows(), -1);
  int count = 0;
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (grid.blocked(c, r) || label[grid.index(c, r)] >= 0) continue;
      label[grid.index(c, r)] = count;
      queue.push_back({c, r});
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        constexpr int dx[] = {1, -1, 0, 0};
        constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k], ny = y + dy[k];
          if (grid.free(nx, ny) && label[grid.index(nx, ny)] < 0) {
            label[grid.index(nx, ny)] = count;
            queue.push_back({nx, ny});
          }
        }
      }
      ++count;
    }
  }
  return {std::move(label), count};
}

bool point_is_free(const Scene& scene, Vec2 p, double agent_radius) {
  if (p.x < agent_radius || p.y < agent_radius || p.x > scene.width - agent_radius ||
      p.y > scene.depth - agent_radius)
    return false;
  for (const auto& w : scene.walls)
    if (w.footprint().inflated(agent_radius).contains_strict(p)) return false;
  for (const auto& f : scene.furniture)
    if (f.footprint.inflated(agent_radius).contains_strict(p)) return false;
  return true;
}

namespace {

const std::map<std::string, std::vector<std::string>>& support_affinity() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"Television", {"TVStand", "Dresser", "Desk"}},
      {"Laptop", {"Desk", "DiningTable", "CoffeeTable"}},
      {"Pillow", {"Sofa", "Bed", "ArmChair"}},
  };
  return m;
}

class SceneBuilder {
 public:
  SceneBuilder(const AssetCatalog& catalog, const GenerationConfig& config, Scene& scene, Rng& rng)
      : catalog_(catalog), config_(config), scene_(scene), rng_(rng) {}

  void place_furniture() {
    const int target_count = rng_.uniform_int(config_.min_furniture, config_.max_furniture);
    const std::size_t base_free = occupancy_grid(scene_, config_.grid_resolution).free_count();
    while (static_cast<int>(scene_.furniture.size()) < target_count) {
      spend("furniture placement");
      if (attempts_ >= config_.max_attempts / 2 && !scene_.furniture.empty()) {
        // Settle for fewer pieces rather than exhausting the budget.
        if (static_cast<int>(scene_.furniture.size()) >= config_.min_furniture) break;
      }
      const auto& cat = catalog_.furniture_categories[rng_.below(catalog_.furniture_categories.size())];
      double w = rng_.uniform(cat.min_width, cat.max_width);
      double d = rng_.uniform(cat.min_depth, cat.max_depth);
      if (rng_.bernoulli(0.5)) std::swap(w, d);
      if (w + 0.1 > scene_.width || d + 0.1 > scene_.depth) {
        last_violation_ = "furniture footprint exceeds bounds";
        continue;
      }
      Vec2 lo{rng_.uniform(0.05, scene_.width - w - 0.05),
              rng_.uniform(0.05, scene_.depth - d - 0.05)};
      if (rng_.bernoulli(0.8)) lo = snap_to_wall({lo, {lo.x + w, lo.y + d}}, static_cast<int>(rng_.below(4)));
      const FurniturePiece piece{cat.name, {lo, {lo.x + w, lo.y + d}}};
      const Rect padded = piece.footprint.inflated(0.05);
      bool clash = false;
      for (const auto& wall : scene_.walls) clash = clash || wall.footprint().overlaps(padded);
      for (const auto& f : scene_.furniture) clash = clash || f.footprint.overlaps(padded);
      if (clash) {
        last_violation_ = "furniture overlaps existing geometry";
        continue;
      }
      scene_.furniture.push_back(piece);
      const auto grid = occupancy_grid(scene_, config_.grid_resolution);
      const auto [labels, components] = free_components(grid);
      if (components != 1 || grid.free_count() * 2 < base_free) {
        last_violation_ = "free space must stay a single connected component";
        scene_.furniture.pop_back();
      }
    }
  }

  void place_objects() {
    grid_ = occupancy_grid(scene_, config_.grid_resolution);
    for (const auto& cat : catalog_.object_categories)
      if (cat.target) place_object(cat, true);
    std::vector<const ObjectCategory*> background;
    for (const auto& cat : catalog_.object_categories)
      if (!cat.target) background.push_back(&cat);
    const int n = rng_.uniform_int(config_.min_background_objects, config_.max_background_objects);
    for (int i = 0; i < n; ++i) place_object(*background[rng_.below(background.size())], false);
  }

 private:
  // Slides a footprint in direction `side` (0 -x, 1 +x, 2 -y, 3 +y) until it
  // sits 6 cm from the first wall or the boundary; returns the new min corner.
  Vec2 snap_to_wall(const Rect& r, int side) const {
    constexpr double gap = 0.06;
    const bool along_x = side < 2;
    double limit = side == 0 || side == 2 ? 0.0 : (along_x ? scene_.width : scene_.depth);
    for (const auto& wall : scene_.walls) {
      const Rect f = wall.footprint();
      const bool facing = along_x ? (f.min.y < r.max.y && r.min.y < f.max.y)
                                  : (f.min.x < r.max.x && r.min.x < f.max.x);
      if (!facing) continue;
      switch (side) {
        case 0: if (f.max.x <= r.min.x) limit = std::max(limit, f.max.x); break;
        case 1: if (f.min.x >= r.max.x) limit = std::min(limit, f.min.x); break;
        case 2: if (f.max.y <= r.min.y) limit = std::max(limit, f.max.y); break;
        default: if (f.min.y >= r.max.y) limit = std::min(limit, f.min.y); break;
      }
    }
    switch (side) {
      case 0: return {limit + gap, r.min.y};
      case 1: return {limit - gap - r.width(), r.min.y};
      case 2: return {r.min.x, limit + gap};
      default: return {r.min.x, limit - gap - r.depth()};
    }
  }

  void spend(const char* what) {
    if (++attempts_ > config_.max_attempts)
      throw GenerationError(std::string(what) + " exhausted " + std::to_string(config_.max_attempts) +
                            " attempts; last violated constraint: " + last_violation_);
  }

  std::vector<std::size_t> supports_for(const std::string& category, bool any) const {
    std::vector<std::size_t> all(scene_.furniture.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto it = support_affinity().find(category);
    if (any || it == support_affinity().end()) return all;
    std::vector<std::size_t> preferred;
    for (std::size_t i : all)
      if (std::find(it->second.begin(), it->second.end(), scene_.furniture[i].category) !=
          it->second.end())
        preferred.push_back(i);
    return preferred.empty() ? all : preferred;
  }

  bool floor_position_ok(Vec2 p) const {
    if (p.x < 0.15 || p.y < 0.15 || p.x > scene_.width - 0.15 || p.y > scene_.depth - 0.15)
      return false;
    for (const auto& w : scene_.walls)
      if (w.footprint().inflated(kObjectRadius).contains(p)) return false;
    for (const auto& f : scene_.furniture)
      if (f.footprint.inflated(kObjectRadius).contains(p)) return false;
    return true;
  }

  bool covered(std::size_t object_index) const {
    const CameraModel camera{config_.coverage_fov, 2, config_.coverage_distance};
    const Vec2 target = scene_.objects[object_index].position;
    for (int r = 0; r < grid_.rows(); ++r) {
      for (int c = 0; c < grid_.cols(); ++c) {
        if (grid_.blocked(c, r)) continue;
        const Vec2 p = grid_.cell_center(c, r);
        if (distance(p, target) > config_.coverage_distance) continue;
        for (int h = 0; h < 8; ++h) {
          const AgentState s{p, 45.0 * h, 0.0};
          for (const auto& v : visible_objects(scene_, s, camera, config_.coverage_distance))
            if (v.index == object_index) return true;
        }
      }
    }
    return false;
  }

  void place_object(const ObjectCategory& cat, bool needs_coverage) {
    attempts_ = 0;
    for (;;) {
      spend(needs_coverage ? "target placement" : "object placement");
      PlacedObject obj{cat.name, {}, cat.height};
      if (cat.height == HeightClass::surface) {
        const auto candidates = supports_for(cat.name, attempts_ > config_.max_attempts / 4);
        if (candidates.empty()) {
          last_violation_ = "no furniture surface available for " + cat.name;
          continue;
        }
        const Rect fp = scene_.furniture[candidates[rng_.below(candidates.size())]].footprint;
        const double ix = std::min(0.1, fp.width() / 4), iy = std::min(0.1, fp.depth() / 4);
        obj.position = {rng_.uniform(fp.min.x + ix, fp.max.x - ix),
                        rng_.uniform(fp.min.y + iy, fp.max.y - iy)};
      } else {
        obj.position = {rng_.uniform(0.15, scene_.width - 0.15), rng_.uniform(0.15, scene_.depth - 0.15)};
        if (!floor_position_ok(obj.position)) {
          last_violation_ = "floor object must lie in free space";
          continue;
        }
      }
      scene_.objects.push_back(obj);
      if (needs_coverage && !covered(scene_.objects.size() - 1)) {
        last_violation_ = "target " + cat.name + " must be visible from a navigable cell";
        scene_.objects.pop_back();
        continue;
      }
      return;
    }
  }

  const AssetCatalog& catalog_;
  const GenerationConfig& config_;
  Scene& scene_;
  Rng& rng_;
  OccupancyGrid grid_;
  int attempts_ = 0;
  std::string last_violation_ = "none";
};

}  // namespace

Scene generate_scene(const AssetCatalog& catalog, const std::string& layout_id, std::uint64_t seed,
                     const GenerationConfig& config) {
  const WallLayout& layout = catalog.layout(layout_id);
  Scene scene;
  scene.id = layout_id + "_" + std::to_string(seed);
  scene.seed = seed;
  scene.width = config.width;
  scene.depth = config.depth;
  scene.walls = layout.walls;
  scene.layout_id = layout_id;

  const auto [labels, components] = free_components(occupancy_grid(scene, config.grid_resolution));
  if (components != 1)
    throw GenerationError("wall layout " + layout_id + " leaves " + std::to_string(components) +
                          " free components");

  Rng rng(mix_seed(seed, hash_string(layout_id)));
  SceneBuilder builder(catalog, config, scene, rng);
  builder.place_furniture();
  builder.place_objects();
  return scene;
}

void validate_scene(const Scene& scene, const AssetCatalog& catalog, const GenerationConfig& config) {
  if (!(scene.width > 0.0) || !(scene.depth > 0.0)) throw InvariantError("bounds must be positive");
  for (std::size_t i = 0; i < scene.walls.size(); ++i)
    if (!(scene.walls[i].thickness >= 0.0) ||
        (scene.walls[i].a.x != scene.walls[i].b.x && scene.walls[i].a.y != scene.walls[i].b.y))
      throw InvariantError("wall " + std::to_string(i) + " must be axis-aligned with thickness >= 0");
  for (std::size_t i = 0; i < scene.furniture.size(); ++i) {
    const auto& f = scene.furniture[i];
    if (!(f.footprint.max.x > f.footprint.min.x) || !(f.footprint.max.y > f.footprint.min.y))
      throw InvariantError("furniture " + std::to_string(i) + " has an empty footprint");
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    const std::string where = "object " + std::to_string(i) + " (" + o.category + ")";
    if (!catalog.object_category(o.category))
      throw InvariantError(where + " has a category unknown to the catalog");
    if (!scene.bounds().contains(o.position)) throw InvariantError(where + " lies outside the bounds");
    for (const auto& w : scene.walls)
      if (w.footprint().contains(o.position)) throw InvariantError(where + " lies inside a wall");
    const bool on_furniture = std::any_of(scene.furniture.begin(), scene.furniture.end(),
                                          [&](const auto& f) { return f.footprint.contains(o.position); });
    if (o.height == HeightClass::surface && !on_furniture)
      throw InvariantError(where + " is a surface object but rests on no furniture");
    if (o.height == HeightClass::floor && on_furniture)
      throw InvariantError(where + " is a floor object inside a furniture footprint");
  }
  for (const auto& t : catalog.target_categories())
    if (!scene.has_category(t)) throw InvariantError("target category " + t + " is missing");
  const auto grid = occupancy_grid(scene, config.grid_resolution);
  const auto [labels, components] = free_components(grid);
  if (components != 1)
    throw InvariantError("free space has " + std::to_string(components) +
                         " connected components, expected 1");
}

const char* to_string(SplitName s) {
  switch (s) {
    case SplitName::train: return "train";
    case SplitName::val: return "val";
    case SplitName::test_dev: return "test-dev";
    case SplitName::test_standard: return "test-standard";
  }
  return "?";
}

SplitName split_from_string(const std::string& s) {
  if (s == "train") return SplitName::train;
  if (s == "val") return SplitName::val;
  if (s == "test-dev") return SplitName::test_dev;
  if (s == "test-standard") return SplitName::test_standard;
  throw PreconditionError("unknown_split", "unknown split '" + s + "'");
}

const Scene& Corpus::scene(const std::string& id) const {
  for (const auto& s : scenes)
    if (s.id == id) return s;
  throw PreconditionError("unknown_scene", "scene '" + id + "' is not in the corpus");
}

std::vector<const Scene*> Corpus::split_scenes(SplitName name) const {
  std::vector<const Scene*> out;
  for (const auto& sp : splits)
    if (sp.name == name)
      for (const auto& id : sp.scene_ids) out.push_back(&scene(id));
  return out;
}

Corpus generate_corpus(const AssetCatalog& catalog, const SplitSizes& sizes, std::uint64_t base_seed,
                       const GenerationConfig& config) {
  Corpus corpus;
  std::set<std::uint64_t> used_seeds;
  auto make = [&](SplitName name, const std::vector<std::string>& layouts, int count, int offset) {
    if (count > 0 && layouts.empty())
      throw PreconditionError("invalid_catalog", std::string("no layouts for split ") + to_string(name));
    SceneSplit split{name, {}};
    for (int i = 0; i < count; ++i) {
      const std::string& layout = layouts[static_cast<std::size_t>(offset + i) % layouts.size()];
      std::uint64_t seed = mix_seed(base_seed, static_cast<std::uint64_t>(name) * 1000003ULL + i);
      while (!used_seeds.insert(seed).second) seed = mix_seed(seed, 1);
      Scene s = generate_scene(catalog, layout, seed, config);
      s.id = std::string(to_string(name)) + "_" + layout + "_" + std::to_string(i);
      split.scene_ids.push_back(s.id);
      corpus.scenes.push_back(std::move(s));
    }
    corpus.splits.push_back(std::move(split));
  };
  // Train and val draw from the same layout pool; val takes the last fifth.
  const int val = sizes.val;
  make(SplitName::train, catalog.splits.train_val, sizes.train, 0);
  make(SplitName::val, catalog.splits.train_val, val, sizes.train);
  make(SplitName::test_dev, catalog.splits.test_dev, sizes.test_dev, 0);
  make(SplitName::test_standard, catalog.splits.test_standard, sizes.test_standard, 0);
  check_split_hygiene(corpus);
  return corpus;
}

void check_split_hygiene(const Corpus& corpus) {
  auto pool = [](SplitName n) { return n == SplitName::val ? SplitName::train : n; };
  std::map<std::string, SplitName> layout_owner;
  std::map<std::uint64_t, SplitName> seed_owner;
  for (const auto& sp : corpus.splits) {
    for (const auto& id : sp.scene_ids) {
      const Scene& s = corpus.scene(id);
      auto [it, fresh] = layout_owner.emplace(s.layout_id, pool(sp.name));
      if (!fresh && it->second != pool(sp.name))
        throw InvariantError("layout " + s.layout_id + " appears in two splits");
      auto [jt, fresh_seed] = seed_owner.emplace(s.seed, sp.name);
      if (!fresh_seed && jt->second != sp.name)
        throw InvariantError("instance seed " + std::to_string(s.seed) + " appears in two splits");
    }
  }
}

SceneStats scene_stats(const std::vector<const Scene*>& scenes, const AssetCatalog& catalog,
                       double resolution) {
  if (scenes.empty()) throw PreconditionError("empty_input", "scene_stats requires at least one scene");
  SceneStats st;
  st.scene_count = scenes.size();
  double width = 0, depth = 0;
  for (const auto* s : scenes) {
    width = std::max(width, s->width);
    depth = std::max(depth, s->depth);
  }
  const int cols = static_cast<int>(std::floor(width / resolution + 1e-9));
  const int rows = static_cast<int>(std::floor(depth / resolution + 1e-9));
  for (Heatmap* h : {&st.target_objects, &st.background_objects, &st.furniture, &st.walls}) {
    h->cols = cols;
    h->rows = rows;
    h->resolution = resolution;
    h->values.assign(static_cast<std::size_t>(cols) * rows, 0.0);
  }
  auto mark_rect = [&](std::vector<char>& m, const Rect& r) {
    for (int y = 0; y < rows; ++y)
      for (int x = 0; x < cols; ++x) {
        const Rect cell{{x * resolution, y * resolution}, {(x + 1) * resolution, (y + 1) * resolution}};
        if (cell.overlaps(r)) m[static_cast<std::size_t>(y) * cols + x] = 1;
      }
  };
  auto mark_point = [&](std::vector<char>& m, Vec2 p) {
    const int x = std::clamp(static_cast<int>(std::floor(p.x / resolution)), 0, cols - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y / resolution)), 0, rows - 1);
    m[static_cast<std::size_t>(y) * cols + x] = 1;
  };
  const std::size_t n = static_cast<std::size_t>(cols) * rows;
  for (const auto* s : scenes) {
    std::vector<char> tgt(n, 0), bg(n, 0), fur(n, 0), wal(n, 0);
    for (const auto& o : s->objects) {
      ++st.object_category_counts[o.category];
      ++st.object_count;
      mark_point(catalog.is_target(o.category) ? tgt : bg, o.position);
    }
    for (const auto& f : s->furniture) {
      ++st.furniture_category_counts[f.category];
      mark_rect(fur, f.footprint);
    }
    for (const auto& w : s->walls) mark_rect(wal, w.footprint());
    for (std::size_t i = 0; i < n; ++i) {
      st.target_objects.values[i] += tgt[i];
      st.background_objects.values[i] += bg[i];
      st.furniture.values[i] += fur[i];
      st.walls.values[i] += wal[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(scenes.size());
  for (Heatmap* h : {&st.target_objects, &st.background_objects, &st.furniture, &st.walls})
    for (double& v : h->values) v *= inv;
  return st;
}

}  // namespace navth
