#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "navth/geometry.hpp"

namespace navth {

inline constexpr double kDefaultWidth = 8.8;
inline constexpr double kDefaultDepth = 3.9;
inline constexpr double kAgentRadius = 0.18;
inline constexpr double kObjectRadius = 0.1;
inline constexpr double kDefaultWallThickness = 0.1;

/// Axis-aligned wall segment; the blocked region is the segment swept by
/// half the thickness on every side.
struct Wall {
  Vec2 a;
  Vec2 b;
  double thickness = kDefaultWallThickness;

  Rect footprint() const {
    const double h = 0.5 * thickness;
    return {{std::min(a.x, b.x) - h, std::min(a.y, b.y) - h},
            {std::max(a.x, b.x) + h, std::max(a.y, b.y) + h}};
  }
  friend bool operator==(const Wall&, const Wall&) = default;
};

struct WallLayout {
  std::string id;
  std::vector<Wall> walls;
};

struct FurnitureCategory {
  std::string name;
  double min_width, max_width;
  double min_depth, max_depth;
};

enum class HeightClass { floor, surface };

const char* to_string(HeightClass h);
HeightClass height_class_from_string(const std::string& s);

struct ObjectCategory {
  std::string name;
  HeightClass height = HeightClass::surface;
  bool target = false;
};

/// Layout split membership of the catalog's wall templates.
struct LayoutSplits {
  std::vector<std::string> train_val;
  std::vector<std::string> test_dev;
  std::vector<std::string> test_standard;
};

struct AssetCatalog {
  double width = kDefaultWidth;
  double depth = kDefaultDepth;
  std::vector<WallLayout> layouts;
  std::vector<FurnitureCategory> furniture_categories;
  std::vector<ObjectCategory> object_categories;
  LayoutSplits splits;

  const WallLayout& layout(const std::string& id) const;
  bool has_layout(const std::string& id) const;
  std::vector<std::string> target_categories() const;
  const ObjectCategory* object_category(const std::string& name) const;
  int object_index(const std::string& name) const;
  bool is_target(const std::string& name) const;

  /// Throws InvariantError on category-count or subset violations.
  void validate() const;
};

/// The built-in catalog: 22 wall templates (15 / 2 / 5 split), 11 furniture
/// categories, 32 object categories of which 14 are targets.
const AssetCatalog& default_catalog();

struct FurniturePiece {
  std::string category;
  Rect footprint;
  friend bool operator==(const FurniturePiece&, const FurniturePiece&) = default;
};

struct PlacedObject {
  std::string category;
  Vec2 position;
  HeightClass height = HeightClass::surface;
  friend bool operator==(const PlacedObject&, const PlacedObject&) = default;
};

struct Scene {
  std::string id;
  std::uint64_t seed = 0;
  double width = kDefaultWidth;
  double depth = kDefaultDepth;
  std::vector<Wall> walls;
  std::vector<FurniturePiece> furniture;
  std::vector<PlacedObject> objects;
  std::string layout_id;

  Rect bounds() const { return {{0.0, 0.0}, {width, depth}}; }
  bool has_category(const std::string& category) const;
  /// Index of the furniture piece an object rests on, or -1.
  int support_of(std::size_t object_index) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Row-major boolean occupancy grid over the scene bounds; true = blocked.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int cols, int rows, double resolution)
      : cols_(cols), rows_(rows), resolution_(resolution),
        blocked_(static_cast<std::size_t>(cols) * rows, false) {}

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double resolution() const { return resolution_; }
  bool in_range(int c, int r) const { return c >= 0 && r >= 0 && c < cols_ && r < rows_; }
  bool blocked(int c, int r) const { return !in_range(c, r) || blocked_[index(c, r)]; }
  bool free(int c, int r) const { return !blocked(c, r); }
  void set_blocked(int c, int r, bool v) { blocked_[index(c, r)] = v; }
  std::size_t index(int c, int r) const { return static_cast<std::size_t>(r) * cols_ + c; }
  Vec2 cell_center(int c, int r) const {
    return {(c + 0.5) * resolution_, (r + 0.5) * resolution_};
  }
  /// Cell containing a point (may be out of range).
  std::pair<int, int> cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / resolution_)),
            static_cast<int>(std::floor(p.y / resolution_))};
  }
  std::size_t free_count() const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int cols_ = 0;
  int rows_ = 0;
  double resolution_ = 0.25;
  std::vector<bool> blocked_;
};

/// Blocks every cell whose area overlaps a wall or furniture footprint
/// inflated by `agent_radius`; the scene boundary counts as a wall.
OccupancyGrid occupancy_grid(const Scene& scene, double resolution,
                             double agent_radius = kAgentRadius);

/// Connected components (4-neighbour) of the free cells; returns a label per
/// cell (-1 for blocked) and the component count.
std::pair<std::vector<int>, int> free_components(const OccupancyGrid& grid);

/// True when a point lies outside every inflated obstacle and inside the
/// inflated boundary.
bool point_is_free(const Scene& scene, Vec2 p, double agent_radius = kAgentRadius);

struct GenerationConfig {
  double width = kDefaultWidth;
  double depth = kDefaultDepth;
  int min_furniture = 5;
  int max_furniture = 9;
  int min_background_objects = 8;
  int max_background_objects = 16;
  int max_attempts = 1000;
  double grid_resolution = 0.25;
  /// Coverage check: every target needs a free cell and heading from which it
  /// is visible within this distance under this field of view.
  double coverage_distance = 1.0;
  double coverage_fov = 42.5;
};

/// Deterministic in (layout_id, seed, config). Throws GenerationError when
/// placement exhausts `max_attempts`.
Scene generate_scene(const AssetCatalog& catalog, const std::string& layout_id,
                     std::uint64_t seed, const GenerationConfig& config = {});

/// Checks every Scene invariant against the catalog; throws InvariantError.
void validate_scene(const Scene& scene, const AssetCatalog& catalog,
                    const GenerationConfig& config = {});

enum class SplitName { train, val, test_dev, test_standard };
const char* to_string(SplitName s);
SplitName split_from_string(const std::string& s);

struct SceneSplit {
  SplitName name = SplitName::train;
  std::vector<std::string> scene_ids;
};

struct SplitSizes {
  int train = 60;
  int val = 15;
  int test_dev = 4;
  int test_standard = 10;
};

struct Corpus {
  std::vector<Scene> scenes;
  std::vector<SceneSplit> splits;

  const Scene& scene(const std::string& id) const;
  std::vector<const Scene*> split_scenes(SplitName name) const;
};

/// Generates a full corpus. Train and val share the train/val layouts; each
/// scene draws an instance seed unique across the corpus.
Corpus generate_corpus(const AssetCatalog& catalog, const SplitSizes& sizes,
                       std::uint64_t base_seed, const GenerationConfig& config = {});

/// Throws InvariantError if a layout or instance seed is shared by scenes in
/// two different splits (train and val count as one layout pool).
void check_split_hygiene(const Corpus& corpus);

struct Heatmap {
  int cols = 0;
  int rows = 0;
  double resolution = 0.25;
  std::vector<double> values;  // row-major, each in [0, 1]
  double at(int c, int r) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

struct SceneStats {
  std::size_t scene_count = 0;
  std::size_t object_count = 0;
  std::map<std::string, std::size_t> object_category_counts;
  std::map<std::string, std::size_t> furniture_category_counts;
  Heatmap target_objects;
  Heatmap background_objects;
  Heatmap furniture;
  Heatmap walls;
};

/// Category tallies and per-cell occupancy frequencies (fraction of scenes in
/// which the cell holds the entity kind). Requires a non-empty list.
SceneStats scene_stats(const std::vector<const Scene*>& scenes, const AssetCatalog& catalog,
                       double resolution = 0.25);

}  // namespace navth
