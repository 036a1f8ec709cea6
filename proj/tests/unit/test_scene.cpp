#include <deque>
#include <set>

#include "doctest.h"
#include "navth/error.hpp"
#include "navth/io.hpp"
#include "navth/scene.hpp"
#include "test_support.hpp"

using namespace navth;

namespace {

// Independent flood fill over the grid: number of 8-bit labelled regions
// reachable by 4-neighbour steps, written without free_components.
int flood_fill_regions(const OccupancyGrid& g) {
  std::vector<char> seen(static_cast<std::size_t>(g.cols() * g.rows()), 0);
  int regions = 0;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c) {
      if (g.blocked(c, r) || seen[g.index(c, r)]) continue;
      ++regions;
      std::vector<std::pair<int, int>> stack{{c, r}};
      seen[g.index(c, r)] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        for (auto [nx, ny] : {std::pair{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}})
          if (g.free(nx, ny) && !seen[g.index(nx, ny)]) {
            seen[g.index(nx, ny)] = 1;
            stack.push_back({nx, ny});
          }
      }
    }
  return regions;
}

}  // namespace

TEST_CASE("default catalog has the required category structure") {
  const auto& c = default_catalog();
  CHECK(c.furniture_categories.size() == 11);
  CHECK(c.object_categories.size() == 32);
  const auto targets = c.target_categories();
  CHECK(targets.size() == 14);
  for (const auto& t : targets) CHECK(c.object_category(t) != nullptr);
  CHECK(c.splits.train_val.size() == 15);
  CHECK(c.splits.test_dev.size() == 2);
  CHECK(c.splits.test_standard.size() == 5);
}

TEST_CASE("every wall template leaves one connected free region") {
  for (const auto& layout : default_catalog().layouts) {
    Scene s;
    s.walls = layout.walls;
    const auto grid = occupancy_grid(s, 0.25);
    INFO(layout.id);
    CHECK(flood_fill_regions(grid) == 1);
  }
}

TEST_CASE("occupancy grid dimensions and boundary") {
  Scene empty;
  const auto grid = occupancy_grid(empty, 0.25);
  CHECK(grid.cols() == 35);
  CHECK(grid.rows() == 15);
  for (int c = 0; c < grid.cols(); ++c) {
    CHECK(grid.blocked(c, 0));
    CHECK(grid.blocked(c, grid.rows() - 1));
  }
  for (int r = 0; r < grid.rows(); ++r) {
    CHECK(grid.blocked(0, r));
    CHECK(grid.blocked(grid.cols() - 1, r));
  }
  for (int r = 1; r + 1 < grid.rows(); ++r)
    for (int c = 1; c + 1 < grid.cols(); ++c) CHECK(grid.free(c, r));
  CHECK_THROWS_AS(occupancy_grid(empty, 0.0), PreconditionError);
}

TEST_CASE("a bisecting wall splits free space into two regions") {
  Scene s;
  s.walls.push_back({{4.4, 0.0}, {4.4, s.depth}, 0.1});
  const auto grid = occupancy_grid(s, 0.25);
  CHECK(flood_fill_regions(grid) == 2);
  CHECK(free_components(grid).second == 2);
}

TEST_CASE("generation is deterministic and modular") {
  const auto& cat = default_catalog();
  const Scene a = generate_scene(cat, "L01", 7);
  const Scene b = generate_scene(cat, "L01", 7);
  CHECK(save_scene(a) == save_scene(b));
  const Scene c = generate_scene(cat, "L01", 8);
  CHECK(a.walls == c.walls);
  CHECK(a.furniture != c.furniture);
  CHECK(a.objects != c.objects);
  CHECK(flood_fill_regions(occupancy_grid(a, 0.25)) == 1);
  CHECK_THROWS_AS(generate_scene(cat, "nope", 1), PreconditionError);
}

TEST_CASE("generated scenes satisfy every invariant across layouts and seeds") {
  const auto& cat = default_catalog();
  for (const auto& layout : cat.layouts) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Scene s = generate_scene(cat, layout.id, seed);
      INFO(s.id);
      CHECK_NOTHROW(validate_scene(s, cat));
      CHECK(flood_fill_regions(occupancy_grid(s, 0.25)) == 1);
    }
  }
}

TEST_CASE("generation fails loudly when the attempt budget is too small") {
  GenerationConfig cfg;
  cfg.max_attempts = 3;
  try {
    generate_scene(default_catalog(), "L02", 1, cfg);
    FAIL("expected GenerationError");
  } catch (const GenerationError& e) {
    CHECK(std::string(e.what()).find("attempts") != std::string::npos);
  }
}

TEST_CASE("scene documents round-trip and reject invariant violations") {
  const Scene s = generate_scene(default_catalog(), "L03", 11);
  CHECK(load_scene(save_scene(s)) == s);

  json doc = scene_to_json(s);
  json pruned = json::array();
  for (const auto& o : doc["objects"])
    if (o["category"] != "Television") pruned.push_back(o);
  doc["objects"] = pruned;
  CHECK_THROWS_AS(scene_from_json(doc), InvariantError);

  json in_wall = scene_to_json(s);
  const Wall& w = s.walls.front();
  in_wall["objects"].push_back({{"category", "Box"},
                                {"position", {0.5 * (w.a.x + w.b.x), 0.5 * (w.a.y + w.b.y)}},
                                {"height", "floor"}});
  CHECK_THROWS_AS(scene_from_json(in_wall), InvariantError);

  json missing = scene_to_json(s);
  missing.erase("bounds");
  try {
    scene_from_json(missing);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "$.bounds");
  }
  json wrong = scene_to_json(s);
  wrong["schema"] = "navth-scene/2";
  CHECK_THROWS_AS(scene_from_json(wrong), SchemaError);
}

TEST_CASE("catalog document round-trips") {
  const auto doc = catalog_to_json(default_catalog());
  const AssetCatalog c = catalog_from_json(doc);
  CHECK(catalog_to_json(c) == doc);
}

TEST_CASE("scene_stats tallies and heatmaps") {
  SUBCASE("one apple") {
    Scene s;
    s.furniture.push_back({"DiningTable", {{2.0, 1.0}, {3.0, 2.0}}});
    s.objects.push_back({"Apple", {2.5, 1.5}, HeightClass::surface});
    const auto st = scene_stats({&s}, default_catalog());
    CHECK(st.object_category_counts.at("Apple") == 1);
    CHECK(st.object_count == 1);
  }
  SUBCASE("ten seeded scenes against a direct tally") {
    std::vector<Scene> scenes;
    for (int i = 0; i < 10; ++i)
      scenes.push_back(generate_scene(default_catalog(), default_catalog().layouts[i % 3].id, 100 + i));
    std::vector<const Scene*> ptrs;
    for (const auto& s : scenes) ptrs.push_back(&s);
    const auto st = scene_stats(ptrs, default_catalog());

    std::map<std::string, std::size_t> tally;
    std::size_t total = 0;
    for (const auto& s : scenes) {
      const json doc = scene_to_json(s);
      for (const auto& o : doc["objects"]) {
        ++tally[o["category"].get<std::string>()];
        ++total;
      }
    }
    CHECK(st.object_category_counts == tally);
    std::size_t sum = 0;
    for (const auto& [k, v] : st.object_category_counts) sum += v;
    CHECK(sum == total);
    CHECK(st.object_count == total);

    for (const auto* h : {&st.target_objects, &st.background_objects, &st.furniture, &st.walls})
      for (double v : h->values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    // Wall heatmap support is the union of the three templates' wall cells.
    for (int r = 0; r < st.walls.rows; ++r)
      for (int c = 0; c < st.walls.cols; ++c) {
        const Rect cell{{c * 0.25, r * 0.25}, {(c + 1) * 0.25, (r + 1) * 0.25}};
        bool any = false;
        for (int l = 0; l < 3; ++l)
          for (const auto& w : default_catalog().layouts[l].walls) any = any || w.footprint().overlaps(cell);
        CHECK((st.walls.at(c, r) > 0.0) == any);
      }
  }
  CHECK_THROWS(scene_stats({}, default_catalog()));
}

TEST_CASE("corpus splits keep layouts and seeds disjoint") {
  SplitSizes sizes{4, 2, 2, 2};
  const Corpus corpus = generate_corpus(default_catalog(), sizes, 1);
  CHECK_NOTHROW(check_split_hygiene(corpus));
  std::map<SplitName, std::set<std::string>> layouts;
  for (const auto& sp : corpus.splits)
    for (const auto& id : sp.scene_ids) {
      const auto& s = corpus.scene(id);
      layouts[sp.name == SplitName::val ? SplitName::train : sp.name].insert(s.layout_id);
    }
  for (const auto& [a, la] : layouts)
    for (const auto& [b, lb] : layouts) {
      if (a == b) continue;
      for (const auto& l : la) CHECK(lb.count(l) == 0);
    }

  Corpus bad = corpus;
  bad.scenes.back().layout_id = bad.scenes.front().layout_id;
  CHECK_THROWS_AS(check_split_hygiene(bad), InvariantError);
}

TEST_CASE("targets are covered by a navigable success pose") {
  const Scene s = generate_scene(default_catalog(), "L05", 3);
  for (const auto& t : default_catalog().target_categories()) {
    INFO(t);
    CHECK(test_support::has_success_pose(s, t));
  }
}
