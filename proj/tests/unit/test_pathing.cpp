#include <cmath>
#include <deque>
#include <map>
#include <tuple>

#include "doctest.h"
#include "navth/error.hpp"
#include "navth/pathing.hpp"
#include "test_support.hpp"

using namespace navth;
using test_support::bfs_length_oracle;
using test_support::corridor_scene;
using test_support::spec_for;

namespace {

// A 0.25 m cell is navigable when it keeps agent-radius clearance from every
// wall, furniture footprint and the room boundary.
bool cell_clear(const Scene& s, Vec2 p) {
  const double c = std::floor(p.x / 0.25), r = std::floor(p.y / 0.25);
  const Rect cell{{c * 0.25, r * 0.25}, {(c + 1) * 0.25, (r + 1) * 0.25}};
  if (cell.min.x < kAgentRadius || cell.min.y < kAgentRadius || cell.max.x > s.width - kAgentRadius ||
      cell.max.y > s.depth - kAgentRadius)
    return false;
  for (const auto& w : s.walls)
    if (w.footprint().inflated(kAgentRadius).overlaps(cell)) return false;
  for (const auto& f : s.furniture)
    if (f.footprint.inflated(kAgentRadius).overlaps(cell)) return false;
  return true;
}

// Breadth-first search over simulated poses using the motion model itself.
// Moves are taken only along the axes, matching the lattice of the planner.
int pose_bfs_oracle(const Scene& s, const AgentState& start, const TaskSpec& spec) {
  using Key = std::tuple<long, long, int>;
  auto key = [](const AgentState& a) {
    return Key{std::lround(a.position.x * 8), std::lround(a.position.y * 8),
               static_cast<int>(std::lround(a.heading / 45.0)) % 8};
  };
  std::map<Key, int> seen{{key(start), 0}};
  std::deque<AgentState> q{start};
  Rng rng(0);
  while (!q.empty()) {
    const AgentState a = q.front();
    q.pop_front();
    const int d = seen[key(a)];
    if (check_success(s, a, spec)) return d;
    for (Action act : {Action::MoveAhead, Action::RotateLeft, Action::RotateRight}) {
      if (act == Action::MoveAhead && std::fmod(a.heading, 90.0) != 0.0) continue;
      const auto r = step(s, a, act, MotionNoiseModel::none(), rng);
      if (r.collided || !cell_clear(s, r.state.position)) continue;
      if (!seen.emplace(key(r.state), d + 1).second) continue;
      q.push_back(r.state);
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("path length is zero at a success pose and one metre down the corridor") {
  const Scene s = corridor_scene(5.0);
  const TaskSpec spec = spec_for("Television");
  CHECK(shortest_path_length_m(s, {4.125, 0.875}, spec) == 0.0);
  CHECK(shortest_path_length_m(s, {3.125, 0.875}, spec) == doctest::Approx(1.0));
  CHECK(bfs_length_oracle(s, {3.125, 0.875}, spec) == doctest::Approx(1.0));
  CHECK_THROWS_AS(shortest_path_length_m(s, {0.05, 0.05}, spec), PreconditionError);

  const auto actions = shortest_path_actions(s, {{3.125, 0.875}, 0, 0}, spec);
  CHECK(actions == std::vector<Action>(4, Action::MoveAhead));
}

TEST_CASE("a target behind the agent takes four rotations") {
  const Scene s = corridor_scene(5.0);
  const auto actions = shortest_path_actions(s, {{4.125, 0.875}, 180, 0}, spec_for("Television"));
  REQUIRE(actions.size() == 4);
  const Action first = actions.front();
  CHECK((first == Action::RotateLeft || first == Action::RotateRight));
  for (Action a : actions) CHECK(a == first);
}

TEST_CASE("unreachable targets are reported") {
  Scene s = corridor_scene(8.0);
  s.walls.push_back({{5.0, 0.0}, {5.0, 2.0}, 0.1});
  const TaskSpec spec = spec_for("Television");
  CHECK(shortest_path_length_m(s, {1.125, 0.875}, spec) == kInf);
  try {
    shortest_path_actions(s, {{1.125, 0.875}, 0, 0}, spec);
    FAIL("expected unreachable_target");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "unreachable_target");
  }
}

TEST_CASE("planner agrees with independent search oracles on generated scenes") {
  const auto& cat = default_catalog();
  int checked = 0;
  for (std::size_t li = 0; li < cat.layouts.size(); li += 2) {
    const Scene s = generate_scene(cat, cat.layouts[li].id, 40 + li);
    const auto targets = cat.target_categories();
    const TaskSpec spec = spec_for(targets[li % targets.size()]);
    const NavGraph graph(s, spec);
    const auto cells = navigable_positions(s);
    Rng rng(li);
    for (int k = 0; k < 4; ++k) {
      const AgentState start{cells[rng.below(cells.size())], 45.0 * rng.below(8), 0};
      const double l = shortest_path_length_m(graph, start.position);
      const double oracle = bfs_length_oracle(s, start.position, spec);
      CHECK(l == doctest::Approx(oracle < 0 ? kInf : oracle));
      if (l == kInf) continue;

      const auto fewest = shortest_path_actions(graph, start, PathObjective::actions);
      CHECK(static_cast<int>(fewest.size()) == pose_bfs_oracle(s, start, spec));

      const auto metric = shortest_path_actions(graph, start, PathObjective::metric_then_actions);
      const auto moves = std::count(metric.begin(), metric.end(), Action::MoveAhead);
      CHECK(moves * kStepSize == doctest::Approx(l));
      CHECK(fewest.size() <= metric.size());
      CHECK(static_cast<double>(std::count(fewest.begin(), fewest.end(), Action::MoveAhead)) >=
            std::ceil(l / kStepSize - 1e-9));

      // Replaying either plan without noise lands on a success pose.
      for (const auto* plan : {&fewest, &metric}) {
        AgentState a = start;
        Rng r(0);
        for (Action act : *plan) {
          const auto res = step(s, a, act, MotionNoiseModel::none(), r);
          CHECK_FALSE(res.collided);
          a = res.state;
        }
        CHECK(check_success(s, a, spec));
      }
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("distance field satisfies the triangle inequality") {
  const Scene s = generate_scene(default_catalog(), "L09", 6);
  const TaskSpec spec = spec_for("Laptop");
  const NavGraph graph(s, spec);
  const auto& g = graph.grid();
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c + 1 < g.cols(); ++c) {
      if (!g.free(c, r) || !g.free(c + 1, r)) continue;
      const double a = shortest_path_length_m(graph, g.cell_center(c, r));
      const double b = shortest_path_length_m(graph, g.cell_center(c + 1, r));
      if (a == kInf || b == kInf) {
        CHECK(a == b);
        continue;
      }
      CHECK(a <= b + kStepSize + 1e-12);
      CHECK(b <= a + kStepSize + 1e-12);
    }
}

TEST_CASE("path histogram conserves its samples") {
  std::vector<Scene> scenes;
  for (int i = 0; i < 4; ++i) scenes.push_back(generate_scene(default_catalog(), "L1" + std::to_string(i), i));
  std::vector<const Scene*> ptrs;
  for (const auto& s : scenes) ptrs.push_back(&s);
  const auto targets = default_catalog().target_categories();
  const auto h = path_histogram(ptrs, targets, 25, 99);
  CHECK(h.samples == 100);
  std::size_t total = h.unreachable;
  for (const auto& [k, v] : h.counts) {
    CHECK(k.first >= 0);
    CHECK(k.second >= 0);
    total += v;
  }
  CHECK(total == h.samples);
  const auto again = path_histogram(ptrs, targets, 25, 99);
  CHECK(again.counts == h.counts);
}
