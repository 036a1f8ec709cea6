#include "navth/pathing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "navth/error.hpp"

namespace navth {
namespace {

constexpr int kDc[] = {1, 0, -1, 0};
constexpr int kDr[] = {0, 1, 0, -1};

int snap_heading(double heading) {
  const int h = static_cast<int>(std::lround(wrap_degrees(heading) / kRotationStep));
  return ((h % 8) + 8) % 8;
}

// Multi-source BFS from every goal cell; moves to the nearest goal cell.
std::vector<int> goal_distance_field(const NavGraph& g) {
  const auto& grid = g.grid();
  std::vector<int> dist(static_cast<std::size_t>(grid.cols()) * grid.rows(), -1);
  std::deque<int> queue;
  for (int cell = 0; cell < static_cast<int>(dist.size()); ++cell)
    if (g.is_goal_cell(cell)) {
      dist[static_cast<std::size_t>(cell)] = 0;
      queue.push_back(cell);
    }
  while (!queue.empty()) {
    const int cell = queue.front();
    queue.pop_front();
    const int c = cell % grid.cols(), r = cell / grid.cols();
    for (int k = 0; k < 4; ++k) {
      const int nc = c + kDc[k], nr = r + kDr[k];
      if (!grid.free(nc, nr)) continue;
      const auto ni = grid.index(nc, nr);
      if (dist[ni] >= 0) continue;
      dist[ni] = dist[static_cast<std::size_t>(cell)] + 1;
      queue.push_back(static_cast<int>(ni));
    }
  }
  return dist;
}

int start_cell(const NavGraph& g, Vec2 start) {
  const auto [c, r] = g.grid().cell_of(start);
  if (!g.grid().free(c, r))
    throw PreconditionError("start_not_navigable", "start position lies outside navigable cells");
  return static_cast<int>(g.grid().index(c, r));
}

}  // namespace

NavGraph::NavGraph(const Scene& scene, const TaskSpec& spec, double resolution)
    : grid_(occupancy_grid(scene, resolution)) {
  const std::size_t cells = static_cast<std::size_t>(grid_.cols()) * grid_.rows();
  goal_.assign(cells * 8, 0);
  goal_cell_.assign(cells, 0);
  std::vector<Vec2> targets;
  for (const auto& o : scene.objects)
    if (o.category == spec.target_category) targets.push_back(o.position);
  for (int r = 0; r < grid_.rows(); ++r) {
    for (int c = 0; c < grid_.cols(); ++c) {
      if (grid_.blocked(c, r)) continue;
      const Vec2 p = grid_.cell_center(c, r);
      const bool near = std::any_of(targets.begin(), targets.end(),
                                    [&](Vec2 t) { return distance(p, t) <= spec.success_distance; });
      if (!near) continue;
      for (int h = 0; h < 8; ++h) {
        if (check_success(scene, {p, kRotationStep * h, 0.0}, spec)) {
          goal_[static_cast<std::size_t>(node(c, r, h))] = 1;
          goal_cell_[grid_.index(c, r)] = 1;
        }
      }
    }
  }
}

AgentState NavGraph::pose(int n, double pitch) const {
  const int cell = cell_of_node(n);
  return {grid_.cell_center(cell % grid_.cols(), cell / grid_.cols()),
          kRotationStep * heading_of_node(n), pitch};
}

std::vector<std::pair<int, Action>> NavGraph::successors(int n) const {
  std::vector<std::pair<int, Action>> out;
  const int cell = cell_of_node(n), h = heading_of_node(n);
  const int c = cell % grid_.cols(), r = cell / grid_.cols();
  if (h % 2 == 0) {
    const int nc = c + kDc[h / 2], nr = r + kDr[h / 2];
    if (grid_.free(nc, nr)) out.push_back({node(nc, nr, h), Action::MoveAhead});
  }
  out.push_back({node(c, r, (h + 7) % 8), Action::RotateRight});
  out.push_back({node(c, r, (h + 1) % 8), Action::RotateLeft});
  return out;
}

double shortest_path_length_m(const NavGraph& graph, Vec2 start) {
  const int cell = start_cell(graph, start);
  const auto dist = goal_distance_field(graph);
  const int d = dist[static_cast<std::size_t>(cell)];
  return d < 0 ? kInf : d * graph.resolution();
}

double shortest_path_length_m(const Scene& scene, Vec2 start, const TaskSpec& spec) {
  return shortest_path_length_m(NavGraph(scene, spec), start);
}

std::vector<Action> shortest_path_actions(const NavGraph& graph, const AgentState& start,
                                          PathObjective objective) {
  const int source = start_cell(graph, start.position) * 8 + snap_heading(start.heading);
  const int n = graph.node_count();
  // Cost is (primary, secondary); for the action objective the secondary is unused.
  using Cost = std::pair<int, int>;
  constexpr Cost kUnset{-1, -1};
  std::vector<Cost> cost(static_cast<std::size_t>(n), kUnset);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<Action> via(static_cast<std::size_t>(n), Action::Done);

  using Item = std::pair<Cost, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  cost[static_cast<std::size_t>(source)] = {0, 0};
  open.push({{0, 0}, source});
  int goal = -1;
  while (!open.empty()) {
    const auto [c, u] = open.top();
    open.pop();
    if (c != cost[static_cast<std::size_t>(u)]) continue;
    if (graph.is_goal(u)) {
      goal = u;
      break;
    }
    for (const auto& [v, a] : graph.successors(u)) {
      Cost nc = c;
      if (objective == PathObjective::actions) {
        nc.first += 1;
      } else if (a == Action::MoveAhead) {
        nc.first += 1;
      } else {
        nc.second += 1;
      }
      auto& cv = cost[static_cast<std::size_t>(v)];
      if (cv == kUnset || nc < cv) {
        cv = nc;
        parent[static_cast<std::size_t>(v)] = u;
        via[static_cast<std::size_t>(v)] = a;
        open.push({nc, v});
      }
    }
  }
  if (goal < 0) throw PreconditionError("unreachable_target", "no success pose is reachable from the start");
  std::vector<Action> actions;
  for (int v = goal; v != source; v = parent[static_cast<std::size_t>(v)])
    actions.push_back(via[static_cast<std::size_t>(v)]);
  std::reverse(actions.begin(), actions.end());
  return actions;
}

std::vector<Action> shortest_path_actions(const Scene& scene, const AgentState& start,
                                          const TaskSpec& spec, PathObjective objective) {
  return shortest_path_actions(NavGraph(scene, spec), start, objective);
}

std::vector<AgentState> shortest_path_poses(const NavGraph& graph, const Scene& scene, const AgentState& start) {
  std::vector<AgentState> poses{start};
  Rng rng(0);
  for (Action a : shortest_path_actions(graph, start, PathObjective::metric_then_actions))
    poses.push_back(step(scene, poses.back(), a, MotionNoiseModel::none(), rng).state);
  return poses;
}

PathHistogram path_histogram(const std::vector<const Scene*>& scenes,
                             const std::vector<std::string>& target_categories, int samples_per_scene,
                             std::uint64_t seed, const TaskSpec& base_spec) {
  if (samples_per_scene < 1) throw PreconditionError("invalid_samples", "samples per scene must be >= 1");
  PathHistogram hist;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = *scenes[si];
    Rng rng(mix_seed(seed, si));
    const auto cells = navigable_positions(scene);
    std::map<std::string, NavGraph> graphs;
    for (int k = 0; k < samples_per_scene; ++k) {
      const std::string& target = target_categories[rng.below(target_categories.size())];
      const AgentState start{cells[rng.below(cells.size())],
                             kRotationStep * static_cast<double>(rng.below(8)), 0.0};
      ++hist.samples;
      if (!scene.has_category(target)) {
        ++hist.unreachable;
        continue;
      }
      auto it = graphs.find(target);
      if (it == graphs.end()) {
        TaskSpec spec = base_spec;
        spec.target_category = target;
        it = graphs.emplace(target, NavGraph(scene, spec)).first;
      }
      try {
        const auto actions = shortest_path_actions(it->second, start);
        const int moves = static_cast<int>(std::count(actions.begin(), actions.end(), Action::MoveAhead));
        ++hist.counts[{moves, static_cast<int>(actions.size()) - moves}];
      } catch (const PreconditionError&) {
        ++hist.unreachable;
      }
    }
  }
  return hist;
}

}  // namespace navth
