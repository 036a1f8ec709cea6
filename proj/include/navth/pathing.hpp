#pragma once

#include <map>
#include <utility>
#include <vector>

#include "navth/task.hpp"

namespace navth {

/// Lattice over navigable cells x 8 headings. MoveAhead edges exist only for
/// axis-aligned headings (a 0.25 m diagonal move leaves the lattice);
/// rotations connect adjacent headings. Moves cost one action and one step
/// of metric length, rotations one action and zero metres.
class NavGraph {
 public:
  NavGraph(const Scene& scene, const TaskSpec& spec, double resolution = kStepSize);

  const OccupancyGrid& grid() const { return grid_; }
  double resolution() const { return grid_.resolution(); }
  int node_count() const { return grid_.cols() * grid_.rows() * 8; }
  int node(int c, int r, int heading_index) const { return (r * grid_.cols() + c) * 8 + heading_index; }
  int cell_of_node(int n) const { return n / 8; }
  int heading_of_node(int n) const { return n % 8; }
  AgentState pose(int n, double pitch = 0.0) const;

  /// Goal predicate per node: check_success at the cell centre and heading.
  bool is_goal(int n) const { return goal_[static_cast<std::size_t>(n)]; }
  /// Cells from which some heading satisfies success.
  bool is_goal_cell(int cell) const { return goal_cell_[static_cast<std::size_t>(cell)]; }

  /// Successors of a node as (next node, action).
  std::vector<std::pair<int, Action>> successors(int n) const;

 private:
  OccupancyGrid grid_;
  std::vector<char> goal_;
  std::vector<char> goal_cell_;
};

/// Minimal metric length (metres) from the start cell to any goal cell;
/// infinity when unreachable. Throws PreconditionError when the start cell is
/// not navigable.
double shortest_path_length_m(const Scene& scene, Vec2 start, const TaskSpec& spec);
double shortest_path_length_m(const NavGraph& graph, Vec2 start);

enum class PathObjective {
  /// Fewest total actions (moves + rotations).
  actions,
  /// Fewest moves (shortest metric length), then fewest rotations.
  metric_then_actions,
};

/// Action sequence (without the final Done) reaching a success pose; throws
/// PreconditionError("unreachable_target") if none exists. The start heading
/// is snapped to the nearest multiple of 45 degrees.
std::vector<Action> shortest_path_actions(const Scene& scene, const AgentState& start,
                                          const TaskSpec& spec,
                                          PathObjective objective = PathObjective::actions);
std::vector<Action> shortest_path_actions(const NavGraph& graph, const AgentState& start,
                                          PathObjective objective = PathObjective::actions);

/// Poses visited by executing the metric-optimal plan without noise, start
/// pose first.
std::vector<AgentState> shortest_path_poses(const NavGraph& graph, const Scene& scene, const AgentState& start);

struct PathHistogram {
  /// (move count, rotate count) -> number of sampled pairs.
  std::map<std::pair<int, int>, std::size_t> counts;
  std::size_t samples = 0;
  std::size_t unreachable = 0;
};

/// Samples `samples_per_scene` (start pose, target category) pairs per scene
/// and histograms the action-optimal move/rotation counts.
PathHistogram path_histogram(const std::vector<const Scene*>& scenes,
                             const std::vector<std::string>& target_categories,
                             int samples_per_scene, std::uint64_t seed, const TaskSpec& base_spec = {});

}  // namespace navth
