#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hainav/allo/place_model.hpp"
#include "hainav/cogmap/can.hpp"
#include "hainav/cogmap/experience_map.hpp"
#include "hainav/ego/ego_belief.hpp"
#include "hainav/grid/observe.hpp"
#include "hainav/grid/rng.hpp"
#include "hainav/plan/hypothesis.hpp"
#include "hainav/plan/policy.hpp"

namespace hainav::plan {

struct AgentConfig {
  int look_ahead = 6;
  double gamma = 4.0;
  bool deterministic = true;
  Weights explore_weights = kExploreWeights;
  Weights goal_weights = kGoalWeights;
  double goal_sigma = 2.0;
  double min_goal_mass = 2.0;
  double collision_threshold = 0.5;
  double mismatch_threshold = 0.5;
  int boundary_patience = 2;
  double confidence_enter = 0.5;   // below this, assume relocation
  double confidence_exit = 0.95;   // hypothesis weight needed to resolve
  double sim_threshold = 0.9;
  double dist_threshold = 6.0;     // 1.5x room width
  double prune_threshold = 1e-3;
  double hypothesis_weight = 1.0;
  int max_localizing_ticks = 25;   // failsafe: force-resolve stuck phases
  std::uint64_t seed = 0;
};

enum class Task { Explore, Goal };

// Everything the harness wants to know about one decision.
struct TickLog {
  std::int64_t step = 0;
  grid::Pose believed;
  grid::Action action = grid::Action::TurnLeft;
  bool localizing = false;
  int current_experience = -1;
  double mismatch = 0;
  double confidence = 1;
  double realized_gain = 0;
  EfeScore chosen;
  int policies = 0;
  std::vector<double> hypothesis_weights;
  std::vector<std::string> events;
  std::optional<grid::GridPoint> goal_cell;
};

// Three-layer navigator: short-term ego map for motion safety, per-place
// Dirichlet models for long-term structure, and a topological experience
// graph stitched by door crossings. Planning minimizes expected free energy
// over L-shaped candidate paths.
class NavAgent {
 public:
  NavAgent(AgentConfig cfg, Task task, grid::TileGroup goal_class = grid::TileGroup::White);

  // Perceive, localize, plan; returns the action to execute.
  grid::Action tick(const grid::Observation& obs);

  // A driver that executes something other than the planned action (scripted
  // loops) must report what actually ran, or odometry drifts.
  void override_action(grid::Action a) { prev_action_ = a; }

  // The explore-then-seek protocol flips the task once the map is built.
  void set_task(Task t) { task_ = t; }

  // Matches a world teleport back to the start cell: belief returns to the
  // first experience at its entry pose, everything learned stays.
  void teleport_to_start();

  const TickLog& last() const { return last_; }
  const ego::EgoBelief& ego() const { return ego_; }
  const cogmap::Can& can() const { return can_; }
  const cogmap::ExperienceMap& map() const { return map_; }
  const allo::PlaceModel& current_place() const { return current_place_; }
  const ego::EgoBelief& ego_belief() const { return ego_; }
  int current_experience() const { return current_exp_; }
  bool localizing() const { return localizing_; }
  grid::Pose believed_pose() const { return ego_.pose(); }
  const AgentConfig& config() const { return cfg_; }

  // True when the agent thinks its own cell is the goal class.
  bool believes_on_goal() const;

  // Writes the working place back into the graph (call before exporting).
  void sync_map();

  std::size_t footprint_bytes() const;

 private:
  void finalize_and_open(const grid::Observation& obs, const std::string& reason);
  void resolve(const grid::Observation& obs, bool forced);
  std::optional<PreferredObservation> goal_preference();
  grid::Action plan(const std::optional<PreferredObservation>& goal);

  AgentConfig cfg_;
  Task task_;
  grid::TileGroup goal_class_;
  grid::Rng rng_;

  ego::EgoBelief ego_;
  cogmap::Can can_;
  cogmap::ExperienceMap map_;
  allo::PlaceModel current_place_;
  int current_exp_ = -1;
  bool current_is_new_ = true;

  bool localizing_ = false;
  std::vector<Hypothesis> hyps_;
  int localizing_ticks_ = 0;

  std::vector<double> mismatch_history_;
  allo::ConfidenceTracker conf_;

  std::optional<grid::Action> prev_action_;
  bool on_door_ = false;
  grid::GridPoint door_cell_{};

  std::int64_t step_ = 0;
  std::int64_t forwards_ = 0;
  std::int64_t entry_forwards_ = 0;
  int left_exp_ = -1;
  std::int64_t left_forwards_ = 0;
  std::optional<grid::GridPoint> pending_cross_;

  TickLog last_;
};

}  // namespace hainav::plan
