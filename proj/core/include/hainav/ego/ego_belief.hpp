#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hainav/bayes/dirichlet.hpp"
#include "hainav/grid/observe.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::ego {

// Short-term map in the agent's own odometry frame (origin = wherever the
// belief was created, initial heading = North). Cells that go unobserved for
// more than `horizon` updates are dropped, so the model tracks the recent
// surroundings rather than the whole world; the allocentric layer is the
// long-term memory.
class EgoBelief {
 public:
  static constexpr int kDefaultHorizon = 20;

  struct CellTrace {
    bayes::Counts counts{};
    std::int64_t last_seen = 0;
  };

  explicit EgoBelief(int horizon = kDefaultHorizon) : horizon_(horizon) {}

  const grid::Pose& pose() const { return pose_; }
  std::int64_t clock() const { return clock_; }
  std::size_t size() const { return cells_.size(); }
  int horizon() const { return horizon_; }

  // Advances odometry by the executed action (pass nullopt for the very
  // first observation), then absorbs the window and expires stale cells.
  // A blocked Forward (obs.collision) leaves the position unchanged.
  void update(std::optional<grid::Action> action, const grid::Observation& obs);

  // Used by loop closure: the whole past shifts when the pose estimate snaps.
  void translate(grid::GridPoint delta);

  // Teleport support: cells are world-indexed, so repointing the pose keeps
  // everything learned.
  void set_pose(grid::Pose p) { pose_ = p; }

  const CellTrace* cell(grid::GridPoint p) const;

  // Predictive probability that the cell is Wall; 1/8 when never seen.
  double collision_prob(grid::GridPoint p) const;

  double predictive_of(grid::GridPoint p, grid::TileGroup g) const;
  std::array<double, grid::kGroupCount> predictive(grid::GridPoint p) const;

  // argmax class of the cell, or nullopt when unknown or tied.
  std::optional<grid::TileGroup> map_class(grid::GridPoint p) const;
  // Walls and doors block imagined sight lines; unknown cells do not.
  bool map_opaque(grid::GridPoint p) const;
  double opacity_prob(grid::GridPoint p) const;

  // (cell key, expected info gain) for every window cell, weighted by soft
  // visibility under the believed opacities.
  std::vector<std::pair<std::int64_t, double>> visible_gains(grid::Pose pose) const;

  std::size_t footprint_bytes() const;

 private:
  std::unordered_map<std::int64_t, CellTrace> cells_;
  grid::Pose pose_{};
  std::int64_t clock_ = 0;
  int horizon_;
};

// Imagined poses after each action, assuming every Forward succeeds.
std::vector<grid::Pose> rollout_poses(grid::Pose start, const std::vector<grid::Action>& actions);

// Length of the longest prefix whose Forwards all have collision probability
// below `threshold`. Truncation keeps everything before the offending
// Forward, so trailing turns fall away with it.
std::size_t feasible_prefix(const EgoBelief& belief, const std::vector<grid::Action>& actions,
                            double threshold);

// Expected information gain along a rollout; each cell counts once, at the
// first step it becomes visible.
double info_gain(const EgoBelief& belief, const std::vector<grid::Pose>& rollout);

// Sum of log predictive probabilities that each landing cell shows `g`.
double preference(const EgoBelief& belief, const std::vector<grid::Pose>& rollout,
                  grid::TileGroup g);

}  // namespace hainav::ego
