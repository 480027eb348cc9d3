#pragma once

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hainav/allo/place_model.hpp"
#include "hainav/ego/ego_belief.hpp"
#include "hainav/grid/rng.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::plan {

// An L-shaped candidate path: turn toward the target, walk one axis, turn,
// walk the other.
struct Policy {
  std::vector<grid::Action> actions;
  grid::GridPoint target;  // offset from the agent's cell, world axes
};

// Both leg orders to every cell of each square ring 1..look_ahead, with the
// duplicate single-leg paths for on-axis targets removed: 16r - 4 policies
// per ring.
std::vector<Policy> gen_policies(grid::Heading heading, int look_ahead);

struct Weights {
  double allo_gain = 1.0;
  double ego_gain = 0.2;
  double allo_pref = 0.0;
  double ego_pref = 0.0;
};

inline constexpr Weights kExploreWeights{1.0, 0.2, 0.0, 0.0};
inline constexpr Weights kGoalWeights{0.2, 0.05, 1.0, 2.0};

// What the agent wants its camera to land on. When the place layer knows a
// concrete cell, a squared-distance pose prior pulls the rollout toward it.
struct PreferredObservation {
  grid::TileGroup target_class = grid::TileGroup::White;
  std::optional<grid::GridPoint> target_cell;  // odometry coordinates
};

// Expected free energy of a policy, kept as a cost: lower is better. The
// components are stored positive; total = -(weighted sum).
struct EfeScore {
  double total = 0;
  double allo_gain = 0;
  double ego_gain = 0;
  double allo_pref = 0;
  double ego_pref = 0;
};

// Scores rollouts against one ego/place pair, caching per-pose visibility so
// the ~40 policies of a tick share the work. Policies must already be
// truncated to their feasible prefix; an empty rollout scores zero.
//
// Preference terms are summed over `horizon` steps: a policy shorter than
// the horizon waits at its endpoint for the remaining steps. Without this a
// short do-nothing policy dodges the log-probability cost that every step
// pays, and turning in place beats walking to the goal.
class RolloutScorer {
 public:
  RolloutScorer(const ego::EgoBelief& ego, const allo::PlaceModel& place,
                std::optional<PreferredObservation> goal, double goal_sigma = 2.0,
                int horizon = 0);

  // Door cells with a recorded map edge. A rollout that steps onto one stops
  // accruing place gains: the map already knows what lives on the far side,
  // so any novelty the place frame claims there is owned by another place.
  // Ego gains keep accruing; short-term memory is room-agnostic.
  void seal_doors(std::unordered_set<std::int64_t> cells) { sealed_ = std::move(cells); }

  EfeScore score(const std::vector<grid::Action>& actions, const Weights& w);

 private:
  struct PoseGains {
    std::vector<std::pair<std::int64_t, double>> ego_cells;
    std::vector<std::pair<std::int64_t, double>> allo_cells;
  };
  const PoseGains& gains_for(grid::Pose pose);

  const ego::EgoBelief& ego_;
  const allo::PlaceModel& place_;
  std::optional<PreferredObservation> goal_;
  double sigma_;
  int horizon_;
  std::unordered_set<std::int64_t> sealed_;
  std::unordered_map<std::int64_t, PoseGains> cache_;
};

// Softmax policy posterior over costs: p_i proportional to exp(-gamma G_i).
std::vector<double> policy_distribution(const std::vector<double>& costs, double gamma);

// Deterministic: lowest cost, first index on ties. Stochastic: samples the
// softmax with the caller's generator.
int select_policy(const std::vector<double>& costs, double gamma, bool deterministic,
                  grid::Rng& rng);

}  // namespace hainav::plan
