#pragma once

#include <array>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hainav/allo/place_model.hpp"
#include "hainav/ego/ego_belief.hpp"
#include "hainav/grid/observe.hpp"
#include "hainav/plan/policy.hpp"

namespace hainav::plan {

// One candidate answer to "which place am I in, and where exactly". A fresh
// hypothesis carries a growing new place; candidates for known places carry
// a copy of the stored model and a corrected pose.
struct Hypothesis {
  std::optional<int> experience;  // nullopt marks the fresh-place candidate
  allo::PlaceModel place;
  grid::Pose pose;  // hypothesized true odometry pose
  double weight = 1.0;
  double gained = 0;  // KL absorbed so far; becomes real only if this wins
};

// Advances every pose by the executed action, multiplies weights by the
// observation likelihood (per visible cell, an even blend of the candidate
// place's predictive and the short-term ego predictive), renormalizes and
// prunes. Returns false when the likelihoods all collapsed to zero-sum and
// the weights were reset equal instead.
bool reweigh(std::vector<Hypothesis>& set, std::optional<grid::Action> action,
             const grid::Observation& obs, const ego::EgoBelief& ego,
             double prune_threshold = 1e-3);

// Expected free energy while localization is unresolved: per imagined step
// and window cell, the mutual information between the candidate identity and
// the predicted class (entropy of the weighted mixture minus the weighted
// entropies). A goal adds the mixture's class preference. Total is again a
// cost; identical predictions make a policy worthless.
class HypothesisScorer {
 public:
  HypothesisScorer(const std::vector<Hypothesis>& set, std::optional<PreferredObservation> goal,
                   double step_weight = 1.0);

  EfeScore score(const std::vector<grid::Action>& actions);

 private:
  struct View {
    std::array<std::array<double, grid::kGroupCount>, grid::Observation::kCells> dist;
  };
  const View& view_for(std::size_t n, grid::Pose pose);

  const std::vector<Hypothesis>& set_;
  std::optional<PreferredObservation> goal_;
  double step_weight_;
  std::vector<std::unordered_map<std::int64_t, View>> cache_;
};

}  // namespace hainav::plan
