#include "hainav/plan/hypothesis.hpp"

#include <algorithm>
#include <cmath>

namespace hainav::plan {

namespace {

std::int64_t pose_key(grid::Pose p) {
  return (grid::point_key(p.cell) << 2) ^ static_cast<int>(p.heading);
}

double entropy(const std::array<double, grid::kGroupCount>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

}  // namespace

bool reweigh(std::vector<Hypothesis>& set, std::optional<grid::Action> action,
             const grid::Observation& obs, const ego::EgoBelief& ego, double prune_threshold) {
  if (set.empty()) return true;
  std::vector<double> loglik(set.size(), 0.0);
  for (std::size_t n = 0; n < set.size(); ++n) {
    Hypothesis& h = set[n];
    if (action) {
      const bool blocked = obs.collision && *action == grid::Action::Forward;
      h.pose = grid::apply_action(h.pose, *action, blocked);
    }
    double ll = 0;
    for (const auto& off : grid::window_offsets()) {
      const auto& seen = obs.at(off.forward, off.right);
      if (!seen) continue;
      const auto g = grid::group_of(*seen);
      const double p_place = h.place.predictive_of(
          h.pose.cell + grid::window_to_world(h.pose.heading, off.forward, off.right), g);
      const double p_ego = ego.predictive_of(
          ego.pose().cell + grid::window_to_world(ego.pose().heading, off.forward, off.right), g);
      ll += std::log(0.5 * p_place + 0.5 * p_ego);
    }
    loglik[n] = ll;
  }
  const double top = *std::max_element(loglik.begin(), loglik.end());
  double sum = 0;
  for (std::size_t n = 0; n < set.size(); ++n) {
    set[n].weight *= std::exp(loglik[n] - top);
    sum += set[n].weight;
  }
  if (!(sum > 0)) {
    for (auto& h : set) h.weight = 1.0 / set.size();
    return false;
  }
  for (auto& h : set) h.weight /= sum;
  std::erase_if(set, [&](const Hypothesis& h) { return h.weight < prune_threshold; });
  sum = 0;
  for (const auto& h : set) sum += h.weight;
  for (auto& h : set) h.weight /= sum;
  return true;
}

HypothesisScorer::HypothesisScorer(const std::vector<Hypothesis>& set,
                                   std::optional<PreferredObservation> goal, double step_weight)
    : set_(set), goal_(std::move(goal)), step_weight_(step_weight), cache_(set.size()) {}

const HypothesisScorer::View& HypothesisScorer::view_for(std::size_t n, grid::Pose pose) {
  auto [it, fresh] = cache_[n].try_emplace(pose_key(pose));
  if (fresh) {
    const allo::PlaceModel& place = set_[n].place;
    auto visible = grid::visible_window(
        pose, [&](grid::GridPoint p) { return place.map_opaque(p); },
        [](grid::GridPoint) { return true; });
    const auto& offsets = grid::window_offsets();
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const int slot = grid::Observation::index(offsets[i].forward, offsets[i].right);
      if (!visible[slot]) {
        // A cell this candidate cannot see is predicted maximally vaguely.
        it->second.dist[slot].fill(bayes::uniform_predictive());
        continue;
      }
      it->second.dist[slot] = place.predictive(
          pose.cell + grid::window_to_world(pose.heading, offsets[i].forward, offsets[i].right));
    }
  }
  return it->second;
}

EfeScore HypothesisScorer::score(const std::vector<grid::Action>& actions) {
  EfeScore s;
  if (actions.empty() || set_.empty()) return s;

  std::vector<std::vector<grid::Pose>> rollouts;
  rollouts.reserve(set_.size());
  for (const Hypothesis& h : set_) rollouts.push_back(ego::rollout_poses(h.pose, actions));

  for (std::size_t t = 0; t < actions.size(); ++t) {
    std::vector<const View*> views;
    views.reserve(set_.size());
    for (std::size_t n = 0; n < set_.size(); ++n) views.push_back(&view_for(n, rollouts[n][t]));
    for (int slot = 0; slot < grid::Observation::kCells; ++slot) {
      std::array<double, grid::kGroupCount> mix{};
      double near = 0;
      for (std::size_t n = 0; n < set_.size(); ++n) {
        const auto& p = views[n]->dist[slot];
        for (int k = 0; k < grid::kGroupCount; ++k) mix[k] += set_[n].weight * p[k];
        near += set_[n].weight * entropy(p);
      }
      s.allo_gain += entropy(mix) - near;
    }
  }

  if (goal_) {
    for (std::size_t n = 0; n < set_.size(); ++n)
      s.allo_pref += set_[n].weight *
                     set_[n].place.preference(rollouts[n], goal_->target_class, std::nullopt);
  }
  s.total = -(step_weight_ * s.allo_gain + s.allo_pref);
  return s;
}

}  // namespace hainav::plan
