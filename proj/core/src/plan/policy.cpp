#include "hainav/plan/policy.hpp"

#include <cmath>
#include <unordered_set>

namespace hainav::plan {

namespace {

grid::Heading axis_heading(int dx, int dy) {
  if (dx > 0) return grid::Heading::East;
  if (dx < 0) return grid::Heading::West;
  if (dy > 0) return grid::Heading::South;
  return grid::Heading::North;
}

void append_leg(std::vector<grid::Action>& out, grid::Heading& h, grid::Heading want, int steps) {
  const int diff = (static_cast<int>(want) - static_cast<int>(h) + 4) % 4;
  if (diff == 1) out.push_back(grid::Action::TurnRight);
  if (diff == 3) out.push_back(grid::Action::TurnLeft);
  if (diff == 2) {
    out.push_back(grid::Action::TurnLeft);
    out.push_back(grid::Action::TurnLeft);
  }
  h = want;
  out.insert(out.end(), steps, grid::Action::Forward);
}

std::vector<grid::Action> l_path(grid::Heading start, grid::GridPoint target, bool x_first) {
  std::vector<grid::Action> actions;
  grid::Heading h = start;
  if (x_first) {
    if (target.x != 0) append_leg(actions, h, axis_heading(target.x, 0), std::abs(target.x));
    if (target.y != 0) append_leg(actions, h, axis_heading(0, target.y), std::abs(target.y));
  } else {
    if (target.y != 0) append_leg(actions, h, axis_heading(0, target.y), std::abs(target.y));
    if (target.x != 0) append_leg(actions, h, axis_heading(target.x, 0), std::abs(target.x));
  }
  return actions;
}

// Pack two small signed ints; ring cells stay far within range.
std::int64_t pose_key(grid::Pose p) {
  return (grid::point_key(p.cell) << 2) ^ static_cast<int>(p.heading);
}

}  // namespace

std::vector<Policy> gen_policies(grid::Heading heading, int look_ahead) {
  std::vector<Policy> out;
  for (int r = 1; r <= look_ahead; ++r) {
    std::vector<grid::GridPoint> ring;
    for (int x = -r; x <= r; ++x) ring.push_back({x, -r});
    for (int y = -r + 1; y <= r - 1; ++y) {
      ring.push_back({-r, y});
      ring.push_back({r, y});
    }
    for (int x = -r; x <= r; ++x) ring.push_back({x, r});
    for (const grid::GridPoint t : ring) {
      auto a = l_path(heading, t, true);
      auto b = l_path(heading, t, false);
      out.push_back({std::move(a), t});
      if (t.x != 0 && t.y != 0) out.push_back({std::move(b), t});
    }
  }
  return out;
}

RolloutScorer::RolloutScorer(const ego::EgoBelief& ego, const allo::PlaceModel& place,
                             std::optional<PreferredObservation> goal, double goal_sigma,
                             int horizon)
    : ego_(ego), place_(place), goal_(std::move(goal)), sigma_(goal_sigma), horizon_(horizon) {}

const RolloutScorer::PoseGains& RolloutScorer::gains_for(grid::Pose pose) {
  auto [it, fresh] = cache_.try_emplace(pose_key(pose));
  if (fresh) {
    it->second.ego_cells = ego_.visible_gains(pose);
    it->second.allo_cells = place_.visible_gains(pose);
  }
  return it->second;
}

EfeScore RolloutScorer::score(const std::vector<grid::Action>& actions, const Weights& w) {
  EfeScore s;
  if (actions.empty()) return s;
  const auto rollout = ego::rollout_poses(ego_.pose(), actions);
  std::unordered_set<std::int64_t> ego_seen, allo_seen;
  bool crossed = false;  // stepped onto a door the map has an edge for
  for (const grid::Pose& pose : rollout) {
    const PoseGains& g = gains_for(pose);
    for (const auto& [key, gain] : g.ego_cells)
      if (ego_seen.insert(key).second) s.ego_gain += gain;
    if (!crossed)
      for (const auto& [key, gain] : g.allo_cells)
        if (allo_seen.insert(key).second) s.allo_gain += gain;
    if (sealed_.count(grid::point_key(pose.cell))) crossed = true;
  }
  if (goal_) {
    auto padded = rollout;
    while (static_cast<int>(padded.size()) < horizon_) padded.push_back(padded.back());
    s.allo_pref = place_.preference(padded, goal_->target_class, goal_->target_cell, sigma_);
    s.ego_pref = ego::preference(ego_, padded, goal_->target_class);
  }
  s.total = -(w.allo_gain * s.allo_gain + w.ego_gain * s.ego_gain + w.allo_pref * s.allo_pref +
              w.ego_pref * s.ego_pref);
  return s;
}

std::vector<double> policy_distribution(const std::vector<double>& costs, double gamma) {
  std::vector<double> p(costs.size(), 0.0);
  if (costs.empty()) return p;
  double lowest = costs[0];
  for (double c : costs) lowest = std::min(lowest, c);
  double sum = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p[i] = std::exp(-gamma * (costs[i] - lowest));
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

int select_policy(const std::vector<double>& costs, double gamma, bool deterministic,
                  grid::Rng& rng) {
  if (costs.empty()) return -1;
  if (deterministic) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(costs.size()); ++i)
      if (costs[i] < costs[best]) best = i;
    return best;
  }
  const auto p = policy_distribution(costs, gamma);
  double u = rng.uniform();
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    u -= p[i];
    if (u <= 0) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace hainav::plan
