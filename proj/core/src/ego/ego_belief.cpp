#include "hainav/ego/ego_belief.hpp"

#include <cmath>
#include <unordered_set>

namespace hainav::ego {

namespace {

grid::GridPoint world_cell(const grid::Pose& pose, int forward, int right) {
  return pose.cell + grid::window_to_world(pose.heading, forward, right);
}

}  // namespace

void EgoBelief::update(std::optional<grid::Action> action, const grid::Observation& obs) {
  if (action) {
    const bool blocked = obs.collision && *action == grid::Action::Forward;
    pose_ = grid::apply_action(pose_, *action, blocked);
  }
  ++clock_;
  for (const auto& off : grid::window_offsets()) {
    const auto& seen = obs.at(off.forward, off.right);
    if (!seen) continue;
    auto& trace = cells_[grid::point_key(world_cell(pose_, off.forward, off.right))];
    trace.counts[static_cast<std::size_t>(grid::group_of(*seen))] += 1.0;
    trace.last_seen = clock_;
  }
  std::erase_if(cells_, [&](const auto& kv) { return clock_ - kv.second.last_seen > horizon_; });
}

void EgoBelief::translate(grid::GridPoint delta) {
  pose_.cell = pose_.cell + delta;
  std::unordered_map<std::int64_t, CellTrace> moved;
  moved.reserve(cells_.size());
  for (const auto& [key, trace] : cells_)
    moved.emplace(grid::point_key(grid::point_from_key(key) + delta), trace);
  cells_ = std::move(moved);
}

const EgoBelief::CellTrace* EgoBelief::cell(grid::GridPoint p) const {
  auto it = cells_.find(grid::point_key(p));
  return it == cells_.end() ? nullptr : &it->second;
}

double EgoBelief::collision_prob(grid::GridPoint p) const {
  return predictive_of(p, grid::TileGroup::Wall);
}

double EgoBelief::predictive_of(grid::GridPoint p, grid::TileGroup g) const {
  const CellTrace* trace = cell(p);
  if (!trace) return bayes::uniform_predictive();
  return bayes::predictive_of(trace->counts, g);
}

std::array<double, grid::kGroupCount> EgoBelief::predictive(grid::GridPoint p) const {
  const CellTrace* trace = cell(p);
  if (!trace) {
    std::array<double, grid::kGroupCount> out;
    out.fill(bayes::uniform_predictive());
    return out;
  }
  return bayes::predictive(trace->counts);
}

std::optional<grid::TileGroup> EgoBelief::map_class(grid::GridPoint p) const {
  const CellTrace* trace = cell(p);
  if (!trace) return std::nullopt;
  int best = 0;
  bool tied = false;
  for (int k = 1; k < grid::kGroupCount; ++k) {
    if (trace->counts[k] > trace->counts[best]) {
      best = k;
      tied = false;
    } else if (trace->counts[k] == trace->counts[best]) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return static_cast<grid::TileGroup>(best);
}

bool EgoBelief::map_opaque(grid::GridPoint p) const {
  auto g = map_class(p);
  return g && (*g == grid::TileGroup::Wall || *g == grid::TileGroup::Door);
}

double EgoBelief::opacity_prob(grid::GridPoint p) const {
  // Doors count half: closed ones block sight but open as the agent nears.
  return predictive_of(p, grid::TileGroup::Wall) + 0.5 * predictive_of(p, grid::TileGroup::Door);
}

std::vector<std::pair<std::int64_t, double>> EgoBelief::visible_gains(grid::Pose pose) const {
  const auto weights =
      grid::visibility_weights(pose, [&](grid::GridPoint p) { return opacity_prob(p); });
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(grid::Observation::kCells);
  const auto& offsets = grid::window_offsets();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const grid::GridPoint p = world_cell(pose, offsets[i].forward, offsets[i].right);
    const CellTrace* trace = cell(p);
    const double gain =
        trace ? bayes::expected_info_gain(trace->counts) : bayes::prior_info_gain();
    out.emplace_back(grid::point_key(p), weights[i] * gain);
  }
  return out;
}

std::size_t EgoBelief::footprint_bytes() const {
  return sizeof(*this) +
         cells_.size() * (sizeof(std::int64_t) + sizeof(CellTrace) + sizeof(void*));
}

std::vector<grid::Pose> rollout_poses(grid::Pose start, const std::vector<grid::Action>& actions) {
  std::vector<grid::Pose> out;
  out.reserve(actions.size());
  grid::Pose p = start;
  for (grid::Action a : actions) {
    p = grid::apply_action(p, a, false);
    out.push_back(p);
  }
  return out;
}

std::size_t feasible_prefix(const EgoBelief& belief, const std::vector<grid::Action>& actions,
                            double threshold) {
  grid::Pose p = belief.pose();
  std::size_t len = 0;
  for (grid::Action a : actions) {
    if (a == grid::Action::Forward) {
      const grid::GridPoint ahead = p.cell + grid::heading_dir(p.heading);
      if (belief.collision_prob(ahead) >= threshold) return len;
    }
    p = grid::apply_action(p, a, false);
    ++len;
  }
  return len;
}

double info_gain(const EgoBelief& belief, const std::vector<grid::Pose>& rollout) {
  std::unordered_set<std::int64_t> seen;
  double total = 0.0;
  for (const grid::Pose& pose : rollout)
    for (const auto& [key, gain] : belief.visible_gains(pose))
      if (seen.insert(key).second) total += gain;
  return total;
}

double preference(const EgoBelief& belief, const std::vector<grid::Pose>& rollout,
                  grid::TileGroup g) {
  double total = 0.0;
  for (const grid::Pose& pose : rollout) total += std::log(belief.predictive_of(pose.cell, g));
  return total;
}

}  // namespace hainav::ego
