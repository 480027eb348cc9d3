#include "hainav/plan/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace hainav::plan {

namespace {

double dist(grid::GridPoint a, grid::GridPoint b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

NavAgent::NavAgent(AgentConfig cfg, Task task, grid::TileGroup goal_class)
    : cfg_(cfg), task_(task), goal_class_(goal_class), rng_(cfg.seed ^ 0x5eedf00d) {}

grid::Action NavAgent::tick(const grid::Observation& obs) {
  last_ = TickLog{};
  last_.step = step_;

  ego_.update(prev_action_, obs);
  if (prev_action_) {
    const bool blocked = obs.collision && *prev_action_ == grid::Action::Forward;
    if (!blocked) can_.step(*prev_action_);
    if (!blocked && *prev_action_ == grid::Action::Forward) ++forwards_;
  }
  const grid::Pose pose = ego_.pose();

  // A completed door crossing is the positive signal that the previous place
  // ended; mismatch alone cannot notice a transition into unexplored space.
  const bool crossed = on_door_ && pose.cell != door_cell_;
  const auto& anchor = obs.at(0, 0);
  const bool on_door_now = anchor && grid::group_of(*anchor) == grid::TileGroup::Door;

  if (!localizing_) {
    if (!current_place_.initialized()) {
      last_.realized_gain = current_place_.update(obs, pose);
      current_exp_ = map_.add_experience(current_place_, pose, step_);
      current_is_new_ = true;
      entry_forwards_ = forwards_;
      last_.events.push_back("first_place");
    } else {
      const double mis = current_place_.mismatch(obs, pose);
      mismatch_history_.push_back(mis);
      conf_.push(mis);
      last_.mismatch = mis;

      std::string reason;
      if (crossed)
        reason = "door";
      else if (allo::event_boundary(mismatch_history_, cfg_.mismatch_threshold,
                                    cfg_.boundary_patience))
        reason = "mismatch";
      else if (conf_.confidence() < cfg_.confidence_enter)
        reason = "confidence";

      if (!reason.empty()) {
        finalize_and_open(obs, reason);
      } else if (current_place_.in_frame(pose.cell)) {
        last_.realized_gain = current_place_.update(obs, pose);
      } else {
        // Walked out of the frame without a door or contradiction (long
        // corridor case): treat like a boundary.
        finalize_and_open(obs, "frame");
      }
    }
  } else {
    ++localizing_ticks_;
    reweigh(hyps_, prev_action_, obs, ego_, cfg_.prune_threshold);
    for (Hypothesis& h : hyps_)
      if (!h.experience && h.place.in_frame(h.pose.cell))
        h.gained += h.place.update(obs, h.pose);
    double top = 0;
    for (const Hypothesis& h : hyps_) top = std::max(top, h.weight);
    if (hyps_.size() == 1 || top > cfg_.confidence_exit)
      resolve(obs, false);
    else if (localizing_ticks_ >= cfg_.max_localizing_ticks)
      resolve(obs, true);
  }

  // Re-read the pose: resolving may have snapped it.
  on_door_ = on_door_now;
  door_cell_ = ego_.pose().cell;

  const auto goal = goal_preference();
  if (goal && goal->target_cell) last_.goal_cell = goal->target_cell;
  const grid::Action action = plan(goal);

  prev_action_ = action;
  last_.believed = ego_.pose();
  last_.action = action;
  last_.localizing = localizing_;
  last_.current_experience = current_exp_;
  last_.confidence = conf_.confidence();
  for (const Hypothesis& h : hyps_) last_.hypothesis_weights.push_back(h.weight);
  ++step_;
  return action;
}

void NavAgent::finalize_and_open(const grid::Observation& obs, const std::string& reason) {
  map_.store_place(current_exp_, current_place_);
  if (current_is_new_ && map_.size() > 1) {
    // A place explored for the first time may duplicate a known one the
    // odometry says is right here (door dithering, loopy routes).
    const auto hit = map_.match(current_place_, current_place_.centroid(), cfg_.sim_threshold,
                                cfg_.dist_threshold, current_exp_);
    if (hit) {
      map_.merge_into(current_exp_, hit->id);
      current_exp_ = hit->id;
      last_.events.push_back("merged_duplicate");
    }
  }

  left_exp_ = current_exp_;
  left_forwards_ = entry_forwards_;
  pending_cross_ = (reason == "door") ? std::optional<grid::GridPoint>(door_cell_) : std::nullopt;

  const grid::Pose pose = ego_.pose();
  hyps_.clear();
  Hypothesis fresh{std::nullopt, allo::PlaceModel(), pose, 1.0};
  fresh.gained = fresh.place.update(obs, pose);
  hyps_.push_back(std::move(fresh));

  for (const auto& e : map_.experiences()) {
    if (map_.merged(e.id)) continue;
    if (reason == "door") {
      // The crossing itself says we left; the old place only competes when
      // odometry puts a different visit of it nearby.
      if (e.id == current_exp_) continue;
      if (std::min(dist(e.entry_pose.cell, pose.cell), dist(e.centroid, pose.cell)) >
          cfg_.dist_threshold)
        continue;
      hyps_.push_back({e.id, map_.place(e.id), pose, 1.0});
    } else {
      // Contradicted or lost: any known place could be the answer, guessed
      // at its original entry point with the current (noise-free) heading.
      if (e.id == current_exp_) continue;
      hyps_.push_back({e.id, map_.place(e.id), {e.entry_pose.cell, pose.heading}, 1.0});
    }
  }
  for (Hypothesis& h : hyps_) h.weight = 1.0 / hyps_.size();

  localizing_ = true;
  localizing_ticks_ = 0;
  mismatch_history_.clear();
  conf_.reset();
  current_exp_ = -1;
  current_place_ = allo::PlaceModel();
  last_.events.push_back("boundary_" + reason);

  // One window is usually decisive (a known room predicts its tiles, a fresh
  // one explains anything novel), so try to settle right away. Spending a
  // tick turning to double-check leaves the agent facing the door it came
  // through, and walking back out becomes the best-looking policy.
  reweigh(hyps_, std::nullopt, obs, ego_, cfg_.prune_threshold);
  double top = 0;
  for (const Hypothesis& h : hyps_) top = std::max(top, h.weight);
  if (hyps_.size() == 1 || top > cfg_.confidence_exit) resolve(obs, false);
}

void NavAgent::resolve(const grid::Observation& obs, bool forced) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < hyps_.size(); ++i)
    if (hyps_[i].weight > hyps_[best].weight) best = i;
  Hypothesis winner = std::move(hyps_[best]);
  const double weight = winner.weight;
  hyps_.clear();
  localizing_ = false;

  if (winner.experience) {
    const int id = map_.resolve(*winner.experience);
    const grid::GridPoint delta = winner.pose.cell - ego_.pose().cell;
    if (delta != grid::GridPoint{0, 0}) {
      ego_.translate(delta);
      last_.events.push_back("pose_snap");
    }
    current_exp_ = id;
    current_place_ = map_.place(id);
    current_is_new_ = false;
    can_.inject(cogmap::Can::wrap(ego_.pose()), weight);
    if (current_place_.in_frame(ego_.pose().cell))
      last_.realized_gain += current_place_.update(obs, ego_.pose());
    last_.events.push_back(forced ? "relocalized_forced" : "relocalized");
  } else {
    // The candidate's interim updates become part of the permanent map now,
    // so its accumulated gain lands on this tick.
    last_.realized_gain += winner.gained;
    current_place_ = std::move(winner.place);
    current_exp_ = map_.add_experience(current_place_, current_place_.entry_pose(), step_);
    current_is_new_ = true;
    last_.events.push_back(forced ? "new_place_forced" : "new_place");
  }

  if (left_exp_ >= 0) {
    const int from = map_.resolve(left_exp_);
    if (from != current_exp_)
      map_.add_edge(from, current_exp_, static_cast<double>(forwards_ - left_forwards_),
                    pending_cross_);
  }
  entry_forwards_ = forwards_;
  left_exp_ = -1;
  pending_cross_.reset();
  mismatch_history_.clear();
  conf_.reset();
}

std::optional<PreferredObservation> NavAgent::goal_preference() {
  if (task_ != Task::Goal) return std::nullopt;
  PreferredObservation goal{goal_class_, std::nullopt};
  if (localizing_) {
    // Class-only pull, and only once the goal exists somewhere in memory.
    // With nothing to prefer yet the terms would just tax every step.
    for (const auto& e : map_.experiences())
      if (!map_.merged(e.id) && map_.place(e.id).find_goal(goal_class_, cfg_.min_goal_mass))
        return goal;
    return std::nullopt;
  }

  if (const auto hit = current_place_.find_goal(goal_class_, cfg_.min_goal_mass)) {
    goal.target_cell = hit->cell;
    return goal;
  }
  // Walk memory backwards for a place that has seen the goal, then steer
  // toward the door leading to the next place on the cheapest route. Once
  // the doorway is underfoot the pull flips to the next place's entry cell:
  // without the handoff, sitting on the door is the preference optimum and
  // the crossing never completes.
  for (int id = map_.size() - 1; id >= 0; --id) {
    if (map_.merged(id) || id == current_exp_) continue;
    if (!map_.place(id).find_goal(goal_class_, cfg_.min_goal_mass)) continue;
    const auto route = map_.route(current_exp_, id);
    if (!route || route->size() < 2) continue;
    try {
      const grid::GridPoint crossing = map_.crossing_cell((*route)[0], (*route)[1]);
      const int next = (*route)[1];
      if (ego_.pose().cell == crossing) {
        const grid::GridPoint entry = map_.experiences()[next].entry_pose.cell;
        goal.target_class = map_.place(next).map_class(entry).value_or(goal_class_);
        goal.target_cell = entry;
      } else {
        goal.target_class = grid::TileGroup::Door;
        goal.target_cell = crossing;
      }
      last_.events.push_back("subgoal_observation");
    } catch (const std::invalid_argument&) {
      goal.target_class = goal_class_;
      goal.target_cell.reset();
    }
    return goal;
  }
  // Goal never seen: explore on the epistemic terms alone.
  return std::nullopt;
}

grid::Action NavAgent::plan(const std::optional<PreferredObservation>& goal) {
  auto policies = gen_policies(ego_.pose().heading, cfg_.look_ahead);
  std::vector<const Policy*> live;
  std::vector<std::vector<grid::Action>> truncated;
  for (auto& p : policies) {
    const std::size_t len = ego::feasible_prefix(ego_, p.actions, cfg_.collision_threshold);
    if (len == 0) continue;
    truncated.emplace_back(p.actions.begin(), p.actions.begin() + len);
    live.push_back(&p);
  }
  last_.policies = static_cast<int>(truncated.size());
  if (truncated.empty()) {
    last_.events.push_back("boxed_in");
    return grid::Action::TurnLeft;
  }

  std::vector<double> costs(truncated.size());
  const Weights& w = task_ == Task::Goal ? cfg_.goal_weights : cfg_.explore_weights;
  if (localizing_) {
    HypothesisScorer scorer(hyps_, goal, cfg_.hypothesis_weight);
    for (std::size_t i = 0; i < truncated.size(); ++i) costs[i] = scorer.score(truncated[i]).total;
    const int pick = select_policy(costs, cfg_.gamma, cfg_.deterministic, rng_);
    last_.chosen = scorer.score(truncated[pick]);
    return truncated[pick][0];
  }
  RolloutScorer scorer(ego_, current_place_, goal, cfg_.goal_sigma, cfg_.look_ahead + 3);
  std::unordered_set<std::int64_t> sealed;
  for (const cogmap::Transition& t : map_.transitions())
    for (const auto& [cell, uses] : t.crossings) sealed.insert(cell);
  scorer.seal_doors(std::move(sealed));
  for (std::size_t i = 0; i < truncated.size(); ++i)
    costs[i] = scorer.score(truncated[i], w).total;
  const int pick = select_policy(costs, cfg_.gamma, cfg_.deterministic, rng_);
  last_.chosen = scorer.score(truncated[pick], w);
  return truncated[pick][0];
}

bool NavAgent::believes_on_goal() const {
  if (localizing_ || !current_place_.initialized()) return false;
  const auto cls = current_place_.map_class(ego_.pose().cell);
  return cls && *cls == goal_class_;
}

void NavAgent::sync_map() {
  if (current_exp_ >= 0) map_.store_place(current_exp_, current_place_);
}

void NavAgent::teleport_to_start() {
  if (map_.size() == 0) return;
  sync_map();
  const int home = map_.resolve(0);
  current_exp_ = home;
  current_place_ = map_.place(home);
  current_is_new_ = false;
  const grid::Pose entry = map_.experiences()[home].entry_pose;
  ego_.set_pose(entry);
  can_.inject(cogmap::Can::wrap(entry), 4.0);
  localizing_ = false;
  hyps_.clear();
  localizing_ticks_ = 0;
  mismatch_history_.clear();
  conf_.reset();
  // No action connects the teleport frames; the next observation is taken
  // where we now stand.
  prev_action_.reset();
  on_door_ = false;
  left_exp_ = -1;
  pending_cross_.reset();
  entry_forwards_ = forwards_;
}

std::size_t NavAgent::footprint_bytes() const {
  std::size_t total = sizeof(*this);
  total += ego_.footprint_bytes() + can_.footprint_bytes() + map_.footprint_bytes() +
           current_place_.footprint_bytes();
  for (const Hypothesis& h : hyps_) total += h.place.footprint_bytes();
  return total;
}

}  // namespace hainav::plan
