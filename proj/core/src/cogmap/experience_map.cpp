#include "hainav/cogmap/experience_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hainav::cogmap {

namespace {

double euclid(grid::GridPoint a, grid::GridPoint b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

int ExperienceMap::add_experience(allo::PlaceModel place, grid::Pose entry_pose,
                                  std::int64_t step) {
  const int id = static_cast<int>(exps_.size());
  place.set_id(id);
  exps_.push_back({id, entry_pose, place.centroid(), step});
  places_.push_back(std::move(place));
  alias_.push_back(id);
  return id;
}

void ExperienceMap::store_place(int id, const allo::PlaceModel& place) {
  places_[id] = place;
  exps_[id].centroid = place.centroid();
}

bool ExperienceMap::has_edge(int a, int b) const { return edge(a, b) != nullptr; }

const Transition* ExperienceMap::edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_index_.find({a, b});
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

void ExperienceMap::add_edge(int a, int b, double distance,
                             std::optional<grid::GridPoint> crossing) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  auto [it, fresh] = edge_index_.try_emplace({a, b}, static_cast<int>(edges_.size()));
  if (fresh) edges_.push_back({a, b, distance, 0, {}});
  Transition& t = edges_[it->second];
  ++t.traversals;
  if (fresh || distance < t.distance) t.distance = distance;
  if (crossing) ++t.crossings[grid::point_key(*crossing)];
}

void ExperienceMap::merge_into(int dup, int keep) {
  if (dup == keep) return;
  alias_[dup] = keep;
  places_[dup] = allo::PlaceModel(dup);  // drop the duplicate's evidence
  // Collect the duplicate's edges, then re-add them against `keep`.
  std::vector<Transition> moved;
  for (auto it = edge_index_.begin(); it != edge_index_.end();) {
    if (it->first.first == dup || it->first.second == dup) {
      moved.push_back(edges_[it->second]);
      it = edge_index_.erase(it);
    } else {
      ++it;
    }
  }
  // Compact edges_ to the surviving set, rebuilding the index.
  std::vector<Transition> kept;
  std::map<std::pair<int, int>, int> index;
  for (const auto& [key, ei] : edge_index_) {
    index[key] = static_cast<int>(kept.size());
    kept.push_back(edges_[ei]);
  }
  edges_ = std::move(kept);
  edge_index_ = std::move(index);
  for (const Transition& t : moved) {
    const int other = t.a == dup ? t.b : t.a;
    if (other == keep) continue;  // would be a self-edge
    auto [it, fresh] = edge_index_.try_emplace({std::min(other, keep), std::max(other, keep)},
                                               static_cast<int>(edges_.size()));
    if (fresh) {
      Transition nt = t;
      nt.a = std::min(other, keep);
      nt.b = std::max(other, keep);
      edges_.push_back(nt);
    } else {
      Transition& dst = edges_[it->second];
      dst.traversals += t.traversals;
      dst.distance = std::min(dst.distance, t.distance);
      for (const auto& [cell, n] : t.crossings) dst.crossings[cell] += n;
    }
  }
}

std::optional<ExperienceMap::Match> ExperienceMap::match(const allo::PlaceModel& candidate,
                                                         grid::GridPoint believed,
                                                         double sim_threshold,
                                                         double dist_threshold,
                                                         std::optional<int> exclude) const {
  const auto desc = candidate.descriptor();
  std::optional<Match> best;
  for (const Experience& e : exps_) {
    if (merged(e.id)) continue;
    if (exclude && e.id == *exclude) continue;
    const double dist =
        std::min(euclid(e.entry_pose.cell, believed), euclid(e.centroid, believed));
    if (dist > dist_threshold) continue;
    const auto other = places_[e.id].descriptor();
    double dot = 0;
    for (std::size_t i = 0; i < desc.size(); ++i) dot += desc[i] * other[i];
    if (dot < sim_threshold) continue;
    if (!best || dot > best->cosine) best = Match{e.id, dot};
  }
  return best;
}

std::optional<std::vector<int>> ExperienceMap::route(int from, int to) const {
  from = resolve(from);
  to = resolve(to);
  if (from == to) return std::vector<int>{from};
  const int n = size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n, kInf);
  std::vector<std::vector<int>> path(n);
  std::vector<bool> done(n, false);
  cost[from] = 0;
  path[from] = {from};
  for (;;) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (done[i] || cost[i] == kInf) continue;
      if (u == -1 || cost[i] < cost[u] - 1e-12 ||
          (cost[i] < cost[u] + 1e-12 && path[i] < path[u]))
        u = i;
    }
    if (u == -1) break;
    if (u == to) return path[u];
    done[u] = true;
    for (const Transition& t : edges_) {
      if (t.a != u && t.b != u) continue;
      const int v = t.a == u ? t.b : t.a;
      if (done[v]) continue;
      const double w = t.distance * (1.0 + 1.0 / t.traversals);
      const double c = cost[u] + w;
      std::vector<int> p = path[u];
      p.push_back(v);
      if (c < cost[v] - 1e-12 || (c < cost[v] + 1e-12 && p < path[v])) {
        cost[v] = c;
        path[v] = std::move(p);
      }
    }
  }
  return std::nullopt;
}

grid::GridPoint ExperienceMap::crossing_cell(int a, int b) const {
  const Transition* t = edge(resolve(a), resolve(b));
  if (!t || t->crossings.empty()) throw std::invalid_argument("no crossing recorded");
  auto best = t->crossings.begin();
  for (auto it = t->crossings.begin(); it != t->crossings.end(); ++it)
    if (it->second > best->second) best = it;
  return grid::point_from_key(best->first);
}

std::size_t ExperienceMap::footprint_bytes() const {
  std::size_t total = sizeof(*this);
  total += exps_.capacity() * sizeof(Experience);
  for (const auto& p : places_) total += p.footprint_bytes();
  for (const auto& t : edges_)
    total += sizeof(Transition) + t.crossings.size() * (sizeof(std::int64_t) + sizeof(int));
  total += alias_.capacity() * sizeof(int);
  return total;
}

}  // namespace hainav::cogmap
