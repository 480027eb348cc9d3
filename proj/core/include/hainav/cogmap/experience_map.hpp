#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hainav/allo/place_model.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::cogmap {

struct Experience {
  int id = -1;
  grid::Pose entry_pose;        // odometry pose when the place was first entered
  grid::GridPoint centroid;     // evidence centroid of the stored place
  std::int64_t created_step = 0;
};

struct Transition {
  int a = -1;  // a < b
  int b = -1;
  double distance = 0;  // steps walked between the two entries
  int traversals = 0;
  // Door cells used for this transition (odometry coordinates) and how often.
  std::map<std::int64_t, int> crossings;
};

// Topological memory: one node per distinct place, edges recording walked
// transitions and which door cell they used.
class ExperienceMap {
 public:
  // Takes ownership of the place; assigns and returns the new id.
  int add_experience(allo::PlaceModel place, grid::Pose entry_pose, std::int64_t step);

  // Writes back the (grown) model of an existing experience.
  void store_place(int id, const allo::PlaceModel& place);

  const allo::PlaceModel& place(int id) const { return places_[id]; }
  const std::vector<Experience>& experiences() const { return exps_; }
  const std::vector<Transition>& transitions() const { return edges_; }
  int size() const { return static_cast<int>(exps_.size()); }

  bool has_edge(int a, int b) const;
  const Transition* edge(int a, int b) const;

  // Repeat edges merge: traversal count grows, the shorter distance wins,
  // crossing tallies accumulate.
  void add_edge(int a, int b, double distance, std::optional<grid::GridPoint> crossing);

  // Folds a duplicate node into an older one: edges re-point, self-edges
  // drop, the duplicate's place evidence is discarded. The duplicate id
  // stays allocated but unreferenced.
  void merge_into(int dup, int keep);
  bool merged(int id) const { return alias_[id] != id; }
  int resolve(int id) const { return alias_[id]; }

  struct Match {
    int id = -1;
    double cosine = 0;
  };
  // Best stored experience by descriptor cosine, gated by similarity and by
  // distance from the believed position; ties prefer the older id.
  std::optional<Match> match(const allo::PlaceModel& candidate, grid::GridPoint believed,
                             double sim_threshold, double dist_threshold,
                             std::optional<int> exclude = std::nullopt) const;

  // Cheapest experience chain, Dijkstra over cost distance*(1 + 1/traversals)
  // with deterministic lexicographic tie-breaking. Empty when unreachable.
  std::optional<std::vector<int>> route(int from, int to) const;

  // Most-traversed door cell recorded for the edge; throws
  // std::invalid_argument when the edge or its crossings are missing.
  grid::GridPoint crossing_cell(int a, int b) const;

  std::size_t footprint_bytes() const;

 private:
  std::vector<Experience> exps_;
  std::vector<allo::PlaceModel> places_;
  std::vector<Transition> edges_;
  std::vector<int> alias_;
  std::map<std::pair<int, int>, int> edge_index_;
};

}  // namespace hainav::cogmap
