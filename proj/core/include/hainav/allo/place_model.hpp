#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hainav/bayes/dirichlet.hpp"
#include "hainav/grid/observe.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::allo {

// Long-term model of one place: a fixed 23x23 frame of per-cell class counts.
// The frame is anchored in the agent's odometry coordinates on the first
// update (entry pose lands at the frame center), so one room plus its
// surrounding walls always fits regardless of the entry point.
class PlaceModel {
 public:
  static constexpr int kSpan = 23;

  explicit PlaceModel(int id = -1) : id_(id), counts_(kSpan * kSpan) {}

  int id() const { return id_; }
  void set_id(int id) { id_ = id; }
  int obs_count() const { return obs_count_; }
  bool initialized() const { return origin_.has_value(); }

  // Odometry cell of local (0, 0); only valid once initialized.
  grid::GridPoint frame_origin() const { return *origin_; }
  grid::Pose entry_pose() const { return entry_pose_; }

  bool in_frame(grid::GridPoint odo) const;
  const bayes::Counts* cell(grid::GridPoint odo) const;

  // Absorbs the visible window and returns the KL the counts moved by. The
  // first call anchors the frame; later calls with the agent outside the
  // frame throw std::out_of_range (the caller should have opened a new place
  // instead). Window cells that poke past the frame edge are skipped, and so
  // is anything glimpsed through a doorway: a place ends at its doors, and
  // what lies beyond belongs to the neighbouring place. Standing in the
  // doorway itself only the doorway cell is kept.
  double update(const grid::Observation& obs, grid::Pose odo_pose);

  double predictive_of(grid::GridPoint odo, grid::TileGroup g) const;
  std::array<double, grid::kGroupCount> predictive(grid::GridPoint odo) const;
  std::optional<grid::TileGroup> map_class(grid::GridPoint odo) const;
  bool map_opaque(grid::GridPoint odo) const;
  double opacity_prob(grid::GridPoint odo) const;

  // Mean probability the model assigned to what was actually seen, restricted
  // to cells it has evidence for. 0 when nothing overlaps: a fresh view is
  // unfamiliar, not contradictory.
  double mismatch(const grid::Observation& obs, grid::Pose odo_pose) const;

  // Same mean over all visible cells, scoring unknown cells at the prior.
  // Tracks "how well do I predict this view" rather than "am I contradicted".
  double prediction_error(const grid::Observation& obs, grid::Pose odo_pose) const;

  // (cell key, expected info gain) weighted by soft visibility under the
  // model's own opacity beliefs, with believed doors counted fully opaque:
  // update() refuses through-door cells, so a view across a doorway can
  // never be cashed in here. Cells outside the frame are absent for the
  // same reason.
  std::vector<std::pair<std::int64_t, double>> visible_gains(grid::Pose odo_pose) const;

  // Log predictive of each landing cell showing `g`; adds a squared-distance
  // pose prior when a target cell is known.
  double preference(const std::vector<grid::Pose>& rollout, grid::TileGroup g,
                    std::optional<grid::GridPoint> target_odo, double sigma = 2.0) const;

  // Pose-invariant fingerprint: MAP class one-hot scaled by the cell's count
  // mass, recentered on the evidence centroid, L2-normalized. Throws
  // std::logic_error on a model with no evidence.
  std::vector<double> descriptor() const;

  // Evidence centroid in odometry coordinates (count-mass weighted).
  grid::GridPoint centroid() const;

  struct GoalHit {
    grid::GridPoint cell;      // odometry coordinates
    double mass = 0;
  };
  // Strongest cell whose MAP class is `g` with at least `min_mass` direct
  // observations of it.
  std::optional<GoalHit> find_goal(grid::TileGroup g, double min_mass = 2.0) const;

  struct FreeEnergy {
    double complexity = 0;  // KL of all cell posteriors from the prior
    double accuracy = 0;    // expected log probability of the batch
    double value = 0;       // complexity - accuracy
  };
  FreeEnergy free_energy(
      const std::vector<std::pair<grid::Observation, grid::Pose>>& batch) const;

  // Versioned little-endian blob: id, origin, frame span, class count, the
  // count array, obs_count. deserialize throws std::invalid_argument on a
  // bad header or truncated payload.
  std::vector<std::uint8_t> serialize() const;
  static PlaceModel deserialize(const std::vector<std::uint8_t>& blob);

  // MAP classes in maze text characters, one frame row per line; cells
  // without evidence print '?' so diffs against ground truth never match
  // on ignorance.
  std::string map_text() const;

  std::size_t footprint_bytes() const;

 private:
  std::optional<grid::GridPoint> to_local(grid::GridPoint odo) const;

  int id_;
  int obs_count_ = 0;
  std::optional<grid::GridPoint> origin_;
  grid::Pose entry_pose_;
  std::vector<bayes::Counts> counts_;
};

// True when the last `patience` mismatch readings all exceed the threshold.
bool event_boundary(const std::vector<double>& history, double threshold = 0.5,
                    int patience = 2);

// 1 - exponential moving average of mismatch, half-life 3 samples. Fresh
// tracker reports full confidence.
class ConfidenceTracker {
 public:
  void push(double mismatch) { ema_ = kBlend * mismatch + (1.0 - kBlend) * ema_; }
  void reset() { ema_ = 0.0; }
  double confidence() const { return 1.0 - ema_; }

 private:
  static constexpr double kBlend = 0.20629947401558416;  // 1 - 2^(-1/3)
  double ema_ = 0.0;
};

}  // namespace hainav::allo
