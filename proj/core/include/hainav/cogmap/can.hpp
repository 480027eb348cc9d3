#pragma once

#include <cstddef>
#include <vector>

#include "hainav/grid/types.hpp"

namespace hainav::cogmap {

// Continuous attractor over a wrapped 40x40x4 pose lattice. Path integration
// shifts the activity packet; loop-closure injections pull it back. Beliefs
// live as bumps, so a split packet directly exposes pose ambiguity.
class Can {
 public:
  static constexpr int kSide = 40;
  static constexpr int kLayers = 4;  // one per heading

  Can();

  // Wraps odometry coordinates onto the sheet, centered so the start pose
  // sits at (kSide/2, kSide/2).
  static grid::Pose wrap(grid::Pose odo);

  double at(int x, int y, grid::Heading h) const;
  double total() const;

  // Path integration for one executed action (skip calls for blocked moves),
  // followed by local excitation, global inhibition and renormalization.
  void step(grid::Action action);

  // Adds a packet of the given weight at the pose, then relaxes.
  void inject(grid::Pose sheet_pose, double weight);

  struct Decode {
    grid::Pose pose;         // sheet coordinates
    double ambiguity = 0.0;  // second peak / first peak; 1 when undecidable
  };
  Decode decode() const;

  std::size_t footprint_bytes() const;

 private:
  void relax();
  std::vector<double> a_;  // layer-major, then row, then column
};

}  // namespace hainav::cogmap
