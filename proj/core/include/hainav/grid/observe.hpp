#pragma once

#include <array>
#include <functional>
#include <optional>

#include "hainav/grid/maze.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::grid {

// 7x7 egocentric window. The agent occupies the bottom-center cell (forward 0,
// right 0) and looks along increasing forward. Cells outside the world or
// behind an opaque cell are absent.
struct Observation {
  static constexpr int kSpan = 7;
  static constexpr int kAhead = 6;  // forward rows beyond the agent's own row
  static constexpr int kCells = kSpan * kSpan;

  std::array<std::optional<Tile>, kSpan * kSpan> cells;
  bool collision = false;

  static constexpr int index(int forward, int right) {
    return forward * kSpan + (right + 3);
  }
  const std::optional<Tile>& at(int forward, int right) const {
    return cells[index(forward, right)];
  }
  std::optional<Tile>& at(int forward, int right) { return cells[index(forward, right)]; }

  int visible_count() const {
    int n = 0;
    for (const auto& c : cells) n += c.has_value();
    return n;
  }
};

struct WindowOffset {
  int forward = 0;
  int right = 0;
};

// Window offsets in a fixed scan order (forward major, right minor).
const std::array<WindowOffset, 49>& window_offsets();

// Cells whose interior an agent-to-target sight line crosses. Precomputed
// exactly (rational slab test), so a corner graze never blocks.
const std::vector<WindowOffset>& blockers_for(int forward, int right);

// Visibility over an arbitrary belief or world: `opaque(cell)` answers for
// absolute cells. The agent's own cell never blocks. Bounds are handled by
// the caller via `exists`.
template <typename OpaqueFn, typename ExistsFn>
std::array<bool, 49> visible_window(Pose pose, OpaqueFn&& opaque, ExistsFn&& exists) {
  std::array<bool, 49> vis{};
  for (const auto& off : window_offsets()) {
    const GridPoint cell = pose.cell + window_to_world(pose.heading, off.forward, off.right);
    if (!exists(cell)) continue;
    bool blocked = false;
    for (const auto& b : blockers_for(off.forward, off.right)) {
      const GridPoint bc = pose.cell + window_to_world(pose.heading, b.forward, b.right);
      if (opaque(bc)) {
        blocked = true;
        break;
      }
    }
    vis[Observation::index(off.forward, off.right)] = !blocked;
  }
  return vis;
}

// Soft visibility for imagined looks: the chance each window cell is in view
// given per-cell opacity beliefs. A cell's weight is the product of its
// blockers' transparencies; its own opacity never gates seeing it. Belief
// models use this for expected gains so that fog behind fog stops promising
// the full fresh-cell rate.
template <typename POpaqueFn>
std::array<double, 49> visibility_weights(Pose pose, POpaqueFn&& p_opaque) {
  std::array<double, 49> w{};
  for (const auto& off : window_offsets()) {
    double pass = 1.0;
    for (const auto& b : blockers_for(off.forward, off.right)) {
      const GridPoint bc = pose.cell + window_to_world(pose.heading, b.forward, b.right);
      pass *= 1.0 - p_opaque(bc);
    }
    w[Observation::index(off.forward, off.right)] = pass;
  }
  return w;
}

// Ground-truth observation at the pose. Door states must already match the
// pose (step() keeps them settled); walls and closed doors occlude.
Observation observe(const Maze& maze, Pose pose);

}  // namespace hainav::grid
