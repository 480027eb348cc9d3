#include "hainav/grid/observe.hpp"

#include <algorithm>
#include <vector>

namespace hainav::grid {

namespace {

// Exact rational for sight-line tests; denominators stay positive.
struct Frac {
  long long num = 0;
  long long den = 1;

  static Frac make(long long n, long long d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    return {n, d};
  }
  friend bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
};

// Does the open segment from the agent center to the target center cross the
// open interior of the blocker cell? Coordinates are doubled so cell centers
// are even and cell boundaries odd: a sight line touching only a corner or
// edge yields a zero-length interval and does not block.
bool crosses_interior(WindowOffset target, WindowOffset blocker) {
  const long long dir[2] = {2ll * target.forward, 2ll * target.right};
  const long long lo[2] = {2ll * blocker.forward - 1, 2ll * blocker.right - 1};
  const long long hi[2] = {2ll * blocker.forward + 1, 2ll * blocker.right + 1};

  Frac enter{0, 1}, exit{1, 1};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0) {
      if (lo[axis] >= 0 || hi[axis] <= 0) return false;  // start not inside slab
      continue;
    }
    Frac t0 = Frac::make(lo[axis], dir[axis]);
    Frac t1 = Frac::make(hi[axis], dir[axis]);
    if (t1 < t0) std::swap(t0, t1);
    if (enter < t0) enter = t0;
    if (t1 < exit) exit = t1;
  }
  return enter < exit;
}

struct BlockerTable {
  std::array<WindowOffset, 49> offsets;
  std::array<std::vector<WindowOffset>, 49> blockers;

  BlockerTable() {
    int i = 0;
    for (int f = 0; f < Observation::kSpan; ++f)
      for (int r = -3; r <= 3; ++r) offsets[i++] = {f, r};

    for (const auto& target : offsets) {
      auto& list = blockers[Observation::index(target.forward, target.right)];
      if (target.forward == 0 && target.right == 0) continue;
      for (const auto& cand : offsets) {
        if ((cand.forward == 0 && cand.right == 0) ||
            (cand.forward == target.forward && cand.right == target.right))
          continue;
        if (crosses_interior(target, cand)) list.push_back(cand);
      }
      std::sort(list.begin(), list.end(), [](WindowOffset a, WindowOffset b) {
        return a.forward * a.forward + a.right * a.right <
               b.forward * b.forward + b.right * b.right;
      });
    }
  }
};

const BlockerTable& table() {
  static const BlockerTable t;
  return t;
}

}  // namespace

const std::array<WindowOffset, 49>& window_offsets() { return table().offsets; }

const std::vector<WindowOffset>& blockers_for(int forward, int right) {
  return table().blockers[Observation::index(forward, right)];
}

Observation observe(const Maze& maze, Pose pose) {
  Observation obs;
  const auto opaque = [&](GridPoint c) {
    if (!maze.in_bounds(c)) return false;
    const Tile t = maze.at(c);
    return t == Tile::Wall || t == Tile::DoorClosed;
  };
  const auto exists = [&](GridPoint c) { return maze.in_bounds(c); };
  const auto vis = visible_window(pose, opaque, exists);
  for (const auto& off : window_offsets()) {
    const int i = Observation::index(off.forward, off.right);
    if (!vis[i]) continue;
    obs.cells[i] = maze.at(pose.cell + window_to_world(pose.heading, off.forward, off.right));
  }
  return obs;
}

}  // namespace hainav::grid
