#include "hainav/run/astar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "hainav/grid/observe.hpp"

namespace hainav::run {

namespace {

constexpr int kInf = 1 << 29;

int state_of(const grid::Maze& m, grid::Pose p) {
  return (p.cell.y * m.width() + p.cell.x) * 4 + static_cast<int>(p.heading);
}

grid::Pose pose_of(const grid::Maze& m, int state) {
  const int cell = state / 4;
  return {{cell % m.width(), cell / m.width()}, static_cast<grid::Heading>(state % 4)};
}

bool passable(const grid::Maze& m, grid::GridPoint p) {
  return m.in_bounds(p) && grid::is_walkable(m.at(p));
}

// Successors tried Forward, TurnLeft, TurnRight: with ties kept on first
// discovery this makes equal-cost plans prefer walking, then left turns.
constexpr grid::Action kOrder[3] = {grid::Action::Forward, grid::Action::TurnLeft,
                                    grid::Action::TurnRight};

// Uniform-cost search from `from` until `done(state)`; returns the action
// path, or nothing when the reachable set is exhausted. Unit costs make a
// plain FIFO-tie-broken Dijkstra both optimal and deterministic; `h` may add
// an admissible bias (0 for the exploration searches).
template <typename DoneFn, typename HeurFn>
std::optional<std::vector<grid::Action>> search(const grid::Maze& maze, grid::Pose from,
                                                DoneFn&& done, HeurFn&& h) {
  const int states = maze.width() * maze.height() * 4;
  std::vector<int> dist(states, kInf);
  std::vector<int> parent(states, -1);
  std::vector<grid::Action> via(states, grid::Action::Forward);

  using Item = std::tuple<int, std::uint64_t, int>;  // f, fifo tick, state
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::uint64_t tick = 0;

  const int start = state_of(maze, from);
  dist[start] = 0;
  open.emplace(h(from), tick++, start);

  while (!open.empty()) {
    const auto [f, order, s] = open.top();
    (void)order;
    open.pop();
    const grid::Pose pose = pose_of(maze, s);
    if (f > dist[s] + h(pose)) continue;  // stale entry
    if (done(s, pose)) {
      std::vector<grid::Action> actions;
      for (int at = s; parent[at] != -1 || at != start; at = parent[at])
        actions.push_back(via[at]);
      std::reverse(actions.begin(), actions.end());
      return actions;
    }
    for (const grid::Action a : kOrder) {
      grid::Pose next = grid::apply_action(pose, a);
      if (a == grid::Action::Forward && !passable(maze, next.cell)) continue;
      const int ns = state_of(maze, next);
      if (dist[s] + 1 < dist[ns]) {
        dist[ns] = dist[s] + 1;
        parent[ns] = s;
        via[ns] = a;
        open.emplace(dist[ns] + h(next), tick++, ns);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<grid::Action> oracle_astar(const grid::Maze& maze, grid::Pose from,
                                       grid::GridPoint to) {
  if (!passable(maze, to)) throw std::invalid_argument("target cell is not walkable");
  auto path = search(
      maze, from, [&](int, grid::Pose p) { return p.cell == to; },
      [&](grid::Pose p) { return std::abs(p.cell.x - to.x) + std::abs(p.cell.y - to.y); });
  if (!path) throw std::invalid_argument("target cell unreachable");
  return *path;
}

std::vector<grid::GridPoint> observable_cells(const grid::Maze& maze) {
  // Reachable floor first: turns are always legal, so reachability is a
  // plain 4-neighbor flood over walkable cells.
  std::vector<char> reach(maze.width() * maze.height(), 0);
  std::queue<grid::GridPoint> q;
  q.push(maze.agent_start().cell);
  reach[maze.agent_start().cell.y * maze.width() + maze.agent_start().cell.x] = 1;
  while (!q.empty()) {
    const grid::GridPoint p = q.front();
    q.pop();
    for (const auto d : {grid::GridPoint{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const grid::GridPoint n = p + d;
      if (!passable(maze, n) || reach[n.y * maze.width() + n.x]) continue;
      reach[n.y * maze.width() + n.x] = 1;
      q.push(n);
    }
  }

  grid::Maze scratch = maze;
  std::unordered_set<std::int64_t> seen;
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x) {
      if (!reach[y * maze.width() + x]) continue;
      for (int h = 0; h < 4; ++h) {
        const grid::Pose pose{{x, y}, static_cast<grid::Heading>(h)};
        scratch.settle_doors(pose);
        const auto obs = grid::observe(scratch, pose);
        for (const auto& off : grid::window_offsets())
          if (obs.at(off.forward, off.right))
            seen.insert(grid::point_key(
                pose.cell + grid::window_to_world(pose.heading, off.forward, off.right)));
      }
    }

  std::vector<std::int64_t> keys(seen.begin(), seen.end());
  std::sort(keys.begin(), keys.end());
  std::vector<grid::GridPoint> out;
  out.reserve(keys.size());
  for (const auto k : keys) out.push_back(grid::point_from_key(k));
  return out;
}

std::vector<grid::Action> oracle_explore(const grid::Maze& maze, grid::Pose from,
                                         double target) {
  const auto observable = observable_cells(maze);
  std::unordered_set<std::int64_t> wanted;
  for (const auto c : observable) wanted.insert(grid::point_key(c));
  const std::size_t need =
      static_cast<std::size_t>(std::ceil(target * static_cast<double>(observable.size())));

  grid::Maze world = maze;
  std::unordered_set<std::int64_t> seen;
  auto absorb = [&](grid::Pose pose) {
    world.settle_doors(pose);
    const auto obs = grid::observe(world, pose);
    for (const auto& off : grid::window_offsets())
      if (obs.at(off.forward, off.right))
        seen.insert(grid::point_key(pose.cell +
                                    grid::window_to_world(pose.heading, off.forward, off.right)));
  };

  grid::Pose pose = from;
  absorb(pose);
  std::vector<grid::Action> actions;
  grid::Maze scratch = maze;
  while (seen.size() < need) {
    auto leg = search(
        world, pose,
        [&](int, grid::Pose p) {
          scratch.settle_doors(p);
          const auto obs = grid::observe(scratch, p);
          for (const auto& off : grid::window_offsets()) {
            if (!obs.at(off.forward, off.right)) continue;
            const auto key = grid::point_key(
                p.cell + grid::window_to_world(p.heading, off.forward, off.right));
            if (!seen.count(key)) return true;
          }
          return false;
        },
        [](grid::Pose) { return 0; });
    if (!leg) throw std::logic_error("unseen observable cell unreachable");
    for (const grid::Action a : *leg) {
      actions.push_back(a);
      pose = grid::step(world, pose, a).pose;
      absorb(pose);
      if (seen.size() >= need) break;
    }
  }
  return actions;
}

}  // namespace hainav::run
