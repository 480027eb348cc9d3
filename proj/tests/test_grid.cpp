#include <doctest.h>

#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "hainav/grid/maze.hpp"
#include "hainav/grid/observe.hpp"
#include "hainav/grid/render.hpp"
#include "hainav/grid/rng.hpp"

using namespace hainav::grid;

namespace {

// Open 7x7 room (width 7 => 9x9 grid), agent bottom-center of the interior.
Maze open_room() {
  std::string text = "9 9 1 1 7 0\n";
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      if (y == 0 || y == 8 || x == 0 || x == 8)
        text += '#';
      else if (x == 4 && y == 7)
        text += '@';
      else
        text += 'y';
    }
    text += '\n';
  }
  return from_text(text);
}

int reachable_floor_cells(const Maze& m) {
  std::queue<GridPoint> q;
  std::unordered_set<std::int64_t> seen;
  q.push(m.agent_start().cell);
  seen.insert(point_key(m.agent_start().cell));
  int count = 0;
  while (!q.empty()) {
    const GridPoint p = q.front();
    q.pop();
    ++count;
    for (const GridPoint d : {GridPoint{1, 0}, GridPoint{-1, 0}, GridPoint{0, 1}, GridPoint{0, -1}}) {
      const GridPoint n = p + d;
      if (!m.in_bounds(n) || m.at(n) == Tile::Wall) continue;
      if (seen.insert(point_key(n)).second) q.push(n);
    }
  }
  return count;
}

int total_walkable_cells(const Maze& m) {
  int count = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (is_walkable(m.at({x, y}))) ++count;
  return count;
}

}  // namespace

TEST_CASE("spanning tree connectivity: 3x3 rooms, no extras") {
  MazeSpec spec;
  spec.room_rows = 3;
  spec.room_cols = 3;
  spec.room_width = 4;
  spec.seed = 7;
  spec.extra_connection_prob = 0.0;
  const Maze m = generate_maze(spec);

  CHECK(m.rooms().size() == 9);
  CHECK(m.doors().size() == 8);  // tree edges on 9 nodes
  CHECK(m.width() == 20);
  CHECK(m.height() == 20);
  CHECK(reachable_floor_cells(m) == total_walkable_cells(m));
}

TEST_CASE("every adjacency gets a door when extras are certain") {
  MazeSpec spec;
  spec.room_rows = 3;
  spec.room_cols = 3;
  spec.room_width = 4;
  spec.seed = 3;
  spec.extra_connection_prob = 1.0;
  const Maze m = generate_maze(spec);
  CHECK(m.doors().size() == 12);  // all lattice adjacencies
}

TEST_CASE("connectivity holds across seeds and shapes") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    MazeSpec spec;
    spec.room_rows = 1 + static_cast<int>(seed % 3);
    spec.room_cols = 2 + static_cast<int>(seed % 4);
    spec.room_width = 4 + static_cast<int>(seed % 5);
    spec.seed = seed * 977 + 5;
    const Maze m = generate_maze(spec);
    CHECK(reachable_floor_cells(m) == total_walkable_cells(m));
    // every door sits in the middle of its aisle: both perpendicular
    // neighbours along the band are grey floor, the others are wall
    for (const auto& d : m.doors()) {
      int open_neighbours = 0;
      for (const GridPoint dd :
           {GridPoint{1, 0}, GridPoint{-1, 0}, GridPoint{0, 1}, GridPoint{0, -1}}) {
        if (m.at(d.cell + dd) == Tile::FloorGrey || m.at(d.cell + dd) == Tile::White)
          ++open_neighbours;
      }
      CHECK(open_neighbours == 2);
    }
  }
}

TEST_CASE("spec validation") {
  MazeSpec spec;
  spec.room_width = 3;
  CHECK_THROWS_AS(generate_maze(spec), std::invalid_argument);
  spec.room_width = 9;
  CHECK_THROWS_AS(generate_maze(spec), std::invalid_argument);
  spec.room_width = 4;
  spec.room_rows = 0;
  CHECK_THROWS_AS(generate_maze(spec), std::invalid_argument);
}

TEST_CASE("generation is reproducible, seeds differ") {
  MazeSpec spec;
  spec.seed = 42;
  const std::string a = to_text(generate_maze(spec));
  const std::string b = to_text(generate_maze(spec));
  CHECK(a == b);
  spec.seed = 43;
  CHECK(to_text(generate_maze(spec)) != a);
}

TEST_CASE("text round trip") {
  MazeSpec spec;
  spec.seed = 11;
  spec.room_rows = 2;
  spec.room_cols = 3;
  spec.room_width = 5;
  const Maze m = generate_maze(spec);
  const std::string text = to_text(m);
  const Maze back = from_text(text);
  CHECK(to_text(back) == text);
  CHECK(back.agent_start() == m.agent_start());
  REQUIRE(back.rooms().size() == m.rooms().size());
  for (std::size_t i = 0; i < m.rooms().size(); ++i) {
    CHECK(back.rooms()[i].floor == m.rooms()[i].floor);
    CHECK(back.rooms()[i].min == m.rooms()[i].min);
  }
  REQUIRE(back.doors().size() == m.doors().size());
  std::set<std::pair<int, int>> got, want;
  for (const auto& d : back.doors()) got.insert({d.room_a, d.room_b});
  for (const auto& d : m.doors()) want.insert({d.room_a, d.room_b});
  CHECK(got == want);
}

TEST_CASE("turns cycle and forward moves one cell") {
  Maze m = open_room();
  Pose p = m.agent_start();
  CHECK(p.heading == Heading::North);
  p = step(m, p, Action::TurnLeft).pose;
  CHECK(p.heading == Heading::West);
  p = step(m, p, Action::TurnRight).pose;
  CHECK(p.heading == Heading::North);
  const auto res = step(m, p, Action::Forward);
  CHECK_FALSE(res.collision);
  CHECK(res.pose.cell == GridPoint{4, 6});
}

TEST_CASE("collision happens exactly on walls and bounds") {
  Maze m = open_room();
  Pose p = {{4, 1}, Heading::North};  // top interior row, facing the border wall
  m.settle_doors(p);
  const auto res = step(m, p, Action::Forward);
  CHECK(res.collision);
  CHECK(res.pose == p);
}

TEST_CASE("random walk: collision iff faced cell is wall or outside") {
  MazeSpec spec;
  spec.seed = 99;
  Maze m = generate_maze(spec);
  Pose p = m.agent_start();
  Rng rng(123);
  for (int i = 0; i < 500; ++i) {
    const auto a = static_cast<Action>(rng.below_int(3));
    const GridPoint faced = p.cell + heading_dir(p.heading);
    const bool expect_hit =
        a == Action::Forward && (!m.in_bounds(faced) || m.at(faced) == Tile::Wall);
    const auto res = step(m, p, a);
    CHECK(res.collision == expect_hit);
    if (expect_hit) CHECK(res.pose == p);
    p = res.pose;
  }
}

TEST_CASE("doors open while faced or stood on and close behind") {
  MazeSpec spec;
  spec.seed = 5;
  spec.extra_connection_prob = 0.0;
  Maze m = generate_maze(spec);
  REQUIRE(!m.doors().empty());
  const GridPoint door = m.doors()[0].cell;

  // walk the aisle: grey cell before the door, looking at it
  GridPoint before;
  Heading toward{};
  for (const Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
    const GridPoint c = door - heading_dir(h);
    if (m.in_bounds(c) && m.at(c) == Tile::FloorGrey) {
      before = c;
      toward = h;
      break;
    }
  }
  Pose p{before, toward};
  m.settle_doors(p);
  CHECK(m.at(door) == Tile::DoorOpen);

  auto res = step(m, p, Action::Forward);  // onto the door
  CHECK_FALSE(res.collision);
  CHECK(res.pose.cell == door);
  CHECK(m.at(door) == Tile::DoorOpen);  // cannot close under the agent

  res = step(m, res.pose, Action::Forward);  // through
  CHECK_FALSE(res.collision);
  CHECK(m.at(door) == Tile::DoorClosed);

  // turning away from an adjacent door closes it again
  p = {before, toward};
  m.settle_doors(p);
  CHECK(m.at(door) == Tile::DoorOpen);
  res = step(m, p, Action::TurnLeft);
  CHECK(m.at(door) == Tile::DoorClosed);
}

TEST_CASE("open area: all 49 window cells visible, own cell included") {
  Maze m = open_room();
  const Observation obs = observe(m, m.agent_start());
  CHECK(obs.visible_count() == 49);
  CHECK(obs.at(0, 0).has_value());
  CHECK(*obs.at(0, 0) == Tile::FloorGrey);
}

TEST_CASE("wall one cell ahead hides the cone behind it") {
  Maze m = open_room();
  m.set({4, 6}, Tile::Wall);  // directly ahead of (4,7) facing north
  const Observation obs = observe(m, {{4, 7}, Heading::North});
  CHECK(obs.at(1, 0).has_value());  // the wall itself is seen
  CHECK(*obs.at(1, 0) == Tile::Wall);
  for (int f = 2; f < Observation::kSpan; ++f) CHECK_FALSE(obs.at(f, 0).has_value());
}

TEST_CASE("closed door occludes, open door reveals") {
  MazeSpec spec;
  spec.seed = 21;
  spec.extra_connection_prob = 0.0;
  Maze m = generate_maze(spec);
  const GridPoint door = m.doors()[0].cell;
  Heading toward{};
  GridPoint before;
  for (const Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
    const GridPoint c = door - heading_dir(h);
    if (m.in_bounds(c) && m.at(c) == Tile::FloorGrey) {
      before = c;
      toward = h;
      break;
    }
  }
  const GridPoint beyond = door + heading_dir(toward);

  // two cells back, facing the door: it is closed, cells behind it hidden
  const GridPoint far = before - heading_dir(toward);
  if (m.in_bounds(far) && m.at(far) != Tile::Wall) {
    Pose p{far, toward};
    m.settle_doors(p);
    const Observation obs = observe(m, p);
    CHECK(*obs.at(2, 0) == Tile::DoorClosed);
    CHECK_FALSE(obs.at(3, 0).has_value());
  }

  // adjacent and facing: open, the aisle beyond is visible
  Pose p{before, toward};
  m.settle_doors(p);
  const Observation obs = observe(m, p);
  CHECK(*obs.at(1, 0) == Tile::DoorOpen);
  REQUIRE(obs.at(2, 0).has_value());
  CHECK(*obs.at(2, 0) == m.at(beyond));
}

TEST_CASE("window cells outside the maze are absent") {
  Maze m = open_room();
  const Observation obs = observe(m, {{1, 1}, Heading::North});  // top-left interior corner
  CHECK_FALSE(obs.at(2, 0).has_value());   // beyond the border
  CHECK_FALSE(obs.at(0, -3).has_value());  // left of the border
  CHECK(obs.at(1, 0).has_value());         // border wall itself
}

TEST_CASE("removing an opaque cell never shrinks the visible set") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    MazeSpec spec;
    spec.seed = 1000 + trial;
    spec.room_rows = 2;
    spec.room_cols = 2;
    spec.room_width = 4 + trial % 5;
    Maze m = generate_maze(spec);
    Pose p = m.agent_start();
    for (int i = 0; i < 10; ++i) p = step(m, p, static_cast<Action>(rng.below_int(3))).pose;

    // find a wall inside the window's bounding region
    GridPoint wall{-1, -1};
    for (const auto& off : window_offsets()) {
      const GridPoint c = p.cell + window_to_world(p.heading, off.forward, off.right);
      if (m.in_bounds(c) && m.at(c) == Tile::Wall) {
        wall = c;
        break;
      }
    }
    if (wall.x < 0) continue;

    const Observation base = observe(m, p);
    Maze relaxed = m;
    relaxed.set(wall, Tile::FloorGrey);
    const Observation more = observe(relaxed, p);
    for (int i = 0; i < 49; ++i) {
      if (base.cells[i].has_value()) CHECK(more.cells[i].has_value());
    }
    CHECK(more.visible_count() >= base.visible_count());
  }
}

TEST_CASE("observation renders to 56x56, maze tiles to 8x8 blocks") {
  Maze m = open_room();
  const Image obs_img = render_rgb(observe(m, m.agent_start()));
  CHECK(obs_img.width == 56);
  CHECK(obs_img.height == 56);

  const Image maze_img = render_rgb(Maze(12, 12));
  CHECK(maze_img.width == 96);
  CHECK(maze_img.height == 96);

  // agent row lands at the bottom of the observation image
  const Observation obs = observe(m, m.agent_start());
  const Rgb own = tile_color(*obs.at(0, 0));
  const auto* px = &obs_img.pixels[((56 - 1) * 56 + 28) * 3];
  CHECK(px[0] == own.r);
  CHECK(px[1] == own.g);
  CHECK(px[2] == own.b);
}

TEST_CASE("window-to-world rotation table") {
  CHECK(window_to_world(Heading::North, 2, 1) == GridPoint{1, -2});
  CHECK(window_to_world(Heading::East, 2, 1) == GridPoint{2, 1});
  CHECK(window_to_world(Heading::South, 2, 1) == GridPoint{-1, 2});
  CHECK(window_to_world(Heading::West, 2, 1) == GridPoint{-2, -1});
}
