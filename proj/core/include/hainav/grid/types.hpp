#pragma once

#include <array>
#include <cstdint>
#include <functional>

namespace hainav::grid {

// Concrete cell contents. Door state is part of the tile so a serialized
// grid is self-contained.
enum class Tile : std::uint8_t {
  Wall = 0,
  DoorClosed,
  DoorOpen,
  FloorRed,
  FloorGreen,
  FloorBlue,
  FloorPurple,
  FloorGrey,
  White,
};

// Inference classes. Open and closed doors collapse into one group; the
// distinction is dynamic, not structural.
enum class TileGroup : std::uint8_t {
  Wall = 0,
  Door,
  FloorRed,
  FloorGreen,
  FloorBlue,
  FloorPurple,
  FloorGrey,
  White,
};

inline constexpr int kGroupCount = 8;

constexpr TileGroup group_of(Tile t) {
  switch (t) {
    case Tile::Wall: return TileGroup::Wall;
    case Tile::DoorClosed:
    case Tile::DoorOpen: return TileGroup::Door;
    case Tile::FloorRed: return TileGroup::FloorRed;
    case Tile::FloorGreen: return TileGroup::FloorGreen;
    case Tile::FloorBlue: return TileGroup::FloorBlue;
    case Tile::FloorPurple: return TileGroup::FloorPurple;
    case Tile::FloorGrey: return TileGroup::FloorGrey;
    case Tile::White: return TileGroup::White;
  }
  return TileGroup::Wall;
}

constexpr bool is_floor(Tile t) {
  switch (t) {
    case Tile::FloorRed:
    case Tile::FloorGreen:
    case Tile::FloorBlue:
    case Tile::FloorPurple:
    case Tile::FloorGrey: return true;
    default: return false;
  }
}

constexpr bool is_walkable(Tile t) { return t != Tile::Wall; }

enum class Heading : std::uint8_t { North = 0, East, South, West };

enum class Action : std::uint8_t { TurnLeft = 0, TurnRight, Forward };

constexpr Heading turn_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}
constexpr Heading turn_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

struct GridPoint {
  int x = 0;  // column
  int y = 0;  // row, grows downward

  friend constexpr bool operator==(GridPoint a, GridPoint b) {
    return a.x == b.x && a.y == b.y;
  }
  friend constexpr bool operator!=(GridPoint a, GridPoint b) { return !(a == b); }
  friend constexpr GridPoint operator+(GridPoint a, GridPoint b) {
    return {a.x + b.x, a.y + b.y};
  }
  friend constexpr GridPoint operator-(GridPoint a, GridPoint b) {
    return {a.x - b.x, a.y - b.y};
  }
};

// Packs a point into a hashable key; coordinates stay well inside 32 bit.
constexpr std::int64_t point_key(GridPoint p) {
  return (static_cast<std::int64_t>(p.x) << 32) ^ (static_cast<std::uint32_t>(p.y));
}

constexpr GridPoint point_from_key(std::int64_t key) {
  return {static_cast<std::int32_t>(key >> 32),
          static_cast<std::int32_t>(static_cast<std::uint32_t>(key & 0xffffffff))};
}

constexpr GridPoint heading_dir(Heading h) {
  switch (h) {
    case Heading::North: return {0, -1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, 1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

struct Pose {
  GridPoint cell;
  Heading heading = Heading::North;

  friend constexpr bool operator==(const Pose& a, const Pose& b) {
    return a.cell == b.cell && a.heading == b.heading;
  }
  friend constexpr bool operator!=(const Pose& a, const Pose& b) { return !(a == b); }
};

constexpr Pose apply_action(Pose p, Action a, bool forward_blocked = false) {
  switch (a) {
    case Action::TurnLeft: p.heading = turn_left(p.heading); break;
    case Action::TurnRight: p.heading = turn_right(p.heading); break;
    case Action::Forward:
      if (!forward_blocked) p.cell = p.cell + heading_dir(p.heading);
      break;
  }
  return p;
}

// Maps a window offset (forward >= 0 rows ahead, right offset in [-3, 3])
// into a world offset for the given heading. The agent sits at f=0, r=0.
constexpr GridPoint window_to_world(Heading h, int forward, int right) {
  switch (h) {
    case Heading::North: return {right, -forward};
    case Heading::East: return {forward, right};
    case Heading::South: return {-right, forward};
    case Heading::West: return {-forward, -right};
  }
  return {0, 0};
}

}  // namespace hainav::grid

template <>
struct std::hash<hainav::grid::GridPoint> {
  std::size_t operator()(hainav::grid::GridPoint p) const noexcept {
    return std::hash<std::int64_t>{}(hainav::grid::point_key(p));
  }
};
