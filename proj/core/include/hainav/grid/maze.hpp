#pragma once

#include <string>
#include <vector>

#include "hainav/grid/types.hpp"

namespace hainav::grid {

struct MazeSpec {
  int room_rows = 3;
  int room_cols = 3;
  int room_width = 4;  // square room interior, 4..8
  std::uint64_t seed = 0;
  int white_tiles = 1;
  double extra_connection_prob = 0.3;
};

struct Room {
  GridPoint min;  // interior bounding box, inclusive
  GridPoint max;
  Tile floor = Tile::FloorGrey;

  bool contains(GridPoint p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct Door {
  GridPoint cell;
  int room_a = 0;  // room indices, row-major
  int room_b = 0;
};

// Rooms on a grid, separated by 3-cell walls carved by aisles with a door in
// the middle cell. Outer border is wall. Doors open while faced or stood on
// and are closed otherwise.
class Maze {
 public:
  Maze() = default;
  Maze(int width, int height) : width_(width), height_(height), grid_(width * height, Tile::Wall) {}

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(GridPoint p) const {
    return p.x >= 0 && p.x < width_ && p.y >= 0 && p.y < height_;
  }

  Tile at(GridPoint p) const { return grid_[p.y * width_ + p.x]; }
  void set(GridPoint p, Tile t) { grid_[p.y * width_ + p.x] = t; }

  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Door>& doors() const { return doors_; }
  Pose agent_start() const { return agent_start_; }
  const MazeSpec& spec() const { return spec_; }

  // Door cells ahead of (or under) the pose open, all others close.
  void settle_doors(Pose pose);

  friend Maze generate_maze(const MazeSpec& spec);
  friend Maze from_text(const std::string& text);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Tile> grid_;
  std::vector<Room> rooms_;
  std::vector<Door> doors_;
  Pose agent_start_;
  MazeSpec spec_;
};

// Throws std::invalid_argument if the spec is out of range
// (room counts < 1 or width outside [4, 8]).
Maze generate_maze(const MazeSpec& spec);

struct StepResult {
  Pose pose;
  bool collision = false;
};

// Forward into Wall or out of bounds leaves the pose unchanged and reports a
// collision; doors never collide because facing them opens them. Mutates the
// maze's door states to match the new pose.
StepResult step(Maze& maze, Pose pose, Action action);

// One character per cell: '#' wall, '+' door, r/g/b/p floor colors, y grey,
// 'W' white, '@' agent start. Header line: rows cols room_rows room_cols
// room_width seed.
std::string to_text(const Maze& maze);
Maze from_text(const std::string& text);

}  // namespace hainav::grid
