#include "hainav/grid/maze.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "hainav/grid/rng.hpp"

namespace hainav::grid {

namespace {

constexpr std::array<Tile, 4> kPalette = {Tile::FloorRed, Tile::FloorGreen, Tile::FloorBlue,
                                          Tile::FloorPurple};

constexpr int kBand = 3;  // wall band between rooms; the aisle runs through it

struct Adjacency {
  int a = 0;
  int b = 0;
  bool horizontal = false;  // rooms side by side (shared vertical band)
};

int room_origin(int index, int width) { return 1 + index * (width + kBand); }

std::vector<Adjacency> adjacencies(int rows, int cols) {
  std::vector<Adjacency> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) out.push_back({i, i + 1, true});
      if (r + 1 < rows) out.push_back({i, i + cols, false});
    }
  }
  return out;
}

// Wilson's loop-erased random walk; every spanning tree is equally likely.
std::vector<bool> uniform_spanning_tree(int rows, int cols, const std::vector<Adjacency>& edges,
                                        Rng& rng) {
  const int n = rows * cols;
  std::vector<std::vector<std::pair<int, int>>> nbr(n);  // (node, edge index)
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    nbr[edges[e].a].push_back({edges[e].b, e});
    nbr[edges[e].b].push_back({edges[e].a, e});
  }

  std::vector<bool> in_tree(n, false), picked(edges.size(), false);
  std::vector<int> next_node(n, -1), next_edge(n, -1);
  in_tree[0] = true;
  for (int root = 1; root < n; ++root) {
    if (in_tree[root]) continue;
    int u = root;
    while (!in_tree[u]) {
      const auto& choice = nbr[u][rng.below_int(static_cast<int>(nbr[u].size()))];
      next_node[u] = choice.first;
      next_edge[u] = choice.second;
      u = choice.first;
    }
    u = root;
    while (!in_tree[u]) {
      in_tree[u] = true;
      picked[next_edge[u]] = true;
      u = next_node[u];
    }
  }
  return picked;
}

char tile_char(Tile t) {
  switch (t) {
    case Tile::Wall: return '#';
    case Tile::DoorClosed:
    case Tile::DoorOpen: return '+';
    case Tile::FloorRed: return 'r';
    case Tile::FloorGreen: return 'g';
    case Tile::FloorBlue: return 'b';
    case Tile::FloorPurple: return 'p';
    case Tile::FloorGrey: return 'y';
    case Tile::White: return 'W';
  }
  return '#';
}

Tile char_tile(char c) {
  switch (c) {
    case '#': return Tile::Wall;
    case '+': return Tile::DoorClosed;
    case 'r': return Tile::FloorRed;
    case 'g': return Tile::FloorGreen;
    case 'b': return Tile::FloorBlue;
    case 'p': return Tile::FloorPurple;
    case 'y':
    case '.': return Tile::FloorGrey;
    case 'W': return Tile::White;
    default: throw std::invalid_argument(std::string("unknown maze cell '") + c + "'");
  }
}

}  // namespace

void Maze::settle_doors(Pose pose) {
  const GridPoint faced = pose.cell + heading_dir(pose.heading);
  for (const auto& d : doors_) {
    const bool open = d.cell == faced || d.cell == pose.cell;
    set(d.cell, open ? Tile::DoorOpen : Tile::DoorClosed);
  }
}

Maze generate_maze(const MazeSpec& spec) {
  if (spec.room_rows < 1 || spec.room_cols < 1)
    throw std::invalid_argument("maze needs at least one room");
  if (spec.room_width < 4 || spec.room_width > 8)
    throw std::invalid_argument("room width must be in [4, 8]");
  if (spec.white_tiles < 0) throw std::invalid_argument("white tile count must be >= 0");
  if (spec.extra_connection_prob < 0.0 || spec.extra_connection_prob > 1.0)
    throw std::invalid_argument("extra connection probability must be in [0, 1]");

  const int w = spec.room_width;
  const int width = 2 + spec.room_cols * w + (spec.room_cols - 1) * kBand;
  const int height = 2 + spec.room_rows * w + (spec.room_rows - 1) * kBand;

  Maze m(width, height);
  m.spec_ = spec;
  Rng rng(spec.seed);

  for (int r = 0; r < spec.room_rows; ++r) {
    for (int c = 0; c < spec.room_cols; ++c) {
      Room room;
      room.min = {room_origin(c, w), room_origin(r, w)};
      room.max = {room.min.x + w - 1, room.min.y + w - 1};
      room.floor = kPalette[rng.below_int(static_cast<int>(kPalette.size()))];
      for (int y = room.min.y; y <= room.max.y; ++y)
        for (int x = room.min.x; x <= room.max.x; ++x) m.set({x, y}, room.floor);
      m.rooms_.push_back(room);
    }
  }

  const auto edges = adjacencies(spec.room_rows, spec.room_cols);
  auto picked = uniform_spanning_tree(spec.room_rows, spec.room_cols, edges, rng);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!picked[e] && rng.bernoulli(spec.extra_connection_prob)) picked[e] = true;
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!picked[e]) continue;
    const auto& adj = edges[e];
    const int ar = adj.a / spec.room_cols;
    const int ac = adj.a % spec.room_cols;
    const int offset = rng.below_int(w);  // aisle position along the shared wall
    GridPoint cells[kBand];
    if (adj.horizontal) {
      const int x0 = room_origin(ac, w) + w;
      const int y = room_origin(ar, w) + offset;
      for (int k = 0; k < kBand; ++k) cells[k] = {x0 + k, y};
    } else {
      const int y0 = room_origin(ar, w) + w;
      const int x = room_origin(ac, w) + offset;
      for (int k = 0; k < kBand; ++k) cells[k] = {x, y0 + k};
    }
    m.set(cells[0], Tile::FloorGrey);
    m.set(cells[1], Tile::DoorClosed);
    m.set(cells[2], Tile::FloorGrey);
    m.doors_.push_back({cells[1], adj.a, adj.b});
  }

  std::vector<GridPoint> interior;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const GridPoint p{x, y};
      if (!is_floor(m.at(p))) continue;
      for (const auto& room : m.rooms_)
        if (room.contains(p)) {
          interior.push_back(p);
          break;
        }
    }
  m.agent_start_ = {interior[rng.below(interior.size())], Heading::North};

  std::vector<GridPoint> floor_cells;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const GridPoint p{x, y};
      if (is_floor(m.at(p)) && p != m.agent_start_.cell) floor_cells.push_back(p);
    }
  const int whites = std::min<int>(spec.white_tiles, static_cast<int>(floor_cells.size()));
  for (int k = 0; k < whites; ++k) {
    const std::size_t pick = k + rng.below(floor_cells.size() - k);
    std::swap(floor_cells[k], floor_cells[pick]);
    m.set(floor_cells[k], Tile::White);
  }

  m.settle_doors(m.agent_start_);
  return m;
}

StepResult step(Maze& maze, Pose pose, Action action) {
  StepResult res;
  if (action == Action::Forward) {
    const GridPoint target = pose.cell + heading_dir(pose.heading);
    if (!maze.in_bounds(target) || maze.at(target) == Tile::Wall) {
      res.collision = true;
    } else {
      pose.cell = target;  // closed doors are walkable: facing them opened them
    }
  } else {
    pose = apply_action(pose, action);
  }
  res.pose = pose;
  maze.settle_doors(pose);
  return res;
}

std::string to_text(const Maze& maze) {
  std::ostringstream out;
  const auto& spec = maze.spec();
  out << maze.height() << ' ' << maze.width() << ' ' << spec.room_rows << ' ' << spec.room_cols
      << ' ' << spec.room_width << ' ' << spec.seed << '\n';
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      const GridPoint p{x, y};
      out << (p == maze.agent_start().cell ? '@' : tile_char(maze.at(p)));
    }
    out << '\n';
  }
  return out.str();
}

Maze from_text(const std::string& text) {
  std::istringstream in(text);
  int rows = 0, cols = 0;
  MazeSpec spec;
  if (!(in >> rows >> cols >> spec.room_rows >> spec.room_cols >> spec.room_width >> spec.seed))
    throw std::invalid_argument("bad maze header");
  std::string line;
  std::getline(in, line);

  Maze m(cols, rows);
  m.spec_ = spec;
  bool have_start = false;
  for (int y = 0; y < rows; ++y) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != cols)
      throw std::invalid_argument("bad maze row " + std::to_string(y));
    for (int x = 0; x < cols; ++x) {
      if (line[x] == '@') {
        m.agent_start_ = {{x, y}, Heading::North};
        have_start = true;
        m.set({x, y}, Tile::FloorGrey);  // patched to the room color below
      } else {
        m.set({x, y}, char_tile(line[x]));
      }
    }
  }
  if (!have_start) throw std::invalid_argument("maze has no agent start");

  const int w = spec.room_width;
  for (int r = 0; r < spec.room_rows; ++r) {
    for (int c = 0; c < spec.room_cols; ++c) {
      Room room;
      room.min = {room_origin(c, w), room_origin(r, w)};
      room.max = {room.min.x + w - 1, room.min.y + w - 1};
      room.floor = Tile::FloorGrey;  // fallback if the interior is all white
      bool found = false;
      for (int y = room.min.y; y <= room.max.y && !found; ++y)
        for (int x = room.min.x; x <= room.max.x; ++x) {
          const Tile t = m.at({x, y});
          if (is_floor(t) && t != Tile::FloorGrey) {  // '@' parses as grey until patched
            room.floor = t;
            found = true;
            break;
          }
        }
      m.rooms_.push_back(room);
    }
  }
  for (auto& room : m.rooms_)
    if (room.contains(m.agent_start_.cell)) m.set(m.agent_start_.cell, room.floor);

  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      const GridPoint p{x, y};
      if (m.at(p) != Tile::DoorClosed && m.at(p) != Tile::DoorOpen) continue;
      // Band position identifies the connected room pair.
      const int cx = (p.x - 1) / (w + kBand);
      const int cy = (p.y - 1) / (w + kBand);
      const bool in_vertical_band = (p.x - 1) % (w + kBand) >= w;
      const int a = cy * spec.room_cols + cx;
      const int b = in_vertical_band ? a + 1 : a + spec.room_cols;
      m.doors_.push_back({p, a, b});
    }

  m.settle_doors(m.agent_start_);
  return m;
}

}  // namespace hainav::grid
