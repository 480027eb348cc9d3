#include "hainav/grid/render.hpp"

#include <fstream>
#include <stdexcept>

namespace hainav::grid {

Rgb tile_color(Tile t) {
  switch (t) {
    case Tile::Wall: return {64, 64, 64};
    case Tile::DoorClosed: return {150, 100, 40};
    case Tile::DoorOpen: return {222, 184, 135};
    case Tile::FloorRed: return {192, 57, 57};
    case Tile::FloorGreen: return {60, 170, 85};
    case Tile::FloorBlue: return {70, 110, 210};
    case Tile::FloorPurple: return {150, 75, 190};
    case Tile::FloorGrey: return {150, 150, 150};
    case Tile::White: return {255, 255, 255};
  }
  return {0, 0, 0};
}

namespace {

void fill_block(Image& img, int bx, int by, Rgb c) {
  for (int y = 0; y < kTilePixels; ++y)
    for (int x = 0; x < kTilePixels; ++x)
      img.set(bx * kTilePixels + x, by * kTilePixels + y, c);
}

}  // namespace

Image render_rgb(const Observation& obs) {
  Image img(Observation::kSpan * kTilePixels, Observation::kSpan * kTilePixels);
  for (int f = 0; f < Observation::kSpan; ++f) {
    for (int r = -3; r <= 3; ++r) {
      const auto& cell = obs.at(f, r);
      const Rgb c = cell ? tile_color(*cell) : kHiddenColor;
      fill_block(img, r + 3, Observation::kAhead - f, c);
    }
  }
  return img;
}

Image render_rgb(const Maze& maze) {
  Image img(maze.width() * kTilePixels, maze.height() * kTilePixels);
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x) fill_block(img, x, y, tile_color(maze.at({x, y})));
  return img;
}

void write_ppm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace hainav::grid
