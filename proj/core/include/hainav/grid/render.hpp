#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hainav/grid/maze.hpp"
#include "hainav/grid/observe.hpp"

namespace hainav::grid {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // packed rgb, row major

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

  void set(int x, int y, Rgb c) {
    auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
};

inline constexpr int kTilePixels = 8;

Rgb tile_color(Tile t);
inline constexpr Rgb kHiddenColor{0, 0, 0};

// 8x8 pixel blocks per tile; a 7x7 observation becomes 56x56.
// Observation images put the far row on top and the agent row at the bottom.
Image render_rgb(const Observation& obs);
Image render_rgb(const Maze& maze);

// Binary PPM (P6).
void write_ppm(const Image& img, const std::string& path);

}  // namespace hainav::grid
