#pragma once

#include <vector>

#include "hainav/grid/maze.hpp"
#include "hainav/grid/types.hpp"

namespace hainav::run {

// Shortest action sequence over the (x, y, heading) graph with unit cost for
// every action. Doors never block (they open when faced); equal-cost routes
// resolve deterministically with turns preferring Left. Throws
// std::invalid_argument when `to` is unreachable.
std::vector<grid::Action> oracle_astar(const grid::Maze& maze, grid::Pose from,
                                       grid::GridPoint to);

// Every cell visible from some reachable pose: the coverage denominator.
// Sorted by point key for determinism.
std::vector<grid::GridPoint> observable_cells(const grid::Maze& maze);

// Full-knowledge exploration reference: chains shortest paths to the nearest
// pose that reveals an unseen observable cell, and stops the moment coverage
// reaches `target`.
std::vector<grid::Action> oracle_explore(const grid::Maze& maze, grid::Pose from,
                                         double target = 0.9);

}  // namespace hainav::run
