#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hainav/cogmap/experience_map.hpp"
#include "hainav/grid/render.hpp"
#include "hainav/run/runner.hpp"

namespace hainav::run {

// The graph as JSON plus one binary blob and one MAP-text dump per live
// place, referenced by file name.
MapFiles export_map(const cogmap::ExperienceMap& map);

// One JSON object per line per tick; everything needed to replay a decision.
std::string run_log_lines(const RunResult& run);

// Aggregate CSV: one row per seed plus mean and sd rows. Numbers print via
// shortest round-trip formatting so identical configs give identical bytes.
std::string csv_text(const std::vector<RunMetrics>& rows);

// Ground-truth maze with the walked path shaded black-to-white by step.
grid::Image trajectory_image(const grid::Maze& maze, const std::vector<TickRecord>& ticks);

// Stitched cognitive map; cells no place has evidence for stay black.
grid::Image composite_image(const grid::Maze& maze,
                            const std::vector<std::optional<grid::TileGroup>>& cells);

// Writes logs, renders, CSV and map exports for a finished batch. Throws
// std::runtime_error naming the path on IO failure.
void write_outputs(const RunConfig& cfg, const std::vector<RunResult>& runs);

}  // namespace hainav::run
