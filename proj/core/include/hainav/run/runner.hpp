#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hainav/grid/maze.hpp"
#include "hainav/plan/agent.hpp"

namespace hainav::run {

enum class TaskKind { Explore, Goal, Alias, Reconstruct };

struct RunConfig {
  TaskKind task = TaskKind::Explore;
  grid::MazeSpec maze;          // per-seed mazes, ignored when maze_text set
  std::string maze_text;        // explicit maze (--maze-file), same for all seeds
  std::vector<std::uint64_t> seeds{0};
  int budget = -1;              // < 0 = min(75 * rooms, 1500)
  plan::AgentConfig agent;
  bool with_prior = false;      // goal task: explore first, teleport, then seek
  std::string out_dir;          // empty = no files written
  int workers = 0;              // 0 = hardware concurrency
};

// One tick of ground truth next to what the agent thought of it.
struct TickRecord {
  grid::Pose truth;
  plan::TickLog log;
  double coverage = 0;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  std::vector<double> coverage_curve;  // per step, non-decreasing
  bool success = false;
  int steps_to_success = -1;
  int oracle_steps = 0;
  double relative_steps = 0;           // steps_to_success / oracle_steps
  int places_created = 0;
  bool wrong_goal_termination = false;
  // Alias fixture phases.
  int places_after_first_loop = 0;
  int new_places_second_loop = 0;
  double gain_first_loop = 0;
  double gain_second_loop = 0;
  // Reconstruction score and the footprint probes of long runs.
  double map_accuracy = 0;
  std::size_t footprint_mid = 0;       // after step 500
  std::size_t footprint_end = 0;
  std::string error;                   // non-empty = the run failed to execute
};

// Everything the cognitive map exports: the graph as JSON plus one binary
// blob and one MAP-text dump per live place, referenced by file name.
struct MapFiles {
  std::string json;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> blobs;
  std::vector<std::pair<std::string, std::string>> texts;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<TickRecord> ticks;
  grid::Maze maze;
  // MAP classes of the stitched cognitive map on the maze grid, mass-wins
  // per cell; empty except for reconstruct runs.
  std::vector<std::optional<grid::TileGroup>> composite;
  std::optional<MapFiles> map_files;
};

int effective_budget(const RunConfig& cfg);

// The near-identical 2x2 fixture: four same-color same-shape rooms, one
// white tile in a seed-chosen room, every wall shared by two rooms carved
// with a door.
grid::Maze alias_fixture(std::uint64_t seed);

// Executes one seeded run; never throws, failures land in metrics.error.
RunResult run_one(const RunConfig& cfg, std::uint64_t seed);

// All seeds, parallel over workers, results ordered by seed. When out_dir is
// set, per-run logs, renders and the aggregate CSV are written there.
std::vector<RunMetrics> run_batch(const RunConfig& cfg);

}  // namespace hainav::run
