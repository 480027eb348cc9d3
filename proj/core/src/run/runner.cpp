#include "hainav/run/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "hainav/grid/observe.hpp"
#include "hainav/run/astar.hpp"
#include "hainav/run/report.hpp"

namespace hainav::run {

namespace {

grid::Maze make_maze(const RunConfig& cfg, std::uint64_t seed) {
  if (!cfg.maze_text.empty()) return grid::from_text(cfg.maze_text);
  grid::MazeSpec spec = cfg.maze;
  spec.seed = seed;
  return grid::generate_maze(spec);
}

int budget_for(const RunConfig& cfg, const grid::Maze& maze) {
  if (cfg.budget >= 0) return cfg.budget;
  const int rooms = std::max(1, static_cast<int>(maze.rooms().size()));
  return std::min(75 * rooms, 1500);
}

// Ground truth plus the coverage bookkeeping around one agent.
struct Driver {
  grid::Maze maze;
  grid::Pose pose;
  plan::NavAgent agent;
  bool collided = false;
  std::unordered_set<std::int64_t> observable;
  std::unordered_set<std::int64_t> seen;

  Driver(grid::Maze m, plan::AgentConfig acfg, plan::Task task)
      : maze(std::move(m)), pose(maze.agent_start()), agent(acfg, task) {
    for (const auto c : observable_cells(maze)) observable.insert(grid::point_key(c));
    maze.settle_doors(pose);
    absorb(pose);  // the agent stands somewhere even before its first tick
  }

  void absorb(grid::Pose p) {
    const auto obs = grid::observe(maze, p);
    for (const auto& off : grid::window_offsets())
      if (obs.at(off.forward, off.right))
        seen.insert(
            grid::point_key(p.cell + grid::window_to_world(p.heading, off.forward, off.right)));
  }

  double coverage() const {
    return observable.empty()
               ? 1.0
               : static_cast<double>(seen.size()) / static_cast<double>(observable.size());
  }

  // One observe-decide-step cycle; the executed action may be scripted.
  TickRecord tick(std::optional<grid::Action> scripted = std::nullopt) {
    grid::Observation obs = grid::observe(maze, pose);
    obs.collision = collided;
    absorb(pose);
    const grid::Action planned = agent.tick(obs);
    const grid::Action act = scripted.value_or(planned);
    if (scripted) agent.override_action(act);
    TickRecord rec{pose, agent.last(), coverage()};
    const auto res = grid::step(maze, pose, act);
    pose = res.pose;
    collided = res.collision;
    return rec;
  }

  void teleport_home() {
    pose = maze.agent_start();
    maze.settle_doors(pose);
    collided = false;
    agent.teleport_to_start();
  }
};

int live_places(const plan::NavAgent& agent) {
  int n = 0;
  for (const auto& e : agent.map().experiences())
    if (!agent.map().merged(e.id)) ++n;
  return n;
}

void probe_footprint(RunMetrics& m, const plan::NavAgent& agent, int step) {
  if (step == 500) m.footprint_mid = agent.footprint_bytes();
}

void run_explore_ticks(RunResult& out, Driver& drive, int budget) {
  RunMetrics& m = out.metrics;
  for (int t = 0; t < budget; ++t) {
    out.ticks.push_back(drive.tick());
    m.coverage_curve.push_back(out.ticks.back().coverage);
    if (!m.success && m.coverage_curve.back() >= 0.9) {
      m.success = true;
      m.steps_to_success = t;
    }
    probe_footprint(m, drive.agent, t);
  }
  if (m.coverage_curve.empty()) m.coverage_curve.push_back(drive.coverage());
  m.footprint_end = drive.agent.footprint_bytes();
  m.places_created = live_places(drive.agent);
}

RunResult run_explore(const RunConfig& cfg, std::uint64_t seed) {
  RunResult out;
  out.maze = make_maze(cfg, seed);
  plan::AgentConfig acfg = cfg.agent;
  acfg.seed = seed;
  Driver drive(out.maze, acfg, plan::Task::Explore);
  out.metrics.oracle_steps =
      static_cast<int>(oracle_explore(out.maze, out.maze.agent_start()).size());
  run_explore_ticks(out, drive, budget_for(cfg, out.maze));
  if (out.metrics.success && out.metrics.oracle_steps > 0)
    out.metrics.relative_steps =
        static_cast<double>(out.metrics.steps_to_success) / out.metrics.oracle_steps;
  return out;
}

std::optional<grid::GridPoint> white_cell(const grid::Maze& maze) {
  std::optional<grid::GridPoint> hit;
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x)
      if (maze.at({x, y}) == grid::Tile::White) {
        if (hit) return std::nullopt;  // more than one
        hit = grid::GridPoint{x, y};
      }
  return hit;
}

RunResult run_goal(const RunConfig& cfg, std::uint64_t seed) {
  RunResult out;
  out.maze = make_maze(cfg, seed);
  const auto goal = white_cell(out.maze);
  if (!goal) throw std::invalid_argument("goal task needs exactly one white tile");

  plan::AgentConfig acfg = cfg.agent;
  acfg.seed = seed;
  const int budget = budget_for(cfg, out.maze);
  RunMetrics& m = out.metrics;
  m.oracle_steps = static_cast<int>(oracle_astar(out.maze, out.maze.agent_start(), *goal).size());

  Driver drive(out.maze, acfg, cfg.with_prior ? plan::Task::Explore : plan::Task::Goal);
  if (cfg.with_prior) {
    for (int t = 0; t < budget; ++t) {
      out.ticks.push_back(drive.tick());
      m.coverage_curve.push_back(out.ticks.back().coverage);
    }
    drive.teleport_home();
    drive.agent.set_task(plan::Task::Goal);
  }

  // Stickiness counter: believing the goal is underfoot while standing
  // elsewhere, without budging, ends the run as a wrong-goal failure.
  int stuck = 0;
  grid::GridPoint stuck_cell{};
  for (int t = 0; t < budget; ++t) {
    out.ticks.push_back(drive.tick());
    m.coverage_curve.push_back(out.ticks.back().coverage);
    const grid::Pose at = out.ticks.back().truth;  // where the agent observed
    if (at.cell == *goal) {
      m.success = true;
      m.steps_to_success = t;
      break;
    }
    if (drive.agent.believes_on_goal()) {
      if (stuck == 0 || at.cell != stuck_cell) {
        stuck = 1;
        stuck_cell = at.cell;
      } else if (++stuck >= 10) {
        m.wrong_goal_termination = true;
        break;
      }
    } else {
      stuck = 0;
    }
  }
  m.places_created = live_places(drive.agent);
  m.footprint_end = drive.agent.footprint_bytes();
  if (m.success && m.oracle_steps > 0)
    m.relative_steps = static_cast<double>(m.steps_to_success) / m.oracle_steps;
  return out;
}

grid::GridPoint room_center(const grid::Room& r) {
  return {(r.min.x + r.max.x) / 2, (r.min.y + r.max.y) / 2};
}

// Walks scripted shortest paths through the room-center ring, spinning once
// at each center so every room is properly seen; the agent's own planner
// runs throughout but only inference matters here.
double scripted_loop(RunResult& out, Driver& drive, const std::vector<int>& ring) {
  double gain = 0;
  auto run_actions = [&](const std::vector<grid::Action>& actions) {
    for (const grid::Action a : actions) {
      out.ticks.push_back(drive.tick(a));
      out.metrics.coverage_curve.push_back(out.ticks.back().coverage);
      gain += out.ticks.back().log.realized_gain;
    }
  };
  for (const int room : ring) {
    run_actions(oracle_astar(drive.maze, drive.pose, room_center(drive.maze.rooms()[room])));
    run_actions({grid::Action::TurnLeft, grid::Action::TurnLeft, grid::Action::TurnLeft});
  }
  return gain;
}

RunResult run_alias(const RunConfig& cfg, std::uint64_t seed) {
  RunResult out;
  out.maze = alias_fixture(seed);
  plan::AgentConfig acfg = cfg.agent;
  acfg.seed = seed;
  Driver drive(out.maze, acfg, plan::Task::Explore);
  RunMetrics& m = out.metrics;

  // Ring order 0,1,3,2 walks the 2x2 block clockwise; rotate so the loop
  // starts in the agent's own room.
  const std::array<int, 4> cw{0, 1, 3, 2};
  int at = 0;
  for (int i = 0; i < 4; ++i)
    if (out.maze.rooms()[cw[i]].contains(out.maze.agent_start().cell)) at = i;
  std::vector<int> ring;
  for (int i = 0; i <= 4; ++i) ring.push_back(cw[(at + i) % 4]);  // back home at the end

  m.gain_first_loop = scripted_loop(out, drive, ring);
  m.places_after_first_loop = live_places(drive.agent);

  std::vector<int> reversed(ring.rbegin(), ring.rend());
  m.gain_second_loop = scripted_loop(out, drive, reversed);
  m.new_places_second_loop = std::max(0, live_places(drive.agent) - m.places_after_first_loop);

  m.places_created = live_places(drive.agent);
  m.footprint_end = drive.agent.footprint_bytes();
  m.success = m.places_after_first_loop == 4 && m.new_places_second_loop == 0;
  return out;
}

RunResult run_reconstruct(const RunConfig& cfg, std::uint64_t seed) {
  RunResult out;
  out.maze = make_maze(cfg, seed);
  plan::AgentConfig acfg = cfg.agent;
  acfg.seed = seed;
  Driver drive(out.maze, acfg, plan::Task::Explore);
  out.metrics.oracle_steps =
      static_cast<int>(oracle_explore(out.maze, out.maze.agent_start()).size());
  run_explore_ticks(out, drive, budget_for(cfg, out.maze));
  if (out.metrics.success && out.metrics.oracle_steps > 0)
    out.metrics.relative_steps =
        static_cast<double>(out.metrics.steps_to_success) / out.metrics.oracle_steps;

  drive.agent.sync_map();
  const auto& map = drive.agent.map();
  const grid::GridPoint origin = out.maze.agent_start().cell;
  const int w = out.maze.width();
  out.composite.assign(static_cast<std::size_t>(w) * out.maze.height(), std::nullopt);
  std::vector<double> best(out.composite.size(), 0.0);
  for (const auto& e : map.experiences()) {
    if (map.merged(e.id)) continue;
    const auto& place = map.place(e.id);
    if (!place.initialized()) continue;
    for (int fy = 0; fy < allo::PlaceModel::kSpan; ++fy)
      for (int fx = 0; fx < allo::PlaceModel::kSpan; ++fx) {
        const grid::GridPoint odo = place.frame_origin() + grid::GridPoint{fx, fy};
        const grid::GridPoint world = odo + origin;
        if (!out.maze.in_bounds(world)) continue;
        const bayes::Counts* c = place.cell(odo);
        if (!c) continue;
        double mass = 0;
        int arg = 0;
        for (int k = 0; k < grid::kGroupCount; ++k) {
          mass += (*c)[k];
          if ((*c)[k] > (*c)[arg]) arg = k;
        }
        const std::size_t i = static_cast<std::size_t>(world.y) * w + world.x;
        if (mass > best[i]) {
          best[i] = mass;
          out.composite[i] = static_cast<grid::TileGroup>(arg);
        }
      }
  }

  int match = 0, total = 0;
  for (const auto cell : observable_cells(out.maze)) {
    ++total;
    const auto& got = out.composite[static_cast<std::size_t>(cell.y) * w + cell.x];
    if (got && *got == grid::group_of(out.maze.at(cell))) ++match;
  }
  out.metrics.map_accuracy = total ? static_cast<double>(match) / total : 0.0;
  out.metrics.success = out.metrics.map_accuracy >= 0.9;
  out.map_files = export_map(map);
  return out;
}

}  // namespace

int effective_budget(const RunConfig& cfg) {
  if (cfg.budget >= 0) return cfg.budget;
  if (!cfg.maze_text.empty()) return budget_for(cfg, grid::from_text(cfg.maze_text));
  const int rooms = std::max(1, cfg.maze.room_rows * cfg.maze.room_cols);
  return std::min(75 * rooms, 1500);
}

grid::Maze alias_fixture(std::uint64_t seed) {
  grid::MazeSpec spec;
  spec.room_rows = 2;
  spec.room_cols = 2;
  spec.room_width = 4;
  spec.seed = seed;
  spec.white_tiles = 0;
  spec.extra_connection_prob = 1.0;  // all four shared walls get doors
  grid::Maze maze = grid::generate_maze(spec);

  // Same color, same shape everywhere; one white tile makes one room special.
  for (const auto& room : maze.rooms())
    for (int y = room.min.y; y <= room.max.y; ++y)
      for (int x = room.min.x; x <= room.max.x; ++x) maze.set({x, y}, grid::Tile::FloorRed);
  grid::Rng rng(seed ^ 0xa11a5ull);
  const auto& special = maze.rooms()[rng.below_int(4)];
  grid::GridPoint tile;
  do {
    tile = {special.min.x + rng.below_int(special.max.x - special.min.x + 1),
            special.min.y + rng.below_int(special.max.y - special.min.y + 1)};
  } while (tile == maze.agent_start().cell);
  maze.set(tile, grid::Tile::White);
  return maze;
}

RunResult run_one(const RunConfig& cfg, std::uint64_t seed) {
  RunResult out;
  out.metrics.seed = seed;
  try {
    switch (cfg.task) {
      case TaskKind::Explore: out = run_explore(cfg, seed); break;
      case TaskKind::Goal: out = run_goal(cfg, seed); break;
      case TaskKind::Alias: out = run_alias(cfg, seed); break;
      case TaskKind::Reconstruct: out = run_reconstruct(cfg, seed); break;
    }
    out.metrics.seed = seed;
  } catch (const std::exception& e) {
    out.metrics = RunMetrics{};
    out.metrics.seed = seed;
    out.metrics.error = e.what();
  }
  return out;
}

std::vector<RunMetrics> run_batch(const RunConfig& cfg) {
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::clamp(cfg.workers > 0 ? cfg.workers : (hw > 0 ? hw : 1), 1,
                                 static_cast<int>(seeds.size()));

  std::vector<RunResult> runs(seeds.size());
  std::size_t next = 0;
  while (next < seeds.size()) {
    std::vector<std::pair<std::size_t, std::future<RunResult>>> wave;
    for (int k = 0; k < workers && next < seeds.size(); ++k, ++next)
      wave.emplace_back(next, std::async(std::launch::async,
                                         [&cfg, seed = seeds[next]] { return run_one(cfg, seed); }));
    for (auto& [i, fut] : wave) runs[i] = fut.get();
  }

  if (!cfg.out_dir.empty()) write_outputs(cfg, runs);
  std::vector<RunMetrics> metrics;
  metrics.reserve(runs.size());
  for (const auto& r : runs) metrics.push_back(r.metrics);
  return metrics;
}

}  // namespace hainav::run
