#include "hainav/run/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace hainav::run {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  std::array<char, 32> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

json pose_json(grid::Pose p) {
  return {{"x", p.cell.x}, {"y", p.cell.y}, {"heading", static_cast<int>(p.heading)}};
}

char action_char(grid::Action a) {
  switch (a) {
    case grid::Action::TurnLeft: return 'L';
    case grid::Action::TurnRight: return 'R';
    case grid::Action::Forward: return 'F';
  }
  return '?';
}

grid::Tile group_tile(grid::TileGroup g) {
  switch (g) {
    case grid::TileGroup::Wall: return grid::Tile::Wall;
    case grid::TileGroup::Door: return grid::Tile::DoorClosed;
    case grid::TileGroup::FloorRed: return grid::Tile::FloorRed;
    case grid::TileGroup::FloorGreen: return grid::Tile::FloorGreen;
    case grid::TileGroup::FloorBlue: return grid::Tile::FloorBlue;
    case grid::TileGroup::FloorPurple: return grid::Tile::FloorPurple;
    case grid::TileGroup::FloorGrey: return grid::Tile::FloorGrey;
    case grid::TileGroup::White: return grid::Tile::White;
  }
  return grid::Tile::Wall;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Mean and population sd of the selected column over rows passing `keep`.
template <typename ValueFn, typename KeepFn>
std::pair<double, double> column_stats(const std::vector<RunMetrics>& rows, ValueFn&& value,
                                       KeepFn&& keep) {
  double sum = 0, sq = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!keep(r)) continue;
    const double v = value(r);
    sum += v;
    sq += v * v;
    ++n;
  }
  if (n == 0) return {0.0, 0.0};
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean))};
}

}  // namespace

MapFiles export_map(const cogmap::ExperienceMap& map) {
  MapFiles out;
  json doc;
  doc["experiences"] = json::array();
  for (const auto& e : map.experiences()) {
    if (map.merged(e.id)) continue;
    const auto& place = map.place(e.id);
    const std::string stem = "place_" + std::to_string(e.id);
    doc["experiences"].push_back({{"id", e.id},
                                  {"entry", pose_json(e.entry_pose)},
                                  {"centroid", {{"x", e.centroid.x}, {"y", e.centroid.y}}},
                                  {"created_step", e.created_step},
                                  {"place_file", stem + ".bin"},
                                  {"map_file", stem + ".txt"}});
    out.blobs.emplace_back(stem + ".bin", place.serialize());
    out.texts.emplace_back(stem + ".txt", place.map_text());
  }
  doc["edges"] = json::array();
  for (const auto& t : map.transitions()) {
    const auto delta =
        map.experiences()[t.b].entry_pose.cell - map.experiences()[t.a].entry_pose.cell;
    json crossings = json::array();
    for (const auto& [key, uses] : t.crossings) {
      const auto cell = grid::point_from_key(key);
      crossings.push_back({{"x", cell.x}, {"y", cell.y}, {"uses", uses}});
    }
    doc["edges"].push_back({{"a", t.a},
                            {"b", t.b},
                            {"delta", {{"x", delta.x}, {"y", delta.y}}},
                            {"distance", t.distance},
                            {"traversals", t.traversals},
                            {"crossings", crossings}});
  }
  out.json = doc.dump(2) + "\n";
  return out;
}

std::string run_log_lines(const RunResult& run) {
  std::string out;
  for (const auto& t : run.ticks) {
    json line = {{"step", t.log.step},
                 {"truth", pose_json(t.truth)},
                 {"believed", pose_json(t.log.believed)},
                 {"action", std::string(1, action_char(t.log.action))},
                 {"localizing", t.log.localizing},
                 {"experience", t.log.current_experience},
                 {"mismatch", t.log.mismatch},
                 {"confidence", t.log.confidence},
                 {"realized_gain", t.log.realized_gain},
                 {"G",
                  {{"total", t.log.chosen.total},
                   {"allo_gain", t.log.chosen.allo_gain},
                   {"ego_gain", t.log.chosen.ego_gain},
                   {"allo_pref", t.log.chosen.allo_pref},
                   {"ego_pref", t.log.chosen.ego_pref}}},
                 {"policies", t.log.policies},
                 {"hypothesis_weights", t.log.hypothesis_weights},
                 {"events", t.log.events},
                 {"coverage", t.coverage}};
    if (t.log.goal_cell) line["goal"] = {{"x", t.log.goal_cell->x}, {"y", t.log.goal_cell->y}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string csv_text(const std::vector<RunMetrics>& rows) {
  std::vector<RunMetrics> sorted = rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const RunMetrics& a, const RunMetrics& b) { return a.seed < b.seed; });

  std::string out =
      "seed,error,success,steps_to_success,oracle_steps,relative_steps,places,final_coverage,"
      "wrong_goal,places_first_loop,new_places_second_loop,gain_first_loop,gain_second_loop,"
      "map_accuracy,footprint_mid,footprint_end\n";
  auto coverage_of = [](const RunMetrics& r) {
    return r.coverage_curve.empty() ? 0.0 : r.coverage_curve.back();
  };
  for (const auto& r : sorted) {
    out += std::to_string(r.seed) + ',' + r.error + ',' + (r.success ? "1" : "0") + ',' +
           std::to_string(r.steps_to_success) + ',' + std::to_string(r.oracle_steps) + ',' +
           fmt(r.relative_steps) + ',' + std::to_string(r.places_created) + ',' +
           fmt(coverage_of(r)) + ',' + (r.wrong_goal_termination ? "1" : "0") + ',' +
           std::to_string(r.places_after_first_loop) + ',' +
           std::to_string(r.new_places_second_loop) + ',' + fmt(r.gain_first_loop) + ',' +
           fmt(r.gain_second_loop) + ',' + fmt(r.map_accuracy) + ',' +
           std::to_string(r.footprint_mid) + ',' + std::to_string(r.footprint_end) + '\n';
  }

  const auto ran = [](const RunMetrics& r) { return r.error.empty(); };
  const auto won = [](const RunMetrics& r) { return r.error.empty() && r.success; };
  struct Col {
    std::function<double(const RunMetrics&)> value;
    std::function<bool(const RunMetrics&)> keep;
  };
  const std::vector<Col> cols = {
      {[](const RunMetrics& r) { return r.success ? 1.0 : 0.0; }, ran},
      {[](const RunMetrics& r) { return static_cast<double>(r.steps_to_success); }, won},
      {[](const RunMetrics& r) { return static_cast<double>(r.oracle_steps); }, ran},
      {[](const RunMetrics& r) { return r.relative_steps; }, won},
      {[](const RunMetrics& r) { return static_cast<double>(r.places_created); }, ran},
      {[&](const RunMetrics& r) { return coverage_of(r); }, ran},
      {[](const RunMetrics& r) { return r.wrong_goal_termination ? 1.0 : 0.0; }, ran},
      {[](const RunMetrics& r) { return static_cast<double>(r.places_after_first_loop); }, ran},
      {[](const RunMetrics& r) { return static_cast<double>(r.new_places_second_loop); }, ran},
      {[](const RunMetrics& r) { return r.gain_first_loop; }, ran},
      {[](const RunMetrics& r) { return r.gain_second_loop; }, ran},
      {[](const RunMetrics& r) { return r.map_accuracy; }, ran},
      {[](const RunMetrics& r) { return static_cast<double>(r.footprint_mid); }, ran},
      {[](const RunMetrics& r) { return static_cast<double>(r.footprint_end); }, ran},
  };
  std::string mean_row = "mean,", sd_row = "sd,";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto [mean, sd] = column_stats(sorted, cols[i].value, cols[i].keep);
    mean_row += ',' + fmt(mean);
    sd_row += ',' + fmt(sd);
  }
  // The first comma after the label stands in for the empty error column.
  out += mean_row + '\n' + sd_row + '\n';
  return out;
}

grid::Image trajectory_image(const grid::Maze& maze, const std::vector<TickRecord>& ticks) {
  grid::Image img = grid::render_rgb(maze);
  const int n = static_cast<int>(ticks.size());
  for (int i = 0; i < n; ++i) {
    const grid::GridPoint c = ticks[i].truth.cell;
    const auto v =
        static_cast<std::uint8_t>(40 + (n > 1 ? (215 * i) / (n - 1) : 215));
    for (int dy = 2; dy < 6; ++dy)
      for (int dx = 2; dx < 6; ++dx)
        img.set(c.x * grid::kTilePixels + dx, c.y * grid::kTilePixels + dy, {v, v, v});
  }
  return img;
}

grid::Image composite_image(const grid::Maze& maze,
                            const std::vector<std::optional<grid::TileGroup>>& cells) {
  grid::Image img(maze.width() * grid::kTilePixels, maze.height() * grid::kTilePixels);
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x) {
      const auto& g = cells[static_cast<std::size_t>(y) * maze.width() + x];
      const grid::Rgb color = g ? grid::tile_color(group_tile(*g)) : grid::kHiddenColor;
      for (int dy = 0; dy < grid::kTilePixels; ++dy)
        for (int dx = 0; dx < grid::kTilePixels; ++dx)
          img.set(x * grid::kTilePixels + dx, y * grid::kTilePixels + dy, color);
    }
  return img;
}

void write_outputs(const RunConfig& cfg, const std::vector<RunResult>& runs) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir: " + dir.string());

  std::vector<RunMetrics> metrics;
  for (const auto& run : runs) {
    metrics.push_back(run.metrics);
    if (!run.metrics.error.empty()) continue;
    const std::string seed = std::to_string(run.metrics.seed);
    write_file(dir / ("run_seed" + seed + ".jsonl"), run_log_lines(run));
    grid::write_ppm(trajectory_image(run.maze, run.ticks),
                    (dir / ("trajectory_seed" + seed + ".ppm")).string());
    if (!run.composite.empty())
      grid::write_ppm(composite_image(run.maze, run.composite),
                      (dir / ("composite_seed" + seed + ".ppm")).string());
    if (run.map_files) {
      const fs::path mdir = dir / ("map_seed" + seed);
      fs::create_directories(mdir, ec);
      if (ec) throw std::runtime_error("cannot create output dir: " + mdir.string());
      write_file(mdir / "map.json", run.map_files->json);
      for (const auto& [name, bytes] : run.map_files->blobs) write_file(mdir / name, bytes);
      for (const auto& [name, text] : run.map_files->texts) write_file(mdir / name, text);
    }
  }
  write_file(dir / "aggregate.csv", csv_text(metrics));
}

}  // namespace hainav::run
