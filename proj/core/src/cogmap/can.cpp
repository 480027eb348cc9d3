#include "hainav/cogmap/can.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hainav::cogmap {

namespace {

constexpr int kSide = Can::kSide;
constexpr int kLayers = Can::kLayers;
constexpr int kCellsPerLayer = kSide * kSide;
constexpr double kInhibition = 0.005;
constexpr int kKernelReach = 2;

int wrap_i(int v) { return ((v % kSide) + kSide) % kSide; }

int idx(int x, int y, int layer) { return layer * kCellsPerLayer + y * kSide + x; }

// 5x5 unit-sum gaussian, sigma 1.
const std::array<double, 25>& kernel() {
  static const std::array<double, 25> k = [] {
    std::array<double, 25> w{};
    double sum = 0;
    for (int dy = -kKernelReach; dy <= kKernelReach; ++dy)
      for (int dx = -kKernelReach; dx <= kKernelReach; ++dx) {
        const double v = std::exp(-(dx * dx + dy * dy) / 2.0);
        w[(dy + kKernelReach) * 5 + (dx + kKernelReach)] = v;
        sum += v;
      }
    for (double& v : w) v /= sum;
    return w;
  }();
  return k;
}

}  // namespace

Can::Can() : a_(kLayers * kCellsPerLayer, 0.0) {
  // Start fully certain at the sheet center, heading North.
  a_[idx(kSide / 2, kSide / 2, 0)] = 1.0;
  relax();
}

grid::Pose Can::wrap(grid::Pose odo) {
  return {{wrap_i(odo.cell.x + kSide / 2), wrap_i(odo.cell.y + kSide / 2)}, odo.heading};
}

double Can::at(int x, int y, grid::Heading h) const {
  return a_[idx(x, y, static_cast<int>(h))];
}

double Can::total() const {
  double t = 0;
  for (double v : a_) t += v;
  return t;
}

void Can::step(grid::Action action) {
  std::vector<double> next(a_.size(), 0.0);
  if (action == grid::Action::Forward) {
    // Each layer slides along its own heading.
    for (int layer = 0; layer < kLayers; ++layer) {
      const grid::GridPoint d = grid::heading_dir(static_cast<grid::Heading>(layer));
      for (int y = 0; y < kSide; ++y)
        for (int x = 0; x < kSide; ++x)
          next[idx(x, y, layer)] = a_[idx(wrap_i(x - d.x), wrap_i(y - d.y), layer)];
    }
  } else {
    // Relabel layers: activity for heading h moves to the turned heading.
    for (int layer = 0; layer < kLayers; ++layer) {
      const auto from = static_cast<grid::Heading>(layer);
      const auto to = action == grid::Action::TurnLeft ? grid::turn_left(from) : grid::turn_right(from);
      std::copy_n(a_.begin() + idx(0, 0, layer), kCellsPerLayer,
                  next.begin() + idx(0, 0, static_cast<int>(to)));
    }
  }
  a_ = std::move(next);
  relax();
}

void Can::inject(grid::Pose sheet_pose, double weight) {
  const auto& k = kernel();
  const int layer = static_cast<int>(sheet_pose.heading);
  for (int dy = -kKernelReach; dy <= kKernelReach; ++dy)
    for (int dx = -kKernelReach; dx <= kKernelReach; ++dx)
      a_[idx(wrap_i(sheet_pose.cell.x + dx), wrap_i(sheet_pose.cell.y + dy), layer)] +=
          weight * k[(dy + kKernelReach) * 5 + (dx + kKernelReach)];
  relax();
}

void Can::relax() {
  const auto& k = kernel();
  std::vector<double> spread(a_.size(), 0.0);
  for (int layer = 0; layer < kLayers; ++layer)
    for (int y = 0; y < kSide; ++y)
      for (int x = 0; x < kSide; ++x) {
        const double v = a_[idx(x, y, layer)];
        if (v == 0.0) continue;
        for (int dy = -kKernelReach; dy <= kKernelReach; ++dy)
          for (int dx = -kKernelReach; dx <= kKernelReach; ++dx)
            spread[idx(wrap_i(x + dx), wrap_i(y + dy), layer)] +=
                v * k[(dy + kKernelReach) * 5 + (dx + kKernelReach)];
      }
  double peak = 0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    a_[i] += spread[i];
    peak = std::max(peak, a_[i]);
  }
  double sum = 0;
  for (double& v : a_) {
    v = std::max(0.0, v - kInhibition * peak);
    sum += v;
  }
  if (sum > 0)
    for (double& v : a_) v /= sum;
}

Can::Decode Can::decode() const {
  double best = -1, second = -1;
  int best_index = -1;
  int maxima = 0;
  for (int layer = 0; layer < kLayers; ++layer)
    for (int y = 0; y < kSide; ++y)
      for (int x = 0; x < kSide; ++x) {
        const double v = a_[idx(x, y, layer)];
        bool ge_all = true, gt_any = false;
        for (int dy = -1; dy <= 1 && ge_all; ++dy)
          for (int dx = -1; dx <= 1 && ge_all; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double n = a_[idx(wrap_i(x + dx), wrap_i(y + dy), layer)];
            if (v < n) ge_all = false;
            if (v > n) gt_any = true;
          }
        for (int dl : {-1, 1}) {
          if (!ge_all) break;
          const double n = a_[idx(x, y, (layer + dl + kLayers) % kLayers)];
          if (v < n) ge_all = false;
          if (v > n) gt_any = true;
        }
        if (!ge_all || !gt_any) continue;
        ++maxima;
        if (v > best) {
          second = best;
          best = v;
          best_index = idx(x, y, layer);
        } else if (v > second) {
          second = v;
        }
      }
  Decode out;
  if (maxima == 0) {
    // Flat plateau: report the first cell and full ambiguity.
    out.pose = {{0, 0}, grid::Heading::North};
    out.ambiguity = 1.0;
    return out;
  }
  const int layer = best_index / kCellsPerLayer;
  const int rem = best_index % kCellsPerLayer;
  out.pose = {{rem % kSide, rem / kSide}, static_cast<grid::Heading>(layer)};
  out.ambiguity = maxima > 1 ? second / best : 0.0;
  return out;
}

std::size_t Can::footprint_bytes() const { return sizeof(*this) + a_.size() * sizeof(double); }

}  // namespace hainav::cogmap
