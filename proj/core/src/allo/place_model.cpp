#include "hainav/allo/place_model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace hainav::allo {

namespace {

constexpr int kCenter = PlaceModel::kSpan / 2;

double cell_mass(const bayes::Counts& c) {
  double m = 0;
  for (double v : c) m += v;
  return m;
}

int argmax_class(const bayes::Counts& c) {
  int best = 0;
  for (int k = 1; k < grid::kGroupCount; ++k)
    if (c[k] > c[best]) best = k;
  return best;
}

}  // namespace

std::optional<grid::GridPoint> PlaceModel::to_local(grid::GridPoint odo) const {
  if (!origin_) return std::nullopt;
  const grid::GridPoint local = odo - *origin_;
  if (local.x < 0 || local.x >= kSpan || local.y < 0 || local.y >= kSpan) return std::nullopt;
  return local;
}

bool PlaceModel::in_frame(grid::GridPoint odo) const { return to_local(odo).has_value(); }

const bayes::Counts* PlaceModel::cell(grid::GridPoint odo) const {
  const auto local = to_local(odo);
  if (!local) return nullptr;
  return &counts_[local->y * kSpan + local->x];
}

namespace {

bool behind_door(const grid::Observation& obs, int forward, int right) {
  for (const auto& b : grid::blockers_for(forward, right)) {
    const auto& t = obs.at(b.forward, b.right);
    if (t && grid::group_of(*t) == grid::TileGroup::Door) return true;
  }
  return false;
}

}  // namespace

double PlaceModel::update(const grid::Observation& obs, grid::Pose odo_pose) {
  if (!origin_) {
    origin_ = odo_pose.cell - grid::GridPoint{kCenter, kCenter};
    entry_pose_ = odo_pose;
  } else if (!in_frame(odo_pose.cell)) {
    throw std::out_of_range("place update outside frame");
  }
  const auto& anchor = obs.at(0, 0);
  const bool in_doorway = anchor && grid::group_of(*anchor) == grid::TileGroup::Door;
  double gained = 0;
  for (const auto& off : grid::window_offsets()) {
    const auto& seen = obs.at(off.forward, off.right);
    if (!seen) continue;
    if (in_doorway && (off.forward != 0 || off.right != 0)) continue;
    if (behind_door(obs, off.forward, off.right)) continue;
    const auto local =
        to_local(odo_pose.cell + grid::window_to_world(odo_pose.heading, off.forward, off.right));
    if (!local) continue;
    bayes::Counts& c = counts_[local->y * kSpan + local->x];
    const grid::TileGroup g = grid::group_of(*seen);
    gained += bayes::increment_kl(c, g);
    c[static_cast<int>(g)] += 1.0;
  }
  ++obs_count_;
  return gained;
}

double PlaceModel::predictive_of(grid::GridPoint odo, grid::TileGroup g) const {
  const bayes::Counts* c = cell(odo);
  if (!c) return bayes::uniform_predictive();
  return bayes::predictive_of(*c, g);
}

std::array<double, grid::kGroupCount> PlaceModel::predictive(grid::GridPoint odo) const {
  const bayes::Counts* c = cell(odo);
  if (!c) {
    std::array<double, grid::kGroupCount> out;
    out.fill(bayes::uniform_predictive());
    return out;
  }
  return bayes::predictive(*c);
}

std::optional<grid::TileGroup> PlaceModel::map_class(grid::GridPoint odo) const {
  const bayes::Counts* c = cell(odo);
  if (!c || cell_mass(*c) <= 0.0) return std::nullopt;
  return static_cast<grid::TileGroup>(argmax_class(*c));
}

bool PlaceModel::map_opaque(grid::GridPoint odo) const {
  const auto g = map_class(odo);
  return g && (*g == grid::TileGroup::Wall || *g == grid::TileGroup::Door);
}

double PlaceModel::opacity_prob(grid::GridPoint odo) const {
  return predictive_of(odo, grid::TileGroup::Wall) +
         0.5 * predictive_of(odo, grid::TileGroup::Door);
}

double PlaceModel::mismatch(const grid::Observation& obs, grid::Pose odo_pose) const {
  double sum = 0;
  int n = 0;
  for (const auto& off : grid::window_offsets()) {
    const auto& seen = obs.at(off.forward, off.right);
    if (!seen) continue;
    const bayes::Counts* c =
        cell(odo_pose.cell + grid::window_to_world(odo_pose.heading, off.forward, off.right));
    if (!c || cell_mass(*c) <= 0.0) continue;
    sum += bayes::predictive_of(*c, grid::group_of(*seen));
    ++n;
  }
  if (n == 0) return 0.0;
  return 1.0 - sum / n;
}

double PlaceModel::prediction_error(const grid::Observation& obs, grid::Pose odo_pose) const {
  double sum = 0;
  int n = 0;
  for (const auto& off : grid::window_offsets()) {
    const auto& seen = obs.at(off.forward, off.right);
    if (!seen) continue;
    sum += predictive_of(
        odo_pose.cell + grid::window_to_world(odo_pose.heading, off.forward, off.right),
        grid::group_of(*seen));
    ++n;
  }
  if (n == 0) return 0.0;
  return 1.0 - sum / n;
}

std::vector<std::pair<std::int64_t, double>> PlaceModel::visible_gains(grid::Pose odo_pose) const {
  // Doors block at full predictive strength here, unlike physical sight:
  // whatever shows through a doorway is refused by update(), so promising
  // gain for it would be writing cheques this frame can never cash.
  const auto weights = grid::visibility_weights(odo_pose, [&](grid::GridPoint p) {
    return predictive_of(p, grid::TileGroup::Wall) + predictive_of(p, grid::TileGroup::Door);
  });
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(grid::Observation::kCells);
  const auto& offsets = grid::window_offsets();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const grid::GridPoint p =
        odo_pose.cell + grid::window_to_world(odo_pose.heading, offsets[i].forward, offsets[i].right);
    // Cells outside the frame can never be stored, so looking at them
    // teaches this model nothing. Without this the permanent fringe of
    // unlearnable cells outscores every real frontier.
    const bayes::Counts* c = cell(p);
    if (!c) continue;
    out.emplace_back(grid::point_key(p), weights[i] * bayes::expected_info_gain(*c));
  }
  return out;
}

double PlaceModel::preference(const std::vector<grid::Pose>& rollout, grid::TileGroup g,
                              std::optional<grid::GridPoint> target_odo, double sigma) const {
  double total = 0.0;
  for (const grid::Pose& pose : rollout) {
    total += std::log(predictive_of(pose.cell, g));
    if (target_odo) {
      const grid::GridPoint d = pose.cell - *target_odo;
      total += -(d.x * d.x + d.y * d.y) / (2.0 * sigma * sigma);
    }
  }
  return total;
}

grid::GridPoint PlaceModel::centroid() const {
  double mx = 0, my = 0, mass = 0;
  for (int y = 0; y < kSpan; ++y)
    for (int x = 0; x < kSpan; ++x) {
      const double m = cell_mass(counts_[y * kSpan + x]);
      mx += m * x;
      my += m * y;
      mass += m;
    }
  if (mass <= 0.0) return origin_ ? *origin_ + grid::GridPoint{kCenter, kCenter} : grid::GridPoint{};
  const grid::GridPoint local{static_cast<int>(std::lround(mx / mass)),
                              static_cast<int>(std::lround(my / mass))};
  return *origin_ + local;
}

std::vector<double> PlaceModel::descriptor() const {
  double mx = 0, my = 0, mass = 0;
  for (int y = 0; y < kSpan; ++y)
    for (int x = 0; x < kSpan; ++x) {
      const double m = cell_mass(counts_[y * kSpan + x]);
      mx += m * x;
      my += m * y;
      mass += m;
    }
  if (mass <= 0.0) throw std::logic_error("descriptor of an empty place");
  const int sx = kCenter - static_cast<int>(std::lround(mx / mass));
  const int sy = kCenter - static_cast<int>(std::lround(my / mass));

  std::vector<double> v(kSpan * kSpan * grid::kGroupCount, 0.0);
  for (int y = 0; y < kSpan; ++y)
    for (int x = 0; x < kSpan; ++x) {
      const bayes::Counts& c = counts_[y * kSpan + x];
      const double m = cell_mass(c);
      if (m <= 0.0) continue;
      const int tx = x + sx, ty = y + sy;
      if (tx < 0 || tx >= kSpan || ty < 0 || ty >= kSpan) continue;
      v[(ty * kSpan + tx) * grid::kGroupCount + argmax_class(c)] = m;
    }
  double norm = 0;
  for (double e : v) norm += e * e;
  norm = std::sqrt(norm);
  if (norm > 0)
    for (double& e : v) e /= norm;
  return v;
}

std::optional<PlaceModel::GoalHit> PlaceModel::find_goal(grid::TileGroup g,
                                                         double min_mass) const {
  std::optional<GoalHit> best;
  if (!origin_) return best;
  for (int y = 0; y < kSpan; ++y)
    for (int x = 0; x < kSpan; ++x) {
      const bayes::Counts& c = counts_[y * kSpan + x];
      const double m = c[static_cast<int>(g)];
      if (m < min_mass || argmax_class(c) != static_cast<int>(g)) continue;
      if (!best || m > best->mass)
        best = GoalHit{*origin_ + grid::GridPoint{x, y}, m};
    }
  return best;
}

PlaceModel::FreeEnergy PlaceModel::free_energy(
    const std::vector<std::pair<grid::Observation, grid::Pose>>& batch) const {
  FreeEnergy fe;
  static const bayes::Counts kEmpty{};
  for (const auto& c : counts_)
    if (cell_mass(c) > 0.0) fe.complexity += bayes::kl_dirichlet(c, kEmpty);
  for (const auto& [obs, pose] : batch) {
    for (const auto& off : grid::window_offsets()) {
      const auto& seen = obs.at(off.forward, off.right);
      if (!seen) continue;
      const bayes::Counts* c =
          cell(pose.cell + grid::window_to_world(pose.heading, off.forward, off.right));
      fe.accuracy += bayes::expected_log_prob(c ? *c : kEmpty, grid::group_of(*seen));
    }
  }
  fe.value = fe.complexity - fe.accuracy;
  return fe;
}

std::size_t PlaceModel::footprint_bytes() const {
  return sizeof(*this) + counts_.size() * sizeof(bayes::Counts);
}

namespace {

constexpr std::array<std::uint8_t, 4> kBlobMagic{'H', 'N', 'P', 'L'};
constexpr std::uint8_t kBlobVersion = 1;

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

struct BlobReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t at = 0;

  std::uint8_t byte() {
    if (at >= buf.size()) throw std::invalid_argument("place blob truncated");
    return buf[at++];
  }
  std::int32_t i32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return static_cast<std::int32_t>(v);
  }
  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(byte()) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
};

char group_char(grid::TileGroup g) {
  switch (g) {
    case grid::TileGroup::Wall: return '#';
    case grid::TileGroup::Door: return '+';
    case grid::TileGroup::FloorRed: return 'r';
    case grid::TileGroup::FloorGreen: return 'g';
    case grid::TileGroup::FloorBlue: return 'b';
    case grid::TileGroup::FloorPurple: return 'p';
    case grid::TileGroup::FloorGrey: return 'y';
    case grid::TileGroup::White: return 'W';
  }
  return '?';
}

}  // namespace

std::vector<std::uint8_t> PlaceModel::serialize() const {
  std::vector<std::uint8_t> out(kBlobMagic.begin(), kBlobMagic.end());
  out.push_back(kBlobVersion);
  put_i32(out, id_);
  out.push_back(origin_ ? 1 : 0);
  put_i32(out, origin_ ? origin_->x : 0);
  put_i32(out, origin_ ? origin_->y : 0);
  put_i32(out, kSpan);
  put_i32(out, grid::kGroupCount);
  for (const bayes::Counts& c : counts_)
    for (double v : c) put_f64(out, v);
  put_i32(out, obs_count_);
  return out;
}

PlaceModel PlaceModel::deserialize(const std::vector<std::uint8_t>& blob) {
  BlobReader r{blob};
  for (std::uint8_t m : kBlobMagic)
    if (r.byte() != m) throw std::invalid_argument("not a place blob");
  if (r.byte() != kBlobVersion) throw std::invalid_argument("unknown place blob version");
  PlaceModel p(r.i32());
  const bool anchored = r.byte() != 0;
  const std::int32_t ox = r.i32();
  const std::int32_t oy = r.i32();
  if (anchored) {
    p.origin_ = grid::GridPoint{ox, oy};
    p.entry_pose_ = {{ox + kCenter, oy + kCenter}, grid::Heading::North};
  }
  if (r.i32() != kSpan || r.i32() != grid::kGroupCount)
    throw std::invalid_argument("place blob shape mismatch");
  for (bayes::Counts& c : p.counts_)
    for (double& v : c) v = r.f64();
  p.obs_count_ = r.i32();
  return p;
}

std::string PlaceModel::map_text() const {
  std::string out;
  out.reserve((kSpan + 1) * kSpan);
  for (int y = 0; y < kSpan; ++y) {
    for (int x = 0; x < kSpan; ++x) {
      const bayes::Counts& c = counts_[y * kSpan + x];
      out += cell_mass(c) > 0 ? group_char(static_cast<grid::TileGroup>(argmax_class(c))) : '?';
    }
    out += '\n';
  }
  return out;
}

bool event_boundary(const std::vector<double>& history, double threshold, int patience) {
  if (static_cast<int>(history.size()) < patience) return false;
  for (int i = 0; i < patience; ++i)
    if (history[history.size() - 1 - i] <= threshold) return false;
  return true;
}

}  // namespace hainav::allo
