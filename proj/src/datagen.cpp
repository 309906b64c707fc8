#include "ncdm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <random>
#include <string>

#include "ncdm/error.hpp"
#include "ncdm/parallel.hpp"

namespace ncdm::datagen {
namespace {

enum Stream : std::uint64_t { kLife = 1, kMotion = 2, kNoise = 3 };

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::size_t cell, Stream s) {
  std::seed_seq seq{splitmix64(seed), splitmix64(cell + 0x51ed270b), static_cast<std::uint64_t>(s)};
  return std::mt19937_64(seq);
}

struct Lifecycle {
  double lifespan;
  double r0;
  std::size_t length;
};

Lifecycle draw_lifecycle(const CellModelParams& p, std::size_t cell) {
  auto rng = substream(p.seed, cell, kLife);
  std::gamma_distribution<double> life(p.lifespan_shape, p.lifespan_scale);
  std::gamma_distribution<double> radius(p.r0_shape, p.r0_scale);
  std::uniform_int_distribution<std::size_t> len(p.min_track_length, p.max_track_length);
  Lifecycle c;
  c.lifespan = life(rng);
  c.r0 = radius(rng);
  c.length = len(rng);
  return c;
}

struct Lineage {
  std::vector<CellTrack> cells;  // features left empty
  std::size_t peak = 0;
};

Lineage simulate_lineage(const CellModelParams& p, std::size_t n_cells) {
  Lineage out;
  struct Event {
    double end;
    std::size_t index;
    bool operator>(const Event& o) const {
      return end != o.end ? end > o.end : index > o.index;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> alive;
  auto born = [&](std::optional<std::size_t> parent, double t) {
    CellTrack c;
    c.index = out.cells.size();
    c.parent = parent;
    c.birth_time = t;
    auto life = draw_lifecycle(p, c.index);
    c.lifespan = life.lifespan;
    c.r0 = life.r0;
    c.length = life.length;
    alive.push({t + c.lifespan, c.index});
    out.cells.push_back(std::move(c));
  };
  for (std::size_t i = 0; i < p.founders; ++i) born(std::nullopt, 0.0);
  out.peak = alive.size();
  std::size_t resolved = 0;
  while (resolved < n_cells) {
    Event e = alive.top();
    alive.pop();
    if (alive.size() + 2 <= p.population_limit) {
      out.cells[e.index].fate = Fate::kDivided;
      born(e.index, e.end);
      born(e.index, e.end);
    } else {
      out.cells[e.index].fate = Fate::kApoptosis;
    }
    out.peak = std::max(out.peak, alive.size());
    if (e.index < n_cells) ++resolved;
    if (alive.empty() && resolved < n_cells) {
      // Unreachable with population_limit >= 2: a lone cell always divides.
      throw InvalidArgument("population went extinct");
    }
  }
  out.cells.resize(n_cells);
  return out;
}

std::array<double, 3> random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.0, 2 * std::numbers::pi);
  double z = u(rng);
  double a = phi(rng);
  double s = std::sqrt(1 - z * z);
  return {s * std::cos(a), s * std::sin(a), z};
}

std::size_t exp_steps(std::mt19937_64& rng, double mean) {
  std::exponential_distribution<double> d(1.0 / mean);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(d(rng))));
}

void fill_features(const CellModelParams& p, CellTrack& c) {
  const std::size_t T = c.length;
  c.features.assign(T * kFeatureCount, 0.0);
  auto motion = substream(p.seed, c.index, kMotion);
  auto noise = substream(p.seed, c.index, kNoise);
  std::normal_distribution<double> jitter(0.0, p.motion.tumble_step_sd);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  bool running = true;
  std::size_t remaining = exp_steps(motion, p.motion.run_mean_steps);
  auto dir = random_direction(motion);
  std::array<double, 3> prev{0, 0, 0};
  double prev_r = c.r0;
  for (std::size_t t = 0; t < T; ++t) {
    double* row = &c.features[t * kFeatureCount];
    std::array<double, 3> d{0, 0, 0};
    if (t > 0) {
      if (remaining == 0) {
        running = !running;
        remaining = exp_steps(motion, running ? p.motion.run_mean_steps
                                              : p.motion.tumble_mean_steps);
        if (running) dir = random_direction(motion);
      }
      for (int k = 0; k < 3; ++k) {
        d[k] = running ? p.motion.run_speed * dir[k] : jitter(motion);
      }
      --remaining;
    }
    double speed = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    double prev_speed = std::sqrt(prev[0] * prev[0] + prev[1] * prev[1] + prev[2] * prev[2]);
    double turn = 0;
    if (speed > 0 && prev_speed > 0) {
      double cosang = (d[0] * prev[0] + d[1] * prev[1] + d[2] * prev[2]) / (speed * prev_speed);
      turn = std::acos(std::clamp(cosang, -1.0, 1.0));
    }
    // Last sample lands exactly on the end of the lifespan.
    double tt = c.birth_time + c.lifespan * static_cast<double>(t) / static_cast<double>(T - 1);
    if (t == T - 1) tt = c.birth_time + c.lifespan;
    double r = cell_radius(tt, c.birth_time, c.r0, c.lifespan, p.upsilon);
    row[0] = d[0];
    row[1] = d[1];
    row[2] = d[2];
    row[3] = speed;
    row[4] = turn;
    row[5] = r;
    row[6] = t > 0 ? r - prev_r : 0.0;
    for (std::size_t k = 0; k < kNoiseFeatures; ++k) row[kModeledFeatures + k] = unit(noise);
    prev = d;
    prev_r = r;
  }
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "dx",       "dy",       "dz",       "speed",    "turn_angle", "radius",
      "growth_rate", "noise_00", "noise_01", "noise_02", "noise_03", "noise_04",
      "noise_05", "noise_06", "noise_07", "noise_08", "noise_09",   "noise_10",
      "noise_11", "noise_12", "noise_13", "noise_14", "noise_15"};
  return names;
}

std::string_view to_string(Fate f) {
  return f == Fate::kDivided ? "divided" : "apoptosis";
}

void CellModelParams::validate() const {
  if (!(upsilon > 0)) throw InvalidArgument("upsilon must be positive");
  if (!(lifespan_shape > 0 && lifespan_scale > 0 && r0_shape > 0 && r0_scale > 0)) {
    throw InvalidArgument("gamma shapes and scales must be positive");
  }
  if (population_limit < 2) throw InvalidArgument("population_limit must be >= 2");
  if (founders < 1 || founders > population_limit) {
    throw InvalidArgument("founders must lie in [1, population_limit]");
  }
  if (min_track_length < 2 || min_track_length > max_track_length) {
    throw InvalidArgument("track length range must satisfy 2 <= min <= max");
  }
  if (!(motion.run_mean_steps > 0 && motion.tumble_mean_steps > 0 &&
        motion.tumble_step_sd >= 0 && motion.run_speed >= 0)) {
    throw InvalidArgument("invalid run-and-tumble parameters");
  }
}

double cell_radius(double t, double t0, double r0, double lifespan, double upsilon) {
  if (!(lifespan > 0)) throw InvalidArgument("lifespan must be positive");
  if (t < t0 || t > t0 + lifespan) {
    throw InvalidArgument("time lies outside the cell's lifespan");
  }
  return r0 + r0 * std::pow((t - t0) / lifespan, upsilon);
}

std::vector<CellTrack> simulate_population(const CellModelParams& params,
                                           std::size_t n_cells, unsigned jobs) {
  params.validate();
  if (n_cells < 1) throw InvalidArgument("n_cells must be >= 1");
  auto lineage = simulate_lineage(params, n_cells);
  parallel_for(lineage.cells.size(), jobs,
               [&](std::size_t i) { fill_features(params, lineage.cells[i]); });
  return std::move(lineage.cells);
}

std::size_t peak_population(const CellModelParams& params, std::size_t n_cells) {
  params.validate();
  return simulate_lineage(params, n_cells).peak;
}

void write_track_csv(const CellTrack& track, std::ostream& out) {
  const auto& names = feature_names();
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (f) out << ',';
    out << names[f];
  }
  out << '\n';
  char buf[40];
  for (std::size_t t = 0; t < track.length; ++t) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (f) out << ',';
      std::snprintf(buf, sizeof buf, "%.9g", track.at(t, f));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace ncdm::datagen
