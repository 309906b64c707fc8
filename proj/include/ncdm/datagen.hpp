#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace ncdm::datagen {

inline constexpr std::size_t kModeledFeatures = 7;
inline constexpr std::size_t kNoiseFeatures = 16;
inline constexpr std::size_t kFeatureCount = kModeledFeatures + kNoiseFeatures;

/// Column names: dx, dy, dz, speed, turn_angle, radius, growth_rate,
/// noise_00 … noise_15.
const std::array<std::string_view, kFeatureCount>& feature_names();

/// Run-and-tumble kinematics, in sample steps and length units.
struct MotionParams {
  double run_speed = 1.0;
  double run_mean_steps = 10.0;
  double tumble_mean_steps = 2.0;
  double tumble_step_sd = 0.1;
};

struct CellModelParams {
  double upsilon = 1.0;          ///< growth exponent
  double lifespan_shape = 50.0;  ///< gamma lifespan, mean 500 time units
  double lifespan_scale = 10.0;
  double r0_shape = 200.0;       ///< gamma initial radius, mean 10
  double r0_scale = 0.05;
  std::size_t population_limit = 64;
  std::size_t founders = 1;
  std::size_t min_track_length = 228;
  std::size_t max_track_length = 280;
  MotionParams motion;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class Fate { kDivided, kApoptosis };

std::string_view to_string(Fate f);

struct CellTrack {
  std::size_t index = 0;
  std::optional<std::size_t> parent;
  double birth_time = 0;
  double lifespan = 0;
  double r0 = 0;
  Fate fate = Fate::kDivided;
  std::size_t length = 0;        ///< T, number of sampled time points
  std::vector<double> features;  ///< row-major, length × kFeatureCount

  double at(std::size_t t, std::size_t f) const {
    return features[t * kFeatureCount + f];
  }
};

/// r0 + r0·((t − t0)/lifespan)^υ, defined on [t0, t0 + lifespan].
double cell_radius(double t, double t0, double r0, double lifespan, double upsilon);

/// Simulates a proliferating population from `founders` cells and returns
/// the first `n_cells` cells in birth order. A cell reaching its lifespan
/// divides unless the two daughters would exceed the population limit, in
/// which case it dies. Each cell draws from its own random substreams
/// derived from (seed, cell index), so results do not depend on `jobs`.
std::vector<CellTrack> simulate_population(const CellModelParams& params,
                                           std::size_t n_cells, unsigned jobs = 0);

/// Peak number of simultaneously alive cells in the simulated lineage
/// (diagnostic for the population-limit invariant).
std::size_t peak_population(const CellModelParams& params, std::size_t n_cells);

/// Header of feature names, then one row per time point.
void write_track_csv(const CellTrack& track, std::ostream& out);

}  // namespace ncdm::datagen
