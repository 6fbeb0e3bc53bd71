#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "citits/config.hpp"
#include "citits/congestion.hpp"
#include "citits/persist.hpp"
#include "citits/signalctl.hpp"
#include "citits/transit.hpp"

namespace citits {

inline constexpr Rgb kVehicleColor{30, 30, 30};
inline constexpr int kBlobWidth = 6;
inline constexpr int kBlobHeight = 3;
inline constexpr int kBlobPixels = kBlobWidth * kBlobHeight;

struct SimRoad {
  RoadProfile profile;
  std::int64_t capacity = 1;
  std::array<std::int64_t, 24> arrivals_milli_per_min{};  // thousandths of a vehicle
  std::vector<MapPoint> slots;                            // blob corners in fill order
  std::vector<std::size_t> junctions;                     // controlling junction indices
};

struct CityModel {
  std::shared_ptr<const CityConfig> config;
  std::vector<SimRoad> roads;

  std::size_t road_index(const std::string& road_id) const;
};

// Materializes the city: loads baseline/mask files or generates synthetic
// empty-road images, and precomputes blob slots.
CityModel build_city(std::shared_ptr<const CityConfig> config);

// Empty-road image and mask for a synthetic road.
RoadProfile synthetic_profile(const RoadConfig& road, std::uint64_t seed, int tolerance);

// Top-left corners of 6x3 cells that lie fully inside the mask, ordered from
// the stop line (bottom row) backwards, capped at floor(masked/18).
std::vector<MapPoint> blob_slots(const Mask& mask);

struct RoadQueue {
  std::int64_t queue = 0;
  std::int64_t entered = 0;
  std::int64_t departed = 0;
  std::int64_t arrival_acc = 0;    // thousandths of a vehicle x seconds/minute
  std::int64_t discharge_acc = 0;  // thousandths of a vehicle

  friend bool operator==(const RoadQueue&, const RoadQueue&) = default;
};

struct SimState {
  std::int64_t clock_s = 0;
  std::uint64_t rng_seed = 0;
  std::vector<RoadQueue> roads;
  std::vector<JunctionState> junctions;
  std::vector<Bus> buses;  // true positions
};

SimState initial_state(const CityModel& city);

struct StepReport {
  std::vector<int> cycles_completed;  // per junction
};

inline constexpr std::int64_t kDischargeMilliPerLaneS = 500;  // 0.5 veh/s/lane

// Queues evolve for dt seconds under the current signal phases, then the
// junctions tick and the clock advances.
StepReport step(const CityModel& city, SimState& state, std::int64_t dt_s);

bool road_is_green(const CityModel& city, const SimState& state, std::size_t road);

Raster synthesize_frame(const SimRoad& road, std::int64_t queue);
// Same, with per-pixel sensor noise of at most `noise` per channel outside
// the vehicle blobs, derived deterministically from `noise_seed`.
Raster synthesize_frame(const SimRoad& road, std::int64_t queue, std::uint64_t noise_seed,
                        int noise);

// Moves every bus by free speed x congestion factor x dt (wrapping to the
// route start at the end) and returns one fix per bus when the clock sits on
// a GPS interval boundary. Call after step() so the clock is current.
std::vector<FixRecord> advance_buses(const CityModel& city, SimState& state, std::int64_t dt_s);

double ground_truth_congestion(const CityModel& city, const SimState& state,
                               const std::string& road_id);

}  // namespace citits
