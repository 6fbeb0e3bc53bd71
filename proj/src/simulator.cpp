#include "citits/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "citits/error.hpp"

namespace citits {

namespace {

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

std::uint8_t jitter(int base, int amount, std::uint64_t bits) {
  const int span = 2 * amount + 1;
  const int v = base + static_cast<int>(bits % static_cast<std::uint64_t>(span)) - amount;
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

int hour_of(std::int64_t clock_s) { return calendar_slot(clock_s).hour; }

}  // namespace

std::size_t CityModel::road_index(const std::string& road_id) const {
  for (std::size_t i = 0; i < roads.size(); ++i) {
    if (roads[i].profile.road_id == road_id) return i;
  }
  throw Error(ErrorCode::UnknownRoad, "unknown road " + road_id);
}

RoadProfile synthetic_profile(const RoadConfig& road, std::uint64_t seed, int tolerance) {
  const auto& s = road.synthetic;
  Raster baseline(s.width, s.height);
  Mask mask(s.width, s.height);
  const std::uint64_t h = mix(seed ^ hash_string(road.id));
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const std::uint64_t bits = mix(h + static_cast<std::uint64_t>(y) * 7919u + static_cast<std::uint64_t>(x));
      const bool on_road = x >= s.road_x0 && x < s.road_x1;
      mask.set(x, y, on_road);
      if (on_road) {
        const auto g = jitter(110, 6, bits);
        baseline.at(x, y) = {g, g, static_cast<std::uint8_t>(std::min(255, g + 4))};
      } else {
        baseline.at(x, y) = {jitter(70, 8, bits), jitter(130, 8, bits >> 16), jitter(60, 8, bits >> 32)};
      }
    }
  }
  RoadProfile p{road.id, std::move(baseline), std::move(mask), road.length_m, road.lanes,
                road.capture_interval_s, tolerance};
  p.validate();
  return p;
}

std::vector<MapPoint> blob_slots(const Mask& mask) {
  std::vector<MapPoint> slots;
  const std::size_t cap = mask.count() / kBlobPixels;
  for (int y = mask.height() - kBlobHeight; y >= 0 && slots.size() < cap; y -= kBlobHeight) {
    for (int x = 0; x + kBlobWidth <= mask.width() && slots.size() < cap; x += kBlobWidth) {
      bool inside = true;
      for (int dy = 0; dy < kBlobHeight && inside; ++dy) {
        for (int dx = 0; dx < kBlobWidth && inside; ++dx) inside = mask.at(x + dx, y + dy);
      }
      if (inside) slots.push_back({x, y});
    }
  }
  return slots;
}

CityModel build_city(std::shared_ptr<const CityConfig> config) {
  CityModel city;
  city.config = config;
  for (const auto& rc : config->roads) {
    RoadProfile profile =
        rc.baseline_path
            ? RoadProfile{rc.id, read_ppm(*rc.baseline_path), read_mask(*rc.mask_path),
                          rc.length_m, rc.lanes, rc.capture_interval_s, config->tolerance}
            : synthetic_profile(rc, config->seed, config->tolerance);
    profile.validate();
    SimRoad r{std::move(profile)};
    r.capacity = rc.capacity();
    for (std::size_t h = 0; h < 24; ++h) {
      r.arrivals_milli_per_min[h] = std::llround(rc.arrivals_per_min[h] * 1000.0);
    }
    r.slots = blob_slots(r.profile.roi_mask);
    city.roads.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < config->junctions.size(); ++j) {
    for (const auto& rid : config->junctions[j].roads) {
      city.roads[city.road_index(rid)].junctions.push_back(j);
    }
  }
  return city;
}

SimState initial_state(const CityModel& city) {
  const auto& cfg = *city.config;
  SimState s;
  s.clock_s = cfg.start_epoch_s;
  s.rng_seed = cfg.seed;
  s.roads.assign(city.roads.size(), RoadQueue{});
  for (const auto& j : cfg.junctions) {
    s.junctions.push_back(start_junction(equal_plan(j.id, j.roads, cfg.timing)));
  }
  for (const auto& b : cfg.buses) {
    s.buses.push_back(Bus{b.bus_no, b.route_id, b.progress_m, std::nullopt, b.speed_mps});
  }
  return s;
}

bool road_is_green(const CityModel& city, const SimState& state, std::size_t road) {
  const auto& r = city.roads[road];
  return std::any_of(r.junctions.begin(), r.junctions.end(), [&](std::size_t j) {
    return state.junctions[j].is_green(r.profile.road_id);
  });
}

StepReport step(const CityModel& city, SimState& state, std::int64_t dt_s) {
  if (dt_s <= 0) throw Error(ErrorCode::OutOfRange, "simulation step must be positive");
  const int hour = hour_of(state.clock_s);
  for (std::size_t i = 0; i < city.roads.size(); ++i) {
    const auto& road = city.roads[i];
    auto& q = state.roads[i];

    q.arrival_acc += road.arrivals_milli_per_min[static_cast<std::size_t>(hour)] * dt_s;
    const std::int64_t arrivals = q.arrival_acc / 60'000;
    q.arrival_acc %= 60'000;
    q.queue += arrivals;
    q.entered += arrivals;

    if (road_is_green(city, state, i)) {
      q.discharge_acc += kDischargeMilliPerLaneS * road.profile.lanes * dt_s;
      const std::int64_t departures = std::min(q.queue, q.discharge_acc / 1000);
      q.queue -= departures;
      q.departed += departures;
      q.discharge_acc -= departures * 1000;
      // Unused green capacity is not banked.
      if (q.queue == 0) q.discharge_acc = std::min<std::int64_t>(q.discharge_acc, 999);
    } else {
      q.discharge_acc = 0;
    }
  }

  StepReport report;
  report.cycles_completed.reserve(state.junctions.size());
  for (auto& j : state.junctions) {
    auto res = tick(j, dt_s);
    j = std::move(res.state);
    report.cycles_completed.push_back(res.cycles_completed);
  }
  state.clock_s += dt_s;
  return report;
}

Raster synthesize_frame(const SimRoad& road, std::int64_t queue) {
  return synthesize_frame(road, queue, 0, 0);
}

Raster synthesize_frame(const SimRoad& road, std::int64_t queue, std::uint64_t noise_seed,
                        int noise) {
  if (queue < 0) throw Error(ErrorCode::OutOfRange, "queue must be non-negative");
  Raster frame = road.profile.baseline;
  if (noise > 0) {
    std::mt19937_64 rng(noise_seed);
    for (auto& p : frame.pixels()) {
      const std::uint64_t bits = rng();
      p = {jitter(p.r, noise, bits), jitter(p.g, noise, bits >> 21), jitter(p.b, noise, bits >> 42)};
    }
  }
  const auto drawn = std::min<std::size_t>(static_cast<std::size_t>(queue), road.slots.size());
  for (std::size_t k = 0; k < drawn; ++k) {
    const auto& s = road.slots[k];
    for (int dy = 0; dy < kBlobHeight; ++dy) {
      for (int dx = 0; dx < kBlobWidth; ++dx) frame.at(s.x + dx, s.y + dy) = kVehicleColor;
    }
  }
  return frame;
}

std::vector<FixRecord> advance_buses(const CityModel& city, SimState& state, std::int64_t dt_s) {
  if (dt_s <= 0) throw Error(ErrorCode::OutOfRange, "bus step must be positive");
  const auto& cfg = *city.config;
  const bool emit = (state.clock_s - cfg.start_epoch_s) % cfg.gps_interval_s == 0;
  std::vector<FixRecord> fixes;
  for (auto& bus : state.buses) {
    const Route* route = cfg.find_route(bus.route_id);
    double pct = 0.0;
    if (const auto& road = route->road_at(bus.progress_m); !road.empty()) {
      pct = ground_truth_congestion(city, state, road);
    }
    bus.progress_m += bus.free_speed_mps * congestion_speed_factor(pct) * static_cast<double>(dt_s);
    if (bus.progress_m >= route->length_m()) bus.progress_m = 0.0;
    if (emit) {
      GpsFix fix{route->point_at(bus.progress_m), state.clock_s};
      bus.last_fix = fix;
      fixes.push_back({bus.bus_no, fix});
    }
  }
  return fixes;
}

double ground_truth_congestion(const CityModel& city, const SimState& state,
                               const std::string& road_id) {
  const auto i = city.road_index(road_id);
  const double ratio = static_cast<double>(state.roads[i].queue) /
                       static_cast<double>(city.roads[i].capacity);
  return 100.0 * std::min(ratio, 1.0);
}

}  // namespace citits
