#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "citits/config.hpp"
#include "citits/congestion.hpp"
#include "citits/signalctl.hpp"
#include "citits/transit.hpp"

namespace citits {

struct RoadView {
  std::vector<CongestionSample> recent;  // samples within the trend window
  std::optional<Trend5Min> trend;        // present when >= 2 recent samples
  std::size_t total_samples = 0;

  const CongestionSample* latest() const { return recent.empty() ? nullptr : &recent.back(); }
};

// Immutable view of the datacenter at one logical instant.
struct Snapshot {
  std::int64_t clock_s = 0;
  std::shared_ptr<const CityConfig> city;
  std::map<std::string, RoadView> roads;
  std::vector<Bus> buses;
  std::vector<SignalPlan> plans;

  std::optional<double> latest_percent(const std::string& road_id) const;
};

}  // namespace citits
