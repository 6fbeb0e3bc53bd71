#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "citits/congestion.hpp"
#include "citits/signalctl.hpp"
#include "citits/transit.hpp"

namespace citits {

// Generated empty-road image: textured asphalt band [road_x0, road_x1) over
// the full height; the mask is that band.
struct SyntheticImage {
  int width = 64;
  int height = 48;
  int road_x0 = 16;
  int road_x1 = 46;
};

struct RoadConfig {
  std::string id;
  double length_m = 0.0;
  int lanes = 1;
  std::int64_t capture_interval_s = 30;
  std::optional<std::filesystem::path> baseline_path;
  std::optional<std::filesystem::path> mask_path;
  SyntheticImage synthetic;
  std::vector<MapPoint> map;
  std::array<double, 24> arrivals_per_min{};

  // Vehicles that fit at 7.5 m per vehicle per lane.
  std::int64_t capacity() const;
};

struct JunctionConfig {
  std::string id;
  std::vector<std::string> roads;
};

struct BusConfig {
  std::string bus_no;
  std::string route_id;
  double progress_m = 0.0;
  double speed_mps = 10.0;
};

struct Place {
  std::string name;
  GeoPoint location;
};

struct TrafficLink {
  std::string from;
  std::string to;
  std::string road_id;
};

struct CityConfig {
  std::string name = "city";
  std::uint64_t seed = 42;
  std::int64_t start_epoch_s = 1'699'833'600;  // a Monday, 00:00 UTC
  std::int64_t capture_interval_s = 30;
  std::int64_t gps_interval_s = 10;
  int tolerance = kDefaultPixelTolerance;
  int frame_noise = 0;
  bool write_frames = true;
  GeoPoint center;
  std::string service_number = "+919766429259";
  SignalTiming timing;
  PriorityWeights weights;
  int map_width = 160;
  int map_height = 120;

  std::vector<RoadConfig> roads;
  std::vector<JunctionConfig> junctions;
  std::vector<Route> routes;
  std::vector<BusConfig> buses;
  std::vector<Place> gazetteer;
  std::vector<TrafficLink> traffic_links;

  const RoadConfig* find_road(const std::string& id) const;
  const Route* find_route(const std::string& id) const;
  const Place* find_place(const std::string& name) const;
  const TrafficLink* find_link(const std::string& from, const std::string& to) const;
};

// Parses the YAML city description; relative file paths resolve against
// base_dir. Throws BadConfig with a description of the first problem found.
CityConfig parse_city_config(const std::string& text, const std::filesystem::path& base_dir);
CityConfig load_city_config(const std::filesystem::path& path);

}  // namespace citits
