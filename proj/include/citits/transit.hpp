#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace citits {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool valid() const noexcept { return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0; }
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Haversine great-circle distance in meters.
double geo_distance(const GeoPoint& a, const GeoPoint& b);

struct BusStop {
  std::string stop_id;
  std::string name;
  GeoPoint location;

  friend bool operator==(const BusStop&, const BusStop&) = default;
};

struct RouteStop {
  BusStop stop;
  std::int64_t scheduled_offset_s = 0;

  friend bool operator==(const RouteStop&, const RouteStop&) = default;
};

// A route with its stops, the polyline the buses drive, and the camera road
// each leg between consecutive stops runs on (empty when unmonitored).
class Route {
 public:
  // Polyline defaults to the stop locations in order. Throws BadConfig when
  // the stop list or offsets are invalid or a stop is off the polyline.
  Route(std::string route_id, std::vector<RouteStop> stops, std::vector<GeoPoint> polyline = {},
        std::vector<std::string> leg_roads = {});

  const std::string& id() const noexcept { return id_; }
  const std::vector<RouteStop>& stops() const noexcept { return stops_; }
  const std::vector<GeoPoint>& polyline() const noexcept { return polyline_; }
  const std::vector<std::string>& leg_roads() const noexcept { return leg_roads_; }

  double length_m() const noexcept { return cumulative_.back(); }
  double stop_progress(std::size_t stop_index) const { return stop_progress_.at(stop_index); }

  // Arc-length of the polyline point nearest to `p`.
  double snap(const GeoPoint& p) const;
  GeoPoint point_at(double progress_m) const;
  // Road of the leg containing `progress_m`; empty if unmonitored.
  const std::string& road_at(double progress_m) const;

  friend bool operator==(const Route& a, const Route& b) {
    return a.id_ == b.id_ && a.stops_ == b.stops_ && a.polyline_ == b.polyline_ &&
           a.leg_roads_ == b.leg_roads_;
  }

 private:
  std::string id_;
  std::vector<RouteStop> stops_;
  std::vector<GeoPoint> polyline_;
  std::vector<std::string> leg_roads_;
  std::vector<double> cumulative_;
  std::vector<double> stop_progress_;
};

struct GpsFix {
  GeoPoint location;
  std::int64_t timestamp_s = 0;

  friend bool operator==(const GpsFix&, const GpsFix&) = default;
};

struct Bus {
  std::string bus_no;
  std::string route_id;
  double progress_m = 0.0;
  std::optional<GpsFix> last_fix;
  double free_speed_mps = 10.0;

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct EtaResult {
  std::string bus_no;
  BusStop boarding_stop;
  double distance_m = 0.0;
  double eta_s = 0.0;
};

BusStop nearest_stop(const GeoPoint& source, std::span<const BusStop> stops);

// Speed multiplier under congestion: max(1 - 0.75 * c/100, 0.1).
double congestion_speed_factor(double congestion_percent);

double estimate_arrival(double distance_m, double free_speed_mps, double congestion_percent);

// Latest congestion percent of a road, if any sample exists.
using CongestionLookup = std::function<std::optional<double>(const std::string& road_id)>;

std::vector<EtaResult> buses_toward(const GeoPoint& source, std::string_view destination_stop_name,
                                    std::span<const Route> routes, std::span<const Bus> buses,
                                    const CongestionLookup& congestion);

// Snaps the fix onto the bus's route. Throws StaleFix if older than last_fix.
Bus update_fix(const Bus& bus, const Route& route, const GpsFix& fix);

// Trimmed, case-folded name used for stop and place lookups.
std::string normalize_name(std::string_view name);

}  // namespace citits
