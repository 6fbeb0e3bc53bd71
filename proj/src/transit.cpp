#include "citits/transit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "citits/error.hpp"

namespace citits {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// A stop farther than this from the polyline is a configuration error.
constexpr double kStopOnPolylineM = 1.0;

struct Projection {
  double offset_m;
  double distance_m;
};

// Projection of p onto segment a-b in a local equirectangular frame.
Projection project(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b, double seg_len_m) {
  const double k = kEarthRadiusM * kDegToRad;
  const double coslat = std::cos(a.lat * kDegToRad);
  const double bx = (b.lon - a.lon) * coslat * k;
  const double by = (b.lat - a.lat) * k;
  const double px = (p.lon - a.lon) * coslat * k;
  const double py = (p.lat - a.lat) * k;
  const double len2 = bx * bx + by * by;
  double t = len2 > 0.0 ? (px * bx + py * by) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - t * bx;
  const double dy = py - t * by;
  return {t * seg_len_m, std::hypot(dx, dy)};
}

}  // namespace

double geo_distance(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

Route::Route(std::string route_id, std::vector<RouteStop> stops, std::vector<GeoPoint> polyline,
             std::vector<std::string> leg_roads)
    : id_(std::move(route_id)),
      stops_(std::move(stops)),
      polyline_(std::move(polyline)),
      leg_roads_(std::move(leg_roads)) {
  if (stops_.size() < 2) throw Error(ErrorCode::BadConfig, "route " + id_ + " needs >= 2 stops");
  for (std::size_t i = 0; i < stops_.size(); ++i) {
    const auto& s = stops_[i];
    if (s.stop.stop_id.empty() || s.stop.name.empty() || !s.stop.location.valid()) {
      throw Error(ErrorCode::BadConfig, "route " + id_ + " has an invalid stop");
    }
    if (i > 0 && s.scheduled_offset_s <= stops_[i - 1].scheduled_offset_s) {
      throw Error(ErrorCode::BadConfig, "route " + id_ + " offsets must strictly increase");
    }
  }
  if (polyline_.empty()) {
    for (const auto& s : stops_) polyline_.push_back(s.stop.location);
  }
  if (leg_roads_.empty()) leg_roads_.assign(stops_.size() - 1, std::string{});
  if (leg_roads_.size() != stops_.size() - 1) {
    throw Error(ErrorCode::BadConfig, "route " + id_ + " needs one road entry per leg");
  }
  cumulative_.assign(1, 0.0);
  for (std::size_t i = 1; i < polyline_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + geo_distance(polyline_[i - 1], polyline_[i]));
  }
  if (!(length_m() > 0.0)) throw Error(ErrorCode::BadConfig, "route " + id_ + " has zero length");

  double last = -1.0;
  for (const auto& s : stops_) {
    // Search forward from the previous stop so loops resolve in order.
    double best = std::numeric_limits<double>::infinity();
    double best_offset = 0.0;
    for (std::size_t i = 0; i + 1 < polyline_.size(); ++i) {
      const double seg = cumulative_[i + 1] - cumulative_[i];
      const auto pr = project(s.stop.location, polyline_[i], polyline_[i + 1], seg);
      const double at = cumulative_[i] + pr.offset_m;
      if (at < last) continue;
      if (pr.distance_m < best) {
        best = pr.distance_m;
        best_offset = at;
      }
    }
    if (best > kStopOnPolylineM) {
      throw Error(ErrorCode::BadConfig, "stop " + s.stop.stop_id + " is not on route " + id_);
    }
    stop_progress_.push_back(best_offset);
    last = best_offset;
  }
}

double Route::snap(const GeoPoint& p) const {
  double best = std::numeric_limits<double>::infinity();
  double best_offset = 0.0;
  for (std::size_t i = 0; i + 1 < polyline_.size(); ++i) {
    const double seg = cumulative_[i + 1] - cumulative_[i];
    const auto pr = project(p, polyline_[i], polyline_[i + 1], seg);
    if (pr.distance_m < best) {
      best = pr.distance_m;
      best_offset = cumulative_[i] + pr.offset_m;
    }
  }
  return std::min(best_offset, length_m());
}

GeoPoint Route::point_at(double progress_m) const {
  progress_m = std::clamp(progress_m, 0.0, length_m());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), progress_m);
  std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  seg = seg == 0 ? 0 : seg - 1;
  if (seg + 1 >= polyline_.size()) return polyline_.back();
  const double len = cumulative_[seg + 1] - cumulative_[seg];
  const double t = len > 0.0 ? (progress_m - cumulative_[seg]) / len : 0.0;
  const auto& a = polyline_[seg];
  const auto& b = polyline_[seg + 1];
  return {a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)};
}

const std::string& Route::road_at(double progress_m) const {
  std::size_t leg = 0;
  while (leg + 1 < leg_roads_.size() && progress_m >= stop_progress_[leg + 1]) ++leg;
  return leg_roads_[leg];
}

BusStop nearest_stop(const GeoPoint& source, std::span<const BusStop> stops) {
  if (stops.empty()) throw Error(ErrorCode::EmptyStopList, "no bus stops to choose from");
  const BusStop* best = nullptr;
  double best_d = 0.0;
  for (const auto& s : stops) {
    const double d = geo_distance(source, s.location);
    if (!best || d < best_d || (d == best_d && s.stop_id < best->stop_id)) {
      best = &s;
      best_d = d;
    }
  }
  return *best;
}

double congestion_speed_factor(double congestion_percent) {
  return std::max(1.0 - 0.75 * congestion_percent / 100.0, 0.1);
}

double estimate_arrival(double distance_m, double free_speed_mps, double congestion_percent) {
  if (!(distance_m >= 0.0) || !(free_speed_mps > 0.0) ||
      !(congestion_percent >= 0.0 && congestion_percent <= 100.0)) {
    throw Error(ErrorCode::OutOfRange, "invalid arrival-time inputs");
  }
  return distance_m / (free_speed_mps * congestion_speed_factor(congestion_percent));
}

std::string normalize_name(std::string_view name) {
  auto first = name.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = name.find_last_not_of(" \t\r\n");
  std::string out(name.substr(first, last - first + 1));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<EtaResult> buses_toward(const GeoPoint& source, std::string_view destination_stop_name,
                                    std::span<const Route> routes, std::span<const Bus> buses,
                                    const CongestionLookup& congestion) {
  const std::string dest = normalize_name(destination_stop_name);
  std::vector<BusStop> all_stops;
  std::set<std::string> seen;
  bool dest_known = false;
  for (const auto& r : routes) {
    for (const auto& rs : r.stops()) {
      if (normalize_name(rs.stop.name) == dest) dest_known = true;
      if (seen.insert(rs.stop.stop_id).second) all_stops.push_back(rs.stop);
    }
  }
  if (dest.empty() || !dest_known) {
    throw Error(ErrorCode::UnknownDestination, "unknown destination");
  }
  const BusStop boarding = nearest_stop(source, all_stops);

  struct Candidate {
    const Route* route;
    double boarding_progress;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : routes) {
    const auto& stops = r.stops();
    for (std::size_t i = 0; i < stops.size(); ++i) {
      if (stops[i].stop.stop_id != boarding.stop_id) continue;
      const bool reaches = std::any_of(stops.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                       stops.end(), [&](const RouteStop& s) {
                                         return normalize_name(s.stop.name) == dest;
                                       });
      if (reaches) {
        candidates.push_back({&r, r.stop_progress(i)});
        break;
      }
    }
  }
  if (candidates.empty()) throw Error(ErrorCode::NoRouteFound, "no route found");

  std::vector<EtaResult> results;
  for (const auto& c : candidates) {
    for (const auto& b : buses) {
      if (b.route_id != c.route->id() || !(b.progress_m < c.boarding_progress)) continue;
      const double distance = c.boarding_progress - b.progress_m;
      double pct = 0.0;
      if (const auto& road = c.route->road_at(b.progress_m); !road.empty() && congestion) {
        pct = congestion(road).value_or(0.0);
      }
      results.push_back({b.bus_no, boarding, distance,
                         estimate_arrival(distance, b.free_speed_mps, pct)});
    }
  }
  if (results.empty()) throw Error(ErrorCode::NoBusAvailable, "no bus available");
  std::sort(results.begin(), results.end(), [](const EtaResult& a, const EtaResult& b) {
    if (a.eta_s != b.eta_s) return a.eta_s < b.eta_s;
    return a.bus_no < b.bus_no;
  });
  return results;
}

Bus update_fix(const Bus& bus, const Route& route, const GpsFix& fix) {
  if (bus.last_fix && fix.timestamp_s < bus.last_fix->timestamp_s) {
    throw Error(ErrorCode::StaleFix, "stale GPS fix for bus " + bus.bus_no);
  }
  Bus next = bus;
  next.progress_m = route.snap(fix.location);
  next.last_fix = fix;
  return next;
}

}  // namespace citits
