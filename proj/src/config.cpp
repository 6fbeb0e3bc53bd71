#include "citits/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "citits/error.hpp"
#include "citits/persist.hpp"

namespace citits {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

template <typename T>
T get(const YAML::Node& node, const char* key, T fallback) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    bad(std::string("invalid value for '") + key + "'");
  }
}

template <typename T>
T need(const YAML::Node& node, const char* key, const std::string& where) {
  const auto v = node[key];
  if (!v) bad(where + ": missing '" + key + "'");
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    bad(where + ": invalid value for '" + key + "'");
  }
}

GeoPoint point(const YAML::Node& node, const std::string& where) {
  GeoPoint p;
  if (node.IsSequence() && node.size() == 2) {
    p = {node[0].as<double>(), node[1].as<double>()};
  } else if (node.IsMap()) {
    p = {need<double>(node, "lat", where), need<double>(node, "lon", where)};
  } else {
    bad(where + ": expected a [lat, lon] pair");
  }
  if (!p.valid()) bad(where + ": coordinate out of range");
  return p;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

RoadConfig parse_road(const YAML::Node& n, const CityConfig& city) {
  RoadConfig r;
  r.id = need<std::string>(n, "id", "road");
  const std::string where = "road " + r.id;
  r.length_m = need<double>(n, "length_m", where);
  r.lanes = get<int>(n, "lanes", 1);
  r.capture_interval_s = get<std::int64_t>(n, "capture_interval_s", city.capture_interval_s);
  if (!(r.length_m > 0.0) || r.lanes < 1 || r.capture_interval_s <= 0) {
    bad(where + ": length, lanes and capture interval must be positive");
  }
  if (r.capacity() < 1) bad(where + ": capacity must be at least one vehicle");

  if (const auto img = n["image"]) {
    if (img["baseline"]) r.baseline_path = img["baseline"].as<std::string>();
    if (img["mask"]) r.mask_path = img["mask"].as<std::string>();
    r.synthetic.width = get<int>(img, "width", r.synthetic.width);
    r.synthetic.height = get<int>(img, "height", r.synthetic.height);
    if (const auto cols = img["road_columns"]) {
      if (!cols.IsSequence() || cols.size() != 2) bad(where + ": road_columns needs [x0, x1]");
      r.synthetic.road_x0 = cols[0].as<int>();
      r.synthetic.road_x1 = cols[1].as<int>();
    }
  }
  const auto& s = r.synthetic;
  if (s.width <= 0 || s.height <= 0 || s.road_x0 < 0 || s.road_x1 > s.width ||
      s.road_x0 >= s.road_x1) {
    bad(where + ": invalid synthetic image geometry");
  }
  if (r.baseline_path.has_value() != r.mask_path.has_value()) {
    bad(where + ": baseline and mask must be given together");
  }

  if (const auto map = n["map"]) {
    for (const auto& p : map) {
      if (!p.IsSequence() || p.size() != 2) bad(where + ": map points are [x, y]");
      r.map.push_back({p[0].as<int>(), p[1].as<int>()});
    }
  }

  const auto arr = n["arrivals_per_min"];
  if (!arr) {
    r.arrivals_per_min.fill(0.0);
  } else if (arr.IsScalar()) {
    r.arrivals_per_min.fill(arr.as<double>());
  } else if (arr.IsSequence() && arr.size() == 24) {
    for (std::size_t h = 0; h < 24; ++h) r.arrivals_per_min[h] = arr[h].as<double>();
  } else {
    bad(where + ": arrivals_per_min needs a number or 24 hourly numbers");
  }
  for (double a : r.arrivals_per_min) {
    if (!(a >= 0.0) || !std::isfinite(a)) bad(where + ": arrival rates must be >= 0");
  }
  return r;
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& where) {
  std::vector<std::string> out;
  if (!node) return out;
  if (!node.IsSequence()) bad(where + ": expected a list");
  for (const auto& x : node) out.push_back(x.as<std::string>());
  return out;
}

Route parse_route(const YAML::Node& n) {
  const auto id = need<std::string>(n, "id", "route");
  const std::string where = "route " + id;
  std::vector<RouteStop> stops;
  for (const auto& s : n["stops"]) {
    RouteStop rs;
    rs.stop.stop_id = need<std::string>(s, "id", where);
    rs.stop.name = need<std::string>(s, "name", where);
    rs.stop.location = point(s, where);
    rs.scheduled_offset_s = get<std::int64_t>(s, "offset_s", 0);
    stops.push_back(std::move(rs));
  }
  std::vector<GeoPoint> polyline;
  if (const auto pl = n["polyline"]) {
    for (const auto& p : pl) polyline.push_back(point(p, where));
  }
  return Route(id, std::move(stops), std::move(polyline), string_list(n["legs"], where));
}

void validate(const CityConfig& c) {
  if (c.roads.empty()) bad("city needs at least one road");
  if (c.capture_interval_s <= 0 || c.gps_interval_s <= 0) bad("intervals must be positive");
  if (c.tolerance < 0 || c.tolerance > 255) bad("tolerance must be in [0,255]");
  if (c.frame_noise < 0 || c.frame_noise > c.tolerance) {
    bad("frame_noise must be between 0 and the pixel tolerance");
  }
  std::set<std::string> ids;
  for (const auto& r : c.roads) {
    if (!ids.insert(r.id).second) bad("duplicate road " + r.id);
    for (const auto& p : r.map) {
      if (p.x < 0 || p.y < 0 || p.x >= c.map_width || p.y >= c.map_height) {
        bad("road " + r.id + ": map point outside the map canvas");
      }
    }
  }
  std::set<std::string> jids;
  for (const auto& j : c.junctions) {
    if (!jids.insert(j.id).second) bad("duplicate junction " + j.id);
    std::set<std::string> members(j.roads.begin(), j.roads.end());
    if (members.size() < 2 || members.size() != j.roads.size()) {
      bad("junction " + j.id + " needs >= 2 distinct roads");
    }
    for (const auto& r : j.roads) {
      if (!c.find_road(r)) bad("junction " + j.id + " references unknown road " + r);
    }
    // Validates the timing against this junction's phase count.
    (void)equal_plan(j.id, j.roads, c.timing);
  }
  std::set<std::string> rids;
  for (const auto& r : c.routes) {
    if (!rids.insert(r.id()).second) bad("duplicate route " + r.id());
    for (const auto& leg : r.leg_roads()) {
      if (!leg.empty() && !c.find_road(leg)) bad("route " + r.id() + " references unknown road " + leg);
    }
  }
  std::set<std::string> bids;
  for (const auto& b : c.buses) {
    if (!bids.insert(b.bus_no).second) bad("duplicate bus " + b.bus_no);
    const Route* r = c.find_route(b.route_id);
    if (!r) bad("bus " + b.bus_no + " references unknown route " + b.route_id);
    if (!(b.speed_mps > 0.0) || b.progress_m < 0.0 || b.progress_m > r->length_m()) {
      bad("bus " + b.bus_no + ": invalid speed or starting progress");
    }
  }
  for (const auto& l : c.traffic_links) {
    if (!c.find_road(l.road_id)) bad("traffic link references unknown road " + l.road_id);
  }
}

}  // namespace

std::int64_t RoadConfig::capacity() const {
  return static_cast<std::int64_t>(std::floor(length_m * lanes / 7.5));
}

const RoadConfig* CityConfig::find_road(const std::string& id) const {
  for (const auto& r : roads) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const Route* CityConfig::find_route(const std::string& id) const {
  for (const auto& r : routes) {
    if (r.id() == id) return &r;
  }
  return nullptr;
}

const Place* CityConfig::find_place(const std::string& name) const {
  const auto key = normalize_name(name);
  for (const auto& p : gazetteer) {
    if (normalize_name(p.name) == key) return &p;
  }
  return nullptr;
}

const TrafficLink* CityConfig::find_link(const std::string& from, const std::string& to) const {
  const auto f = normalize_name(from);
  const auto t = normalize_name(to);
  for (const auto& l : traffic_links) {
    if (normalize_name(l.from) == f && normalize_name(l.to) == t) return &l;
  }
  return nullptr;
}

CityConfig parse_city_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    bad(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) bad("config must be a mapping");

  try {
    CityConfig c;
    const auto city = root["city"];
    c.name = get<std::string>(city, "name", c.name);
    c.seed = get<std::uint64_t>(city, "seed", c.seed);
    c.start_epoch_s = get<std::int64_t>(city, "start_epoch_s", c.start_epoch_s);
    c.capture_interval_s = get<std::int64_t>(city, "capture_interval_s", c.capture_interval_s);
    c.gps_interval_s = get<std::int64_t>(city, "gps_interval_s", c.gps_interval_s);
    c.tolerance = get<int>(city, "pixel_tolerance", c.tolerance);
    c.frame_noise = get<int>(city, "frame_noise", c.frame_noise);
    c.write_frames = get<bool>(city, "write_frames", c.write_frames);
    c.service_number = get<std::string>(city, "service_number", c.service_number);
    if (city && city["center"]) c.center = point(city["center"], "city center");
    if (city && city["map_canvas"]) {
      c.map_width = city["map_canvas"][0].as<int>();
      c.map_height = city["map_canvas"][1].as<int>();
      if (c.map_width <= 0 || c.map_height <= 0) bad("map_canvas must be positive");
    }

    if (const auto sig = root["signal"]) {
      auto& t = c.timing;
      t.cycle_s = get<std::int64_t>(sig, "cycle_s", t.cycle_s);
      t.lost_time_s = get<std::int64_t>(sig, "lost_time_s", t.lost_time_s);
      t.min_green_s = get<std::int64_t>(sig, "min_green_s", t.min_green_s);
      t.max_green_s = get<std::int64_t>(sig, "max_green_s", t.max_green_s);
      t.max_delta_s = get<std::int64_t>(sig, "max_delta_s", t.max_delta_s);
      if (const auto w = sig["weights"]) {
        auto& pw = c.weights;
        pw.congestion = get<double>(w, "congestion", pw.congestion);
        pw.trend = get<double>(w, "trend", pw.trend);
        pw.geometry = get<double>(w, "geometry", pw.geometry);
        pw.history_blend = get<double>(w, "history_blend", pw.history_blend);
      }
    }

    for (const auto& n : root["roads"]) {
      auto r = parse_road(n, c);
      if (r.baseline_path) r.baseline_path = resolve(base_dir, r.baseline_path->string());
      if (r.mask_path) r.mask_path = resolve(base_dir, r.mask_path->string());
      c.roads.push_back(std::move(r));
    }
    for (const auto& n : root["junctions"]) {
      JunctionConfig j;
      j.id = need<std::string>(n, "id", "junction");
      j.roads = string_list(n["roads"], "junction " + j.id);
      c.junctions.push_back(std::move(j));
    }

    for (const auto& n : root["routes"]) c.routes.push_back(parse_route(n));
    if (const auto file = root["routes_file"]) {
      const auto legs = root["route_legs"];
      for (auto& r : read_routes_csv(resolve(base_dir, file.as<std::string>()))) {
        std::vector<std::string> leg_roads;
        if (legs && legs[r.id()]) leg_roads = string_list(legs[r.id()], "route " + r.id());
        c.routes.emplace_back(r.id(), r.stops(), r.polyline(), std::move(leg_roads));
      }
    }

    for (const auto& n : root["buses"]) {
      BusConfig b;
      b.bus_no = need<std::string>(n, "bus_no", "bus");
      b.route_id = need<std::string>(n, "route", "bus " + b.bus_no);
      b.progress_m = get<double>(n, "progress_m", 0.0);
      b.speed_mps = get<double>(n, "speed_mps", 10.0);
      c.buses.push_back(std::move(b));
    }
    for (const auto& n : root["gazetteer"]) {
      Place p;
      p.name = need<std::string>(n, "name", "place");
      p.location = point(n, "place " + p.name);
      c.gazetteer.push_back(std::move(p));
    }
    for (const auto& n : root["traffic_links"]) {
      c.traffic_links.push_back({need<std::string>(n, "from", "traffic link"),
                                 need<std::string>(n, "to", "traffic link"),
                                 need<std::string>(n, "road", "traffic link")});
    }
    validate(c);
    return c;
  } catch (const YAML::Exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
}

CityConfig load_city_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_city_config(ss.str(), path.parent_path());
}

}  // namespace citits
