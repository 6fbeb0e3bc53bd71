#include "citits/gateway.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "citits/csv.hpp"
#include "citits/error.hpp"

namespace citits {

namespace {

constexpr std::string_view kEllipsis = "\xE2\x80\xA6";  // U+2026

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

[[noreturn]] void bad_format(const char* why) { throw Error(ErrorCode::BadFormat, why); }

QuerySource parse_source(std::string_view text) {
  if (text.front() != '@') return std::string(text);
  const auto rest = trim(text.substr(1));
  if (iequals(rest, "GPS")) return DeviceLocation{};
  const auto comma = rest.find(',');
  if (comma == std::string_view::npos) bad_format("bad coordinate source");
  const auto lat = csv::parse_double(trim(rest.substr(0, comma)));
  const auto lon = csv::parse_double(trim(rest.substr(comma + 1)));
  if (!lat || !lon) bad_format("bad coordinate source");
  const GeoPoint p{*lat, *lon};
  if (!p.valid()) bad_format("coordinate out of range");
  return p;
}

// Cuts `s` to at most `bytes` bytes on a UTF-8 boundary, adding an ellipsis
// when anything was removed.
std::string shorten(const std::string& s, std::size_t bytes) {
  if (s.size() <= bytes) return s;
  if (bytes < kEllipsis.size()) return {};
  std::size_t cut = bytes - kEllipsis.size();
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut) + std::string(kEllipsis);
}

std::string error_text(std::string_view message) {
  return fmt::format("ERR {} | {}", message, kUsage);
}

const Place* nearest_place(const CityConfig& city, const GeoPoint& p) {
  const Place* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& place : city.gazetteer) {
    const double d = geo_distance(p, place.location);
    if (d < best_d) {
      best = &place;
      best_d = d;
    }
  }
  return best;
}

std::string_view message_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDestination: return "unknown destination";
    case ErrorCode::NoRouteFound: return "no route found";
    case ErrorCode::NoBusAvailable: return "no bus available";
    case ErrorCode::NoData: return "no data";
    case ErrorCode::UnknownRoad: return "unknown road";
    case ErrorCode::BadFormat: return "bad format";
    default: return "service error";
  }
}

Response handle_bus(const Query& q, const Snapshot& snap, std::optional<GeoPoint> device) {
  const auto& city = *snap.city;
  GeoPoint source = city.center;
  bool approximate = false;
  if (const auto* name = std::get_if<std::string>(&q.source)) {
    if (const auto* place = city.find_place(*name)) {
      source = place->location;
    } else {
      approximate = true;
    }
  } else if (std::holds_alternative<DeviceLocation>(q.source)) {
    if (device) {
      source = *device;
    } else {
      approximate = true;
    }
  } else {
    source = std::get<GeoPoint>(q.source);
  }

  const auto results = buses_toward(source, q.destination, city.routes, snap.buses,
                                    [&snap](const std::string& road) {
                                      return snap.latest_percent(road);
                                    });
  const auto& best = results.front();
  return BusReply{best.bus_no, best.boarding_stop.name, best.distance_m, best.eta_s, approximate};
}

Response handle_traffic(const Query& q, const Snapshot& snap, std::optional<GeoPoint> device) {
  const auto& city = *snap.city;
  std::string from;
  if (const auto* name = std::get_if<std::string>(&q.source)) {
    from = *name;
  } else {
    GeoPoint p = city.center;
    if (const auto* g = std::get_if<GeoPoint>(&q.source)) p = *g;
    if (std::holds_alternative<DeviceLocation>(q.source) && device) p = *device;
    if (const auto* place = nearest_place(city, p)) from = place->name;
  }
  const auto* link = city.find_link(from, q.destination);
  if (!link) throw Error(ErrorCode::UnknownRoad, "no road mapped between those places");
  const auto it = snap.roads.find(link->road_id);
  if (it == snap.roads.end() || !it->second.latest()) {
    throw Error(ErrorCode::NoData, "no congestion data yet");
  }
  const auto& view = it->second;
  const double pct = view.latest()->percent;
  return TrafficReply{pct, view.trend ? view.trend->label : TrendLabel::Steady,
                      classify_status(pct)};
}

}  // namespace

std::optional<double> Snapshot::latest_percent(const std::string& road_id) const {
  const auto it = roads.find(road_id);
  if (it == roads.end() || !it->second.latest()) return std::nullopt;
  return it->second.latest()->percent;
}

Query parse_query(std::string_view body) {
  body = trim(body);
  const auto space = body.find_first_of(" \t");
  if (space == std::string_view::npos) bad_format("missing query fields");
  const auto keyword = body.substr(0, space);
  Query q;
  if (iequals(keyword, "BUS")) {
    q.kind = QueryKind::BusInfo;
  } else if (iequals(keyword, "TRAFFIC")) {
    q.kind = QueryKind::TrafficInfo;
  } else {
    bad_format("unknown keyword");
  }
  const auto rest = body.substr(space + 1);
  const auto semi = rest.find(';');
  if (semi == std::string_view::npos) bad_format("missing ';' between source and destination");
  if (rest.find(';', semi + 1) != std::string_view::npos) bad_format("too many ';'");
  const auto src = trim(rest.substr(0, semi));
  const auto dst = trim(rest.substr(semi + 1));
  if (src.empty() || dst.empty()) bad_format("empty source or destination");
  q.source = parse_source(src);
  q.destination = std::string(dst);
  return q;
}

Response handle_query(const Query& q, const Snapshot& snap, std::optional<GeoPoint> device) {
  try {
    return q.kind == QueryKind::BusInfo ? handle_bus(q, snap, device)
                                        : handle_traffic(q, snap, device);
  } catch (const Error& e) {
    return ErrorReply{std::string(message_for(e.code()))};
  }
}

std::string format_response(const Response& r) {
  std::string out;
  if (const auto* bus = std::get_if<BusReply>(&r)) {
    const auto dist = std::llround(bus->distance_m);
    const auto eta = std::llround(bus->eta_s);
    const std::string suffix = bus->approximate_source ? " | SRC approx" : "";
    auto render = [&](const std::string& no, const std::string& stop) {
      return fmt::format("BUS {} | STOP {} | DIST {}m | ETA {}s{}", no, stop, dist, eta, suffix);
    };
    std::string no = bus->bus_no;
    std::string stop = bus->stop_name;
    out = render(no, stop);
    if (out.size() > kSmsMaxChars) {
      const std::size_t fixed = render("", "").size();
      const std::size_t room = kSmsMaxChars - std::min(fixed, kSmsMaxChars);
      no = shorten(no, std::min(no.size(), room / 3));
      stop = shorten(stop, room - no.size());
      out = render(no, stop);
    }
  } else if (const auto* tr = std::get_if<TrafficReply>(&r)) {
    out = fmt::format("CONGESTION {:.1f}% | TREND {} | STATUS {}", tr->percent,
                      to_string(tr->trend), to_string(tr->status));
  } else {
    const auto& err = std::get<ErrorReply>(r);
    out = error_text(err.message);
    if (out.size() > kSmsMaxChars) {
      const std::size_t room = kSmsMaxChars - std::min(kSmsMaxChars, error_text("").size());
      out = error_text(shorten(err.message, room));
    }
  }
  if (out.size() > kSmsMaxChars) throw Error(ErrorCode::Overflow, "reply exceeds 160 characters");
  return out;
}

std::string respond(std::string_view body, const Snapshot& snap, std::optional<GeoPoint> device) {
  Response r;
  try {
    r = handle_query(parse_query(body), snap, device);
  } catch (const Error& e) {
    r = ErrorReply{std::string(message_for(e.code()))};
  }
  return format_response(r);
}

std::optional<SmsMessage> parse_request_line(std::string_view line) {
  line = trim(line);
  constexpr std::string_view kFrom = "FROM ";
  constexpr std::string_view kText = " TEXT ";
  if (line.substr(0, kFrom.size()) != kFrom) return std::nullopt;
  const auto text = line.find(kText, kFrom.size());
  if (text == std::string_view::npos) return std::nullopt;
  const auto number = trim(line.substr(kFrom.size(), text - kFrom.size()));
  if (number.empty() || number.find_first_of(" \t") != std::string_view::npos) return std::nullopt;
  return SmsMessage{std::string(number), {}, std::string(line.substr(text + kText.size()))};
}

std::string handle_line(std::string_view line, const Snapshot& snap) {
  const auto msg = parse_request_line(line);
  if (!msg) return "TO unknown TEXT " + format_response(ErrorReply{"bad request"});
  return "TO " + msg->from_number + " TEXT " + respond(msg->body, snap);
}

}  // namespace citits
