#include "citits/persist.hpp"

#include <map>

#include "citits/csv.hpp"
#include "citits/error.hpp"

namespace citits {

namespace {

const std::vector<std::string> kSamplesHeader{"road_id", "timestamp_s", "percent",
                                              "relative_delta_pct"};
const std::vector<std::string> kFixesHeader{"bus_no", "timestamp_s", "lat", "lon"};
const std::vector<std::string> kPlansHeader{"junction_id", "road_id", "green_s", "cycle_s"};
const std::vector<std::string> kHistoryHeader{"road_id", "day_of_week", "hour", "count",
                                              "mean_percent"};
const std::vector<std::string> kRoutesHeader{"route_id", "seq",  "stop_id", "stop_name",
                                             "lat",      "lon",  "offset_s"};

// Field accessors that turn parse failures into CorruptRecord.
struct Fields {
  const std::vector<std::string>& f;
  const std::string& file;
  std::size_t line;

  const std::string& text(std::size_t i, bool allow_empty = false) const {
    if (!allow_empty && f[i].empty()) throw CorruptRecord(file, line, "empty field " + std::to_string(i + 1));
    return f[i];
  }
  double real(std::size_t i) const {
    auto v = csv::parse_double(f[i]);
    if (!v) throw CorruptRecord(file, line, "bad number '" + f[i] + "'");
    return *v;
  }
  std::int64_t integer(std::size_t i) const {
    auto v = csv::parse_int(f[i]);
    if (!v) throw CorruptRecord(file, line, "bad integer '" + f[i] + "'");
    return *v;
  }
  std::uint64_t count(std::size_t i) const {
    auto v = csv::parse_uint(f[i]);
    if (!v) throw CorruptRecord(file, line, "bad count '" + f[i] + "'");
    return *v;
  }
};

std::string name_of(const std::filesystem::path& p) { return p.filename().string(); }

}  // namespace

void write_samples_csv(const std::filesystem::path& path,
                       const std::vector<CongestionSample>& samples) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    rows.push_back({s.road_id, std::to_string(s.timestamp_s), csv::format_double(s.percent),
                    s.relative_delta_pct ? csv::format_double(*s.relative_delta_pct) : ""});
  }
  csv::write_file(path, kSamplesHeader, rows);
}

std::vector<CongestionSample> read_samples_csv(const std::filesystem::path& path) {
  std::vector<CongestionSample> out;
  const auto file = name_of(path);
  csv::read_file(path, kSamplesHeader, [&](const auto& f, std::size_t line) {
    Fields r{f, file, line};
    CongestionSample s{r.text(0), r.integer(1), r.real(2), std::nullopt};
    if (!(s.percent >= 0.0 && s.percent <= 100.0)) throw CorruptRecord(file, line, "percent out of range");
    if (!f[3].empty()) s.relative_delta_pct = r.real(3);
    out.push_back(std::move(s));
  });
  return out;
}

void write_fixes_csv(const std::filesystem::path& path, const std::vector<FixRecord>& fixes) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(fixes.size());
  for (const auto& x : fixes) {
    rows.push_back({x.bus_no, std::to_string(x.fix.timestamp_s),
                    csv::format_double(x.fix.location.lat), csv::format_double(x.fix.location.lon)});
  }
  csv::write_file(path, kFixesHeader, rows);
}

std::vector<FixRecord> read_fixes_csv(const std::filesystem::path& path) {
  std::vector<FixRecord> out;
  const auto file = name_of(path);
  csv::read_file(path, kFixesHeader, [&](const auto& f, std::size_t line) {
    Fields r{f, file, line};
    FixRecord x{r.text(0), GpsFix{GeoPoint{r.real(2), r.real(3)}, r.integer(1)}};
    if (!x.fix.location.valid()) throw CorruptRecord(file, line, "coordinate out of range");
    out.push_back(std::move(x));
  });
  return out;
}

void write_plans_csv(const std::filesystem::path& path, const std::vector<SignalPlan>& plans) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : plans) {
    for (const auto& [road, g] : p.greens) {
      rows.push_back({p.junction_id, road, std::to_string(g), std::to_string(p.timing.cycle_s)});
    }
  }
  csv::write_file(path, kPlansHeader, rows);
}

std::vector<SignalPlan> read_plans_csv(const std::filesystem::path& path,
                                       const SignalTiming& timing) {
  std::vector<SignalPlan> out;
  std::map<std::string, std::size_t> index;
  const auto file = name_of(path);
  csv::read_file(path, kPlansHeader, [&](const auto& f, std::size_t line) {
    Fields r{f, file, line};
    const auto& jid = r.text(0);
    auto [it, fresh] = index.try_emplace(jid, out.size());
    if (fresh) {
      out.push_back(SignalPlan{jid, {}, timing});
      out.back().timing.cycle_s = r.integer(3);
    }
    auto& plan = out[it->second];
    if (plan.timing.cycle_s != r.integer(3)) throw CorruptRecord(file, line, "cycle differs within junction");
    if (!plan.greens.emplace(r.text(1), r.integer(2)).second) {
      throw CorruptRecord(file, line, "duplicate approach");
    }
  });
  return out;
}

void write_history_csv(const std::filesystem::path& path, const HistoricalModel& model) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [road, grid] : model.roads()) {
    for (int d = 0; d < HistoricalModel::kDays; ++d) {
      for (int h = 0; h < HistoricalModel::kHours; ++h) {
        const auto& b = grid[static_cast<std::size_t>(d * HistoricalModel::kHours + h)];
        if (b.count == 0) continue;
        rows.push_back({road, std::to_string(d), std::to_string(h), std::to_string(b.count),
                        csv::format_double(b.mean_percent)});
      }
    }
  }
  csv::write_file(path, kHistoryHeader, rows);
}

HistoricalModel read_history_csv(const std::filesystem::path& path) {
  HistoricalModel model;
  const auto file = name_of(path);
  csv::read_file(path, kHistoryHeader, [&](const auto& f, std::size_t line) {
    Fields r{f, file, line};
    const auto day = r.integer(1);
    const auto hour = r.integer(2);
    if (day < 0 || day >= HistoricalModel::kDays || hour < 0 || hour >= HistoricalModel::kHours) {
      throw CorruptRecord(file, line, "bucket index out of range");
    }
    HistoryBucket b{r.count(3), r.real(4)};
    if (b.count == 0) throw CorruptRecord(file, line, "empty bucket");
    model.set_bucket(r.text(0), static_cast<int>(day), static_cast<int>(hour), b);
  });
  return model;
}

void write_routes_csv(const std::filesystem::path& path, const std::vector<Route>& routes) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : routes) {
    for (std::size_t i = 0; i < r.stops().size(); ++i) {
      const auto& s = r.stops()[i];
      rows.push_back({r.id(), std::to_string(i + 1), s.stop.stop_id, s.stop.name,
                      csv::format_double(s.stop.location.lat),
                      csv::format_double(s.stop.location.lon),
                      std::to_string(s.scheduled_offset_s)});
    }
  }
  csv::write_file(path, kRoutesHeader, rows);
}

std::vector<Route> read_routes_csv(const std::filesystem::path& path) {
  // route_id -> seq -> stop, keeping first-appearance order of routes
  std::vector<std::string> order;
  std::map<std::string, std::map<std::int64_t, RouteStop>> stops;
  const auto file = name_of(path);
  csv::read_file(path, kRoutesHeader, [&](const auto& f, std::size_t line) {
    Fields r{f, file, line};
    const auto& rid = r.text(0);
    if (!stops.contains(rid)) order.push_back(rid);
    RouteStop rs{BusStop{r.text(2), r.text(3), GeoPoint{r.real(4), r.real(5)}}, r.integer(6)};
    if (!rs.stop.location.valid()) throw CorruptRecord(file, line, "coordinate out of range");
    if (!stops[rid].emplace(r.integer(1), std::move(rs)).second) {
      throw CorruptRecord(file, line, "duplicate sequence number");
    }
  });
  std::vector<Route> out;
  for (const auto& rid : order) {
    std::vector<RouteStop> list;
    for (auto& [seq, rs] : stops[rid]) list.push_back(rs);
    try {
      out.emplace_back(rid, std::move(list));
    } catch (const Error& e) {
      throw CorruptRecord(file, 0, e.what());
    }
  }
  return out;
}

}  // namespace citits
