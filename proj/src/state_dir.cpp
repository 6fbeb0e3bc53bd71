#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "citits/datacenter.hpp"
#include "citits/error.hpp"

namespace citits {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

std::string utc_string(std::int64_t ts) {
  // Civil-from-days (proleptic Gregorian).
  std::int64_t days = ts / 86'400;
  std::int64_t secs = ts % 86'400;
  if (secs < 0) {
    secs += 86'400;
    --days;
  }
  days += 719'468;
  const std::int64_t era = (days >= 0 ? days : days - 146'096) / 146'097;
  const std::int64_t doe = days - era * 146'097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36'524 - doe / 146'096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", y, m, d, secs / 3600, secs / 60 % 60,
                     secs % 60);
}

}  // namespace

void write_state_dir(const fs::path& dir, const Datacenter& dc, const std::string& config_text) {
  fs::create_directories(dir);
  write_text(dir / "city.yaml", config_text);
  write_routes_csv(dir / "routes.csv", dc.city().config->routes);
  write_samples_csv(dir / "samples.csv", dc.samples().log());
  write_fixes_csv(dir / "fixes.csv", dc.fixes());
  write_plans_csv(dir / "plans.csv", dc.plans());
  write_history_csv(dir / "history.csv", dc.samples().history());
  write_text(dir / "report.txt", render_report(load_state_dir(dir)));
}

Snapshot LoadedState::snapshot() const { return make_snapshot(city, store, buses, plans, clock_s); }

LoadedState load_state_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "no state directory at " + dir.string());
  LoadedState st;
  auto city = std::make_shared<CityConfig>(load_city_config(dir / "city.yaml"));
  st.clock_s = city->start_epoch_s;

  for (auto& s : read_samples_csv(dir / "samples.csv")) {
    st.clock_s = std::max(st.clock_s, s.timestamp_s);
    st.store.append(std::move(s));
  }
  st.store.history() = read_history_csv(dir / "history.csv");

  for (const auto& b : city->buses) {
    st.buses.push_back(Bus{b.bus_no, b.route_id, b.progress_m, std::nullopt, b.speed_mps});
  }
  for (const auto& fx : read_fixes_csv(dir / "fixes.csv")) {
    st.clock_s = std::max(st.clock_s, fx.fix.timestamp_s);
    auto it = std::find_if(st.buses.begin(), st.buses.end(),
                           [&](const Bus& b) { return b.bus_no == fx.bus_no; });
    if (it == st.buses.end()) continue;
    *it = update_fix(*it, *city->find_route(it->route_id), fx.fix);
  }
  st.plans = read_plans_csv(dir / "plans.csv", city->timing);
  st.city = std::move(city);
  return st;
}

std::string render_report(const LoadedState& state) {
  const auto snap = state.snapshot();
  std::ostringstream out;
  out << fmt::format("city {}\n", snap.city->name);
  out << fmt::format("clock_s {} ({})\n", snap.clock_s, utc_string(snap.clock_s));
  out << "roads\n";
  for (const auto& road : snap.city->roads) {
    const auto& series = state.store.series(road.id);
    const auto& view = snap.roads.at(road.id);
    if (series.empty()) {
      out << fmt::format("  {} samples 0\n", road.id);
      continue;
    }
    double sum = 0.0;
    double peak = 0.0;
    for (const auto& s : series) {
      sum += s.percent;
      peak = std::max(peak, s.percent);
    }
    const double latest = series.back().percent;
    out << fmt::format("  {} samples {} latest {:.1f}% status {} trend {} mean {:.1f}% peak {:.1f}%\n",
                       road.id, series.size(), latest, to_string(classify_status(latest)),
                       to_string(view.trend ? view.trend->label : TrendLabel::Steady),
                       sum / static_cast<double>(series.size()), peak);
  }
  out << "junctions\n";
  for (const auto& p : snap.plans) {
    out << fmt::format("  {} cycle {}s", p.junction_id, p.timing.cycle_s);
    for (const auto& [road, g] : p.greens) out << fmt::format(" {}={}s", road, g);
    out << '\n';
  }
  out << "buses\n";
  for (const auto& b : snap.buses) {
    out << fmt::format("  {} route {} progress {:.0f}m last_fix {}\n", b.bus_no, b.route_id,
                       b.progress_m, b.last_fix ? std::to_string(b.last_fix->timestamp_s) : "-");
  }
  return out.str();
}

Raster render_state_map(const Snapshot& snap) {
  std::vector<MapRoad> roads;
  for (const auto& r : snap.city->roads) {
    if (r.map.empty()) continue;
    roads.push_back({r.map, snap.latest_percent(r.id).value_or(0.0)});
  }
  return render_virtual_map(roads, snap.city->map_width, snap.city->map_height);
}

}  // namespace citits
