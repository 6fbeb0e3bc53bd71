#include "citits/datacenter.hpp"

#include <algorithm>
#include <exception>
#include <optional>

#include "citits/error.hpp"

namespace citits {

void SampleStore::append(CongestionSample s) {
  auto& series = series_[s.road_id];
  if (!series.empty() && s.timestamp_s <= series.back().timestamp_s) {
    throw Error(ErrorCode::NonMonotonicTimestamps,
                "sample for " + s.road_id + " is not newer than the stored tail");
  }
  series.push_back(s);
  log_.push_back(std::move(s));
}

const std::vector<CongestionSample>& SampleStore::series(const std::string& road_id) const {
  static const std::vector<CongestionSample> kEmpty;
  const auto it = series_.find(road_id);
  return it == series_.end() ? kEmpty : it->second;
}

const CongestionSample* SampleStore::latest(const std::string& road_id) const {
  const auto& s = series(road_id);
  return s.empty() ? nullptr : &s.back();
}

Snapshot make_snapshot(std::shared_ptr<const CityConfig> city, const SampleStore& store,
                       std::vector<Bus> buses, std::vector<SignalPlan> plans,
                       std::int64_t clock_s) {
  Snapshot snap;
  snap.clock_s = clock_s;
  for (const auto& road : city->roads) {
    const auto& series = store.series(road.id);
    RoadView view;
    view.total_samples = series.size();
    const auto window = trend_window(series);
    view.recent.assign(window.begin(), window.end());
    if (view.recent.size() >= 2) view.trend = trend_last_5min(view.recent);
    snap.roads.emplace(road.id, std::move(view));
  }
  snap.city = std::move(city);
  snap.buses = std::move(buses);
  snap.plans = std::move(plans);
  return snap;
}

namespace {

std::uint64_t frame_seed(std::uint64_t seed, std::size_t road, std::int64_t ts) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (road + 1)) ^ static_cast<std::uint64_t>(ts);
  x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdULL;
  x = (x ^ (x >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return x ^ (x >> 33);
}

}  // namespace

Datacenter::Datacenter(std::shared_ptr<const CityModel> city, FrameSource source)
    : city_(std::move(city)), source_(std::move(source)), sim_(initial_state(*city_)) {
  tracked_ = sim_.buses;
}

void Datacenter::log(const std::string& line) const {
  if (log_sink_) log_sink_(line);
}

std::vector<SignalPlan> Datacenter::plans() const {
  std::vector<SignalPlan> out;
  out.reserve(sim_.junctions.size());
  for (const auto& j : sim_.junctions) out.push_back(j.plan);
  return out;
}

Snapshot Datacenter::snapshot() const {
  return make_snapshot(city_->config, store_, tracked_, plans(), sim_.clock_s);
}

void Datacenter::replan_junction(std::size_t j) {
  const auto& cfg = *city_->config;
  const auto& jc = cfg.junctions[j];
  const auto slot = calendar_slot(sim_.clock_s);

  std::vector<Approach> approaches;
  double max_geom = 0.0;
  for (const auto& rid : jc.roads) {
    const auto& road = city_->roads[city_->road_index(rid)];
    Approach a;
    a.road_id = rid;
    a.length_m = road.profile.length_m;
    a.lanes = road.profile.lanes;
    const auto& series = store_.series(rid);
    if (!series.empty()) a.latest_percent = series.back().percent;
    const auto window = trend_window(series);
    if (window.size() >= 2) a.trend_label = trend_last_5min(window).label;
    const auto& bucket = store_.history().bucket(rid, slot.day_of_week, slot.hour);
    if (bucket.count > 0) a.historical_percent = bucket.mean_percent;
    max_geom = std::max(max_geom, a.length_m * a.lanes);
    approaches.push_back(std::move(a));
  }
  std::map<std::string, double> scores;
  for (const auto& a : approaches) scores[a.road_id] = priority_score(a, max_geom, cfg.weights);
  auto& state = sim_.junctions[j];
  state.plan = replan(state.plan, scores);
  ++stats_.replans;
}

void Datacenter::capture(const std::vector<std::size_t>& roads) {
  const auto& cfg = *city_->config;
  const std::int64_t ts = sim_.clock_s;
  struct Measured {
    std::optional<Raster> frame;
    std::optional<double> percent;
    std::string problem;
  };
  std::vector<Measured> results(roads.size());
  const long n = static_cast<long>(roads.size());

#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const auto i = roads[static_cast<std::size_t>(k)];
    const auto& road = city_->roads[i];
    auto& out = results[static_cast<std::size_t>(k)];
    try {
      if (source_.kind == FrameSource::Kind::Simulated) {
        out.frame = synthesize_frame(road, sim_.roads[i].queue, frame_seed(cfg.seed, i, ts),
                                     cfg.frame_noise);
      } else {
        const auto path = source_.ingest_dir / road.profile.road_id / (std::to_string(ts) + ".ppm");
        if (!std::filesystem::exists(path)) {
          throw Error(ErrorCode::IngestMissingFrame, "missing frame " + path.string());
        }
        out.frame = read_ppm(path);
      }
      out.percent = diff_against_baseline(road.profile, *out.frame).percent;
    } catch (const std::exception& e) {
      out.problem = e.what();
    }
  }

  for (std::size_t k = 0; k < roads.size(); ++k) {
    const auto& road = city_->roads[roads[k]];
    auto& m = results[k];
    if (!m.percent) {
      ++stats_.skipped_frames;
      log("skip " + road.profile.road_id + " @" + std::to_string(ts) + ": " + m.problem);
      continue;
    }
    CongestionSample s{road.profile.road_id, ts, *m.percent, std::nullopt};
    if (const auto* prev = store_.latest(s.road_id)) s.relative_delta_pct = relative_change(*prev, s);
    const auto slot = calendar_slot(ts);
    store_.history().update(s, slot.day_of_week, slot.hour);
    store_.append(std::move(s));
    ++stats_.samples;
    if (frame_sink_ && source_.kind == FrameSource::Kind::Simulated) {
      frame_sink_(road.profile.road_id, ts, *m.frame);
    }
  }
}

void Datacenter::tick(std::int64_t dt_s) {
  const auto& cfg = *city_->config;
  if (dt_s <= 0 || cfg.gps_interval_s % dt_s != 0) {
    throw Error(ErrorCode::OutOfRange, "tick must divide the GPS interval");
  }
  for (const auto& r : city_->roads) {
    if (r.profile.capture_interval_s % dt_s != 0) {
      throw Error(ErrorCode::OutOfRange, "tick must divide every capture interval");
    }
  }

  const auto report = step(*city_, sim_, dt_s);
  for (std::size_t j = 0; j < report.cycles_completed.size(); ++j) {
    if (report.cycles_completed[j] > 0) replan_junction(j);
  }

  for (auto& fx : advance_buses(*city_, sim_, dt_s)) {
    auto it = std::find_if(tracked_.begin(), tracked_.end(),
                           [&](const Bus& b) { return b.bus_no == fx.bus_no; });
    const Route* route = cfg.find_route(it->route_id);
    *it = update_fix(*it, *route, fx.fix);
    fixes_.push_back(std::move(fx));
    ++stats_.fixes;
  }

  std::vector<std::size_t> due;
  const std::int64_t elapsed = sim_.clock_s - cfg.start_epoch_s;
  for (std::size_t i = 0; i < city_->roads.size(); ++i) {
    if (elapsed % city_->roads[i].profile.capture_interval_s == 0) due.push_back(i);
  }
  if (!due.empty()) capture(due);
}

void Datacenter::run(std::int64_t duration_s, std::int64_t dt_s) {
  if (duration_s < 0 || dt_s <= 0 || duration_s % dt_s != 0) {
    throw Error(ErrorCode::OutOfRange, "duration must be a non-negative multiple of the step");
  }
  for (std::int64_t t = 0; t < duration_s; t += dt_s) tick(dt_s);
}

void SnapshotPublisher::publish(Snapshot s) {
  auto next = std::make_shared<const Snapshot>(std::move(s));
  std::lock_guard lock(mu_);
  current_ = std::move(next);
}

std::shared_ptr<const Snapshot> SnapshotPublisher::current() const {
  std::lock_guard lock(mu_);
  return current_;
}

}  // namespace citits
