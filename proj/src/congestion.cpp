#include "citits/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "citits/error.hpp"
#include "citits/kernels.hpp"

namespace citits {

void RoadProfile::validate() const {
  if (!roi_mask.same_dims(baseline)) {
    throw Error(ErrorCode::BadConfig, "road " + road_id + ": mask dimensions differ from baseline");
  }
  if (roi_mask.count() == 0) {
    throw Error(ErrorCode::BadConfig, "road " + road_id + ": mask has no road cells");
  }
  if (!(length_m > 0.0) || lanes < 1 || capture_interval_s <= 0 || tolerance < 0) {
    throw Error(ErrorCode::BadConfig, "road " + road_id + ": invalid geometry or interval");
  }
}

DiffOutcome diff_against_baseline(const RoadProfile& profile, const Raster& current) {
  if (!profile.baseline.same_dims(current) || !profile.roi_mask.same_dims(current)) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame for road " + profile.road_id + " does not match baseline dimensions");
  }
  DiffOutcome out{Raster(current.width(), current.height()), 0.0, 0, 0};
  const auto counts = kernels::diff_parallel(profile.baseline, current, profile.roi_mask,
                                             profile.tolerance, &out.processed);
  out.changed = counts.changed;
  out.masked = counts.masked;
  if (counts.masked == 0) {
    throw Error(ErrorCode::BadConfig, "road " + profile.road_id + ": mask has no road cells");
  }
  out.percent = 100.0 * static_cast<double>(counts.changed) / static_cast<double>(counts.masked);
  return out;
}

double relative_change(const CongestionSample& previous, const CongestionSample& current) {
  if (previous.road_id != current.road_id) {
    throw Error(ErrorCode::RoadMismatch,
                "cannot compare samples of " + previous.road_id + " and " + current.road_id);
  }
  if (current.timestamp_s <= previous.timestamp_s) {
    throw Error(ErrorCode::NonMonotonicTimestamps, "samples are not in time order");
  }
  return current.percent - previous.percent;
}

std::string_view to_string(TrafficStatus s) {
  switch (s) {
    case TrafficStatus::Free: return "Free";
    case TrafficStatus::Moderate: return "Moderate";
    case TrafficStatus::Heavy: return "Heavy";
    case TrafficStatus::Jam: return "Jam";
  }
  return "Free";
}

TrafficStatus classify_status(double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw Error(ErrorCode::OutOfRange, "congestion percent outside [0,100]");
  }
  if (percent < 25.0) return TrafficStatus::Free;
  if (percent < 50.0) return TrafficStatus::Moderate;
  if (percent < 75.0) return TrafficStatus::Heavy;
  return TrafficStatus::Jam;
}

std::string_view to_string(TrendLabel t) {
  switch (t) {
    case TrendLabel::Rising: return "Rising";
    case TrendLabel::Steady: return "Steady";
    case TrendLabel::Falling: return "Falling";
  }
  return "Steady";
}

TrendLabel parse_trend_label(std::string_view text) {
  if (text == "Rising") return TrendLabel::Rising;
  if (text == "Steady") return TrendLabel::Steady;
  if (text == "Falling") return TrendLabel::Falling;
  throw Error(ErrorCode::BadFormat, "unknown trend label: " + std::string(text));
}

Trend5Min trend_last_5min(std::span<const CongestionSample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "trend needs at least two samples");
  }
  const std::int64_t t0 = samples.front().timestamp_s;
  const std::int64_t newest = samples.back().timestamp_s;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].timestamp_s <= samples[i - 1].timestamp_s) {
      throw Error(ErrorCode::NonMonotonicTimestamps, "trend samples are not strictly increasing");
    }
  }
  if (newest - t0 > kTrendWindowS) {
    throw Error(ErrorCode::OutOfRange, "trend samples span more than the 5-minute window");
  }

  const double n = static_cast<double>(samples.size());
  double mean_t = 0.0;
  double mean_p = 0.0;
  for (const auto& s : samples) {
    mean_t += static_cast<double>(s.timestamp_s - t0) / 60.0;
    mean_p += s.percent;
  }
  mean_t /= n;
  mean_p /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& s : samples) {
    const double dt = static_cast<double>(s.timestamp_s - t0) / 60.0 - mean_t;
    sxy += dt * (s.percent - mean_p);
    sxx += dt * dt;
  }
  Trend5Min trend;
  trend.slope_pct_per_min = sxy / sxx;
  if (trend.slope_pct_per_min > kTrendThresholdPctPerMin) {
    trend.label = TrendLabel::Rising;
  } else if (trend.slope_pct_per_min < -kTrendThresholdPctPerMin) {
    trend.label = TrendLabel::Falling;
  } else {
    trend.label = TrendLabel::Steady;
  }
  return trend;
}

std::span<const CongestionSample> trend_window(std::span<const CongestionSample> series) {
  if (series.empty()) return series;
  const std::int64_t newest = series.back().timestamp_s;
  std::size_t first = series.size() - 1;
  while (first > 0 && newest - series[first - 1].timestamp_s <= kTrendWindowS) --first;
  return series.subspan(first);
}

CalendarSlot calendar_slot(std::int64_t timestamp_s) {
  constexpr std::int64_t kDay = 86'400;
  std::int64_t days = timestamp_s / kDay;
  std::int64_t secs = timestamp_s % kDay;
  if (secs < 0) {
    secs += kDay;
    --days;
  }
  // 1970-01-01 was a Thursday.
  const std::int64_t dow = ((days + 3) % 7 + 7) % 7;
  return {static_cast<int>(dow), static_cast<int>(secs / 3600)};
}

namespace {

std::size_t slot_index(int day_of_week, int hour) {
  if (day_of_week < 0 || day_of_week >= HistoricalModel::kDays || hour < 0 ||
      hour >= HistoricalModel::kHours) {
    throw Error(ErrorCode::OutOfRange, "history bucket index out of range");
  }
  return static_cast<std::size_t>(day_of_week) * HistoricalModel::kHours +
         static_cast<std::size_t>(hour);
}

}  // namespace

void HistoricalModel::update(const CongestionSample& sample, int day_of_week, int hour) {
  auto& b = roads_[sample.road_id][slot_index(day_of_week, hour)];
  ++b.count;
  b.mean_percent += (sample.percent - b.mean_percent) / static_cast<double>(b.count);
}

double HistoricalModel::predict(const std::string& road_id, int day_of_week, int hour) const {
  const auto& b = bucket(road_id, day_of_week, hour);
  if (b.count == 0) {
    throw Error(ErrorCode::NoData, "no history for road " + road_id + " in that hour");
  }
  return b.mean_percent;
}

const HistoryBucket& HistoricalModel::bucket(const std::string& road_id, int day_of_week,
                                             int hour) const {
  static const HistoryBucket kEmpty{};
  const auto idx = slot_index(day_of_week, hour);
  const auto it = roads_.find(road_id);
  return it == roads_.end() ? kEmpty : it->second[idx];
}

void HistoricalModel::set_bucket(const std::string& road_id, int day_of_week, int hour,
                                 HistoryBucket b) {
  roads_[road_id][slot_index(day_of_week, hour)] = b;
}

Rgb status_color(TrafficStatus s) {
  switch (s) {
    case TrafficStatus::Free: return {0, 200, 0};
    case TrafficStatus::Moderate: return {230, 200, 0};
    case TrafficStatus::Heavy: return {255, 140, 0};
    case TrafficStatus::Jam: return {255, 0, 0};
  }
  return {0, 200, 0};
}

std::vector<MapPoint> rasterize_polyline(std::span<const MapPoint> polyline) {
  std::vector<MapPoint> out;
  auto emit = [&out](int x, int y) {
    if (out.empty() || out.back().x != x || out.back().y != y) out.push_back({x, y});
  };
  if (polyline.size() == 1) emit(polyline[0].x, polyline[0].y);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    int x0 = polyline[i - 1].x;
    int y0 = polyline[i - 1].y;
    const int x1 = polyline[i].x;
    const int y1 = polyline[i].y;
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      emit(x0, y0);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  return out;
}

Raster render_virtual_map(std::span<const MapRoad> roads, int width, int height) {
  if (roads.empty()) throw Error(ErrorCode::EmptyRoadList, "virtual map needs at least one road");
  Raster canvas(width, height, kWhite);
  for (const auto& road : roads) {
    if (road.polyline.empty()) throw Error(ErrorCode::BadFormat, "road polyline is empty");
    for (const auto& p : road.polyline) {
      if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
        throw Error(ErrorCode::OutOfRange, "road polyline leaves the canvas");
      }
    }
    const Rgb color = status_color(classify_status(road.percent));
    for (const auto& p : rasterize_polyline(road.polyline)) {
      for (int oy = -1; oy <= 1; ++oy) {
        for (int ox = -1; ox <= 1; ++ox) {
          const int x = p.x + ox;
          const int y = p.y + oy;
          if (x >= 0 && y >= 0 && x < width && y < height) canvas.at(x, y) = color;
        }
      }
    }
  }
  return canvas;
}

}  // namespace citits
