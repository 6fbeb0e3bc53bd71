#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citits/raster.hpp"

namespace citits {

inline constexpr int kDefaultPixelTolerance = 10;
inline constexpr std::int64_t kTrendWindowS = 300;

struct RoadProfile {
  std::string road_id;
  Raster baseline;
  Mask roi_mask;
  double length_m = 0.0;
  int lanes = 1;
  std::int64_t capture_interval_s = 30;
  int tolerance = kDefaultPixelTolerance;

  // Throws BadConfig when the mask does not match the baseline or is empty.
  void validate() const;
};

struct DiffOutcome {
  Raster processed;  // pure white / pure red
  double percent = 0.0;
  std::size_t changed = 0;
  std::size_t masked = 0;
};

// Compares a captured frame against the empty-road baseline inside the ROI.
DiffOutcome diff_against_baseline(const RoadProfile& profile, const Raster& current);

struct CongestionSample {
  std::string road_id;
  std::int64_t timestamp_s = 0;
  double percent = 0.0;
  std::optional<double> relative_delta_pct;

  friend bool operator==(const CongestionSample&, const CongestionSample&) = default;
};

double relative_change(const CongestionSample& previous, const CongestionSample& current);

enum class TrafficStatus { Free, Moderate, Heavy, Jam };

std::string_view to_string(TrafficStatus s);
TrafficStatus classify_status(double percent);

enum class TrendLabel { Rising, Steady, Falling };

std::string_view to_string(TrendLabel t);
TrendLabel parse_trend_label(std::string_view text);

struct Trend5Min {
  double slope_pct_per_min = 0.0;
  TrendLabel label = TrendLabel::Steady;
};

inline constexpr double kTrendThresholdPctPerMin = 0.5;

// OLS slope of percent against minutes. Samples must be strictly increasing
// in time and lie within kTrendWindowS of the newest one.
Trend5Min trend_last_5min(std::span<const CongestionSample> samples);

// Suffix of a time-ordered series lying within kTrendWindowS of its last item.
std::span<const CongestionSample> trend_window(std::span<const CongestionSample> series);

// UTC calendar slot; day 0 is Monday.
struct CalendarSlot {
  int day_of_week = 0;
  int hour = 0;
};

CalendarSlot calendar_slot(std::int64_t timestamp_s);

struct HistoryBucket {
  std::uint64_t count = 0;
  double mean_percent = 0.0;

  friend bool operator==(const HistoryBucket&, const HistoryBucket&) = default;
};

// Running day-of-week x hour-of-day means per road.
class HistoricalModel {
 public:
  static constexpr int kDays = 7;
  static constexpr int kHours = 24;
  using Grid = std::array<HistoryBucket, kDays * kHours>;

  void update(const CongestionSample& sample, int day_of_week, int hour);
  double predict(const std::string& road_id, int day_of_week, int hour) const;

  const HistoryBucket& bucket(const std::string& road_id, int day_of_week, int hour) const;
  // Direct placement, used when reloading persisted history.
  void set_bucket(const std::string& road_id, int day_of_week, int hour, HistoryBucket b);

  const std::map<std::string, Grid>& roads() const noexcept { return roads_; }

  friend bool operator==(const HistoricalModel&, const HistoricalModel&) = default;

 private:
  std::map<std::string, Grid> roads_;
};

struct MapPoint {
  int x = 0;
  int y = 0;
};

struct MapRoad {
  std::vector<MapPoint> polyline;
  double percent = 0.0;
};

Rgb status_color(TrafficStatus s);

// Each road is a 3-pixel-wide polyline colored by its status on white.
Raster render_virtual_map(std::span<const MapRoad> roads, int width, int height);

// Pixels of a 1-pixel Bresenham polyline (consecutive duplicates removed).
std::vector<MapPoint> rasterize_polyline(std::span<const MapPoint> polyline);

}  // namespace citits
