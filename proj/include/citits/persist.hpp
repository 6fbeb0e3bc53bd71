#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "citits/congestion.hpp"
#include "citits/signalctl.hpp"
#include "citits/transit.hpp"

namespace citits {

struct FixRecord {
  std::string bus_no;
  GpsFix fix;

  friend bool operator==(const FixRecord&, const FixRecord&) = default;
};

// samples.csv: road_id,timestamp_s,percent,relative_delta_pct
void write_samples_csv(const std::filesystem::path& path,
                       const std::vector<CongestionSample>& samples);
std::vector<CongestionSample> read_samples_csv(const std::filesystem::path& path);

// fixes.csv: bus_no,timestamp_s,lat,lon
void write_fixes_csv(const std::filesystem::path& path, const std::vector<FixRecord>& fixes);
std::vector<FixRecord> read_fixes_csv(const std::filesystem::path& path);

// plans.csv: junction_id,road_id,green_s,cycle_s. Timing bounds other than
// the cycle are not stored and come from `timing`.
void write_plans_csv(const std::filesystem::path& path, const std::vector<SignalPlan>& plans);
std::vector<SignalPlan> read_plans_csv(const std::filesystem::path& path,
                                       const SignalTiming& timing);

// history.csv: road_id,day_of_week,hour,count,mean_percent (non-empty buckets)
void write_history_csv(const std::filesystem::path& path, const HistoricalModel& model);
HistoricalModel read_history_csv(const std::filesystem::path& path);

// routes.csv: route_id,seq,stop_id,stop_name,lat,lon,offset_s
void write_routes_csv(const std::filesystem::path& path, const std::vector<Route>& routes);
// Polylines are rebuilt from the stops; leg roads are not part of the file.
std::vector<Route> read_routes_csv(const std::filesystem::path& path);

}  // namespace citits
