#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "citits/congestion.hpp"
#include "citits/persist.hpp"
#include "citits/simulator.hpp"
#include "citits/snapshot.hpp"

namespace citits {

// Append-only per-road congestion series plus the day/hour history.
class SampleStore {
 public:
  // Throws NonMonotonicTimestamps unless the sample is newer than the road's tail.
  void append(CongestionSample s);

  const std::vector<CongestionSample>& series(const std::string& road_id) const;
  const CongestionSample* latest(const std::string& road_id) const;
  // Every sample in append order.
  const std::vector<CongestionSample>& log() const noexcept { return log_; }

  HistoricalModel& history() noexcept { return history_; }
  const HistoricalModel& history() const noexcept { return history_; }

 private:
  std::map<std::string, std::vector<CongestionSample>> series_;
  std::vector<CongestionSample> log_;
  HistoricalModel history_;
};

Snapshot make_snapshot(std::shared_ptr<const CityConfig> city, const SampleStore& store,
                       std::vector<Bus> buses, std::vector<SignalPlan> plans,
                       std::int64_t clock_s);

struct FrameSource {
  enum class Kind { Simulated, Ingest };
  Kind kind = Kind::Simulated;
  std::filesystem::path ingest_dir;  // <dir>/<road>/<timestamp>.ppm
};

struct PipelineStats {
  std::size_t samples = 0;
  std::size_t fixes = 0;
  std::size_t replans = 0;
  std::size_t skipped_frames = 0;
};

using FrameSink =
    std::function<void(const std::string& road_id, std::int64_t timestamp_s, const Raster& frame)>;
using LogSink = std::function<void(const std::string& line)>;

// The autonomous pipeline: one writer advancing the simulator (or ingesting
// frames), measuring congestion, retiming signals and tracking buses.
class Datacenter {
 public:
  explicit Datacenter(std::shared_ptr<const CityModel> city, FrameSource source = {});

  // Advances by dt seconds; dt must divide every capture and GPS interval.
  void tick(std::int64_t dt_s);
  void run(std::int64_t duration_s, std::int64_t dt_s = 1);

  Snapshot snapshot() const;

  const CityModel& city() const noexcept { return *city_; }
  std::int64_t clock() const noexcept { return sim_.clock_s; }
  const SimState& sim() const noexcept { return sim_; }
  const SampleStore& samples() const noexcept { return store_; }
  const std::vector<FixRecord>& fixes() const noexcept { return fixes_; }
  const std::vector<Bus>& tracked_buses() const noexcept { return tracked_; }
  std::vector<SignalPlan> plans() const;
  const PipelineStats& stats() const noexcept { return stats_; }

  void set_frame_sink(FrameSink sink) { frame_sink_ = std::move(sink); }
  void set_log_sink(LogSink sink) { log_sink_ = std::move(sink); }

 private:
  void replan_junction(std::size_t j);
  void capture(const std::vector<std::size_t>& roads);
  void log(const std::string& line) const;

  std::shared_ptr<const CityModel> city_;
  FrameSource source_;
  SimState sim_;
  SampleStore store_;
  std::vector<FixRecord> fixes_;
  std::vector<Bus> tracked_;
  PipelineStats stats_;
  FrameSink frame_sink_;
  LogSink log_sink_;
};

// Latest-snapshot slot shared between the writer and any number of readers.
class SnapshotPublisher {
 public:
  void publish(Snapshot s);
  std::shared_ptr<const Snapshot> current() const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
};

// Output directory: frames/, samples.csv, fixes.csv, plans.csv, history.csv,
// routes.csv, city.yaml, report.txt.
void write_state_dir(const std::filesystem::path& dir, const Datacenter& dc,
                     const std::string& config_text);

struct LoadedState {
  std::shared_ptr<const CityConfig> city;
  SampleStore store;
  std::vector<Bus> buses;
  std::vector<SignalPlan> plans;
  std::int64_t clock_s = 0;

  Snapshot snapshot() const;
};

LoadedState load_state_dir(const std::filesystem::path& dir);

std::string render_report(const LoadedState& state);

// Virtual map of every road that has map coordinates, at its latest percent.
Raster render_state_map(const Snapshot& snap);

}  // namespace citits
