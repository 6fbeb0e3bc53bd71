#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "citits/datacenter.hpp"

namespace citits {

struct LiveOptions {
  double speed = 1.0;             // simulated seconds per wall-clock second; <= 0 runs flat out
  std::int64_t warmup_s = 0;      // simulated before the first snapshot is published
  std::optional<std::int64_t> duration_s;  // stop advancing after this much simulated time
};

// Writer thread driving a Datacenter and publishing a snapshot after every tick.
class LivePipeline {
 public:
  LivePipeline(std::shared_ptr<const CityModel> city, LiveOptions options);
  ~LivePipeline();

  LivePipeline(const LivePipeline&) = delete;
  LivePipeline& operator=(const LivePipeline&) = delete;

  void start();
  void stop();
  bool finished() const noexcept { return finished_.load(); }

  const SnapshotPublisher& publisher() const noexcept { return publisher_; }

 private:
  void loop();

  Datacenter dc_;
  LiveOptions options_;
  SnapshotPublisher publisher_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> finished_{false};
  std::thread writer_;
};

// Answers one protocol line per input line until EOF.
void serve_stream(std::istream& in, std::ostream& out, const SnapshotPublisher& pub);

// Listens on host:port and answers each client line by line until `stop`.
// Throws Io when the socket cannot be bound.
void serve_tcp(const std::string& host, int port, const SnapshotPublisher& pub,
               const std::atomic<bool>& stop);

}  // namespace citits
