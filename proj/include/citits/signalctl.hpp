#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citits/congestion.hpp"

namespace citits {

struct Approach {
  std::string road_id;
  double length_m = 0.0;
  int lanes = 1;
  double latest_percent = 0.0;
  TrendLabel trend_label = TrendLabel::Steady;
  std::optional<double> historical_percent;
};

struct PriorityWeights {
  double congestion = 0.6;
  double trend = 0.2;
  double geometry = 0.2;
  double history_blend = 0.2;  // share of historical percent blended into latest
};

// Weighted blend of congestion, trend and road size (length x lanes relative
// to the junction's largest approach). Result lies in [0,1].
double priority_score(const Approach& a, double junction_max_geom,
                      const PriorityWeights& w = {});

struct SignalTiming {
  std::int64_t cycle_s = 120;
  std::int64_t lost_time_s = 5;
  std::int64_t min_green_s = 10;
  std::int64_t max_green_s = 90;
  std::int64_t max_delta_s = 5;
};

struct SignalPlan {
  std::string junction_id;
  std::map<std::string, std::int64_t> greens;  // phase order = key order
  SignalTiming timing;

  std::int64_t phases() const noexcept { return static_cast<std::int64_t>(greens.size()); }
  std::int64_t green_budget() const noexcept {
    return timing.cycle_s - phases() * timing.lost_time_s;
  }
  // Throws BadConfig unless the budget and bounds invariants hold.
  void validate() const;

  friend bool operator==(const SignalPlan& a, const SignalPlan& b) {
    return a.junction_id == b.junction_id && a.greens == b.greens &&
           a.timing.cycle_s == b.timing.cycle_s && a.timing.lost_time_s == b.timing.lost_time_s &&
           a.timing.min_green_s == b.timing.min_green_s &&
           a.timing.max_green_s == b.timing.max_green_s &&
           a.timing.max_delta_s == b.timing.max_delta_s;
  }
};

// Even split of the green budget; leftover seconds go to the first roads.
SignalPlan equal_plan(const std::string& junction_id, std::span<const std::string> road_ids,
                      const SignalTiming& timing);

// Integer green targets proportional to the scores, projected onto the
// budget and the per-phase bounds. This is the fixed point replan converges to.
std::map<std::string, std::int64_t> clamped_targets(const SignalPlan& plan,
                                                    const std::map<std::string, double>& scores);

// One gradual step toward clamped_targets: every green moves by at most
// max_delta_s and the budget is conserved exactly.
SignalPlan replan(const SignalPlan& plan, const std::map<std::string, double>& scores);

struct JunctionState {
  SignalPlan plan;
  std::string active_phase;
  std::int64_t phase_elapsed_s = 0;

  bool is_green(const std::string& road_id) const;
};

JunctionState start_junction(SignalPlan plan);

struct TickResult {
  JunctionState state;
  int cycles_completed = 0;
};

TickResult tick(const JunctionState& state, std::int64_t dt_s);

}  // namespace citits
