#include "citits/signalctl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "citits/error.hpp"

namespace citits {

double priority_score(const Approach& a, double junction_max_geom, const PriorityWeights& w) {
  if (!(junction_max_geom > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "junction geometry must be positive");
  }
  double congestion = a.latest_percent;
  if (a.historical_percent) {
    congestion = (1.0 - w.history_blend) * congestion + w.history_blend * *a.historical_percent;
  }
  double trend_term = 0.5;
  if (a.trend_label == TrendLabel::Rising) trend_term = 1.0;
  if (a.trend_label == TrendLabel::Falling) trend_term = 0.0;
  const double geom = a.length_m * static_cast<double>(a.lanes) / junction_max_geom;
  return w.congestion * (congestion / 100.0) + w.trend * trend_term + w.geometry * geom;
}

void SignalPlan::validate() const {
  if (greens.size() < 2) throw Error(ErrorCode::BadConfig, junction_id + ": needs >= 2 approaches");
  const auto& t = timing;
  if (t.min_green_s < 0 || t.max_green_s < t.min_green_s || t.max_delta_s <= 0 ||
      t.lost_time_s < 0) {
    throw Error(ErrorCode::BadConfig, junction_id + ": inconsistent timing bounds");
  }
  std::int64_t sum = 0;
  for (const auto& [road, g] : greens) {
    if (g < t.min_green_s || g > t.max_green_s) {
      throw Error(ErrorCode::BadConfig, junction_id + ": green of " + road + " out of bounds");
    }
    sum += g;
  }
  if (sum != green_budget()) {
    throw Error(ErrorCode::BadConfig, junction_id + ": greens do not fill the cycle");
  }
}

SignalPlan equal_plan(const std::string& junction_id, std::span<const std::string> road_ids,
                      const SignalTiming& timing) {
  SignalPlan plan{junction_id, {}, timing};
  for (const auto& r : road_ids) plan.greens[r] = 0;
  if (plan.greens.size() != road_ids.size() || plan.greens.size() < 2) {
    throw Error(ErrorCode::BadConfig, junction_id + ": needs >= 2 distinct approaches");
  }
  const std::int64_t budget = plan.green_budget();
  const auto n = plan.phases();
  std::int64_t extra = budget - (budget / n) * n;
  for (auto& [road, g] : plan.greens) {
    g = budget / n + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
  }
  plan.validate();
  return plan;
}

namespace {

void check_scores(const SignalPlan& plan, const std::map<std::string, double>& scores) {
  if (scores.size() != plan.greens.size()) {
    throw Error(ErrorCode::ScoreSetMismatch, plan.junction_id + ": score set mismatch");
  }
  for (const auto& [road, s] : scores) {
    if (!plan.greens.contains(road)) {
      throw Error(ErrorCode::ScoreSetMismatch, plan.junction_id + ": no approach " + road);
    }
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::OutOfRange, plan.junction_id + ": scores must be finite and >= 0");
    }
  }
}

}  // namespace

std::map<std::string, std::int64_t> clamped_targets(const SignalPlan& plan,
                                                    const std::map<std::string, double>& scores) {
  check_scores(plan, scores);
  const auto& t = plan.timing;
  const double budget = static_cast<double>(plan.green_budget());
  const double lo = static_cast<double>(t.min_green_s);
  const double hi = static_cast<double>(t.max_green_s);
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0,
                                       [](double acc, const auto& kv) { return acc + kv.second; });

  std::vector<std::string> roads;
  std::vector<double> raw;
  for (const auto& [road, s] : scores) {
    roads.push_back(road);
    raw.push_back(total > 0.0 ? budget * s / total : budget / static_cast<double>(scores.size()));
  }

  // Shift all targets by a common offset so the clamped sum hits the budget.
  auto clamped_sum = [&](double shift) {
    double sum = 0.0;
    for (double v : raw) sum += std::clamp(v + shift, lo, hi);
    return sum;
  };
  double a = -budget - hi;
  double b = budget + hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    (clamped_sum(mid) < budget ? a : b) = mid;
  }
  std::vector<double> real(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) real[i] = std::clamp(raw[i] + b, lo, hi);

  // Largest-remainder rounding; bounds are integral so floors stay in range.
  std::vector<std::int64_t> whole(real.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    whole[i] = static_cast<std::int64_t>(std::floor(real[i] + 1e-9));
    whole[i] = std::clamp(whole[i], t.min_green_s, t.max_green_s);
    assigned += whole[i];
  }
  std::vector<std::size_t> idx(real.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const double rx = real[x] - static_cast<double>(whole[x]);
    const double ry = real[y] - static_cast<double>(whole[y]);
    if (rx != ry) return rx > ry;
    return scores.at(roads[x]) > scores.at(roads[y]);
  });
  std::int64_t left = plan.green_budget() - assigned;
  for (std::size_t k = 0; left != 0; k = (k + 1) % idx.size()) {
    const auto i = idx[k];
    if (left > 0 && whole[i] < t.max_green_s) {
      ++whole[i];
      --left;
    } else if (left < 0 && whole[i] > t.min_green_s) {
      --whole[i];
      ++left;
    }
  }

  std::map<std::string, std::int64_t> out;
  for (std::size_t i = 0; i < roads.size(); ++i) out[roads[i]] = whole[i];
  return out;
}

SignalPlan replan(const SignalPlan& plan, const std::map<std::string, double>& scores) {
  plan.validate();
  const auto targets = clamped_targets(plan, scores);
  const std::int64_t d = plan.timing.max_delta_s;

  // Paced moves: with K = ceil(max gap / max_delta_s) replans left, every
  // green covers gap/K of its remaining distance, so all approaches arrive
  // together and no move exceeds max_delta_s. Gaps sum to zero, so the
  // integer parts plus one unit for the largest remainders conserve the
  // budget exactly.
  struct Move {
    std::string road;
    std::int64_t whole;
    std::int64_t rem;  // numerator of the fractional part, in [0, K)
    double score;
  };
  std::int64_t max_gap = 0;
  for (const auto& [road, g] : plan.greens) max_gap = std::max(max_gap, std::abs(targets.at(road) - g));
  if (max_gap == 0) return plan;
  const std::int64_t k = (max_gap + d - 1) / d;

  std::vector<Move> moves;
  std::int64_t sum = 0;
  for (const auto& [road, g] : plan.greens) {
    const std::int64_t gap = targets.at(road) - g;
    std::int64_t q = gap / k;
    std::int64_t r = gap % k;
    if (r < 0) {
      r += k;
      --q;
    }
    moves.push_back({road, q, r, scores.at(road)});
    sum += q;
  }
  std::vector<std::size_t> order(moves.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (moves[x].rem != moves[y].rem) return moves[x].rem > moves[y].rem;
    return moves[x].score > moves[y].score;
  });
  // Units still owed; only moves with a nonzero remainder may round up.
  std::int64_t units = -sum;
  for (std::size_t i = 0; i < order.size() && units > 0; ++i) {
    auto& m = moves[order[i]];
    if (m.rem == 0) break;
    ++m.whole;
    --units;
  }
  if (units != 0) {
    throw Error(ErrorCode::BadConfig, plan.junction_id + ": plan cannot conserve its budget");
  }

  SignalPlan next = plan;
  for (const auto& m : moves) next.greens.at(m.road) += m.whole;
  return next;
}

bool JunctionState::is_green(const std::string& road_id) const {
  if (road_id != active_phase) return false;
  return phase_elapsed_s < plan.greens.at(active_phase);
}

JunctionState start_junction(SignalPlan plan) {
  plan.validate();
  JunctionState s;
  s.active_phase = plan.greens.begin()->first;
  s.plan = std::move(plan);
  return s;
}

TickResult tick(const JunctionState& state, std::int64_t dt_s) {
  if (dt_s <= 0) throw Error(ErrorCode::OutOfRange, "tick needs a positive step");
  TickResult out{state, 0};
  auto& s = out.state;
  s.phase_elapsed_s += dt_s;
  for (;;) {
    const std::int64_t dwell = s.plan.greens.at(s.active_phase) + s.plan.timing.lost_time_s;
    if (s.phase_elapsed_s < dwell) break;
    s.phase_elapsed_s -= dwell;
    auto it = std::next(s.plan.greens.find(s.active_phase));
    if (it == s.plan.greens.end()) {
      it = s.plan.greens.begin();
      ++out.cycles_completed;
    }
    s.active_phase = it->first;
  }
  return out;
}

}  // namespace citits
