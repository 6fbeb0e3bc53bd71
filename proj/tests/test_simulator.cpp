#include <doctest.h>

#include <memory>

#include "citits/config.hpp"
#include "citits/congestion.hpp"
#include "citits/error.hpp"
#include "citits/simulator.hpp"
#include "support.hpp"

using namespace citits;

namespace {

// One junction with two roads; R1 starts red because R0 owns the first phase.
const char* kCity = R"(
city: {name: t, seed: 7, start_epoch_s: 1699833600, capture_interval_s: 30, gps_interval_s: 10}
roads:
  - {id: R0, length_m: 300, lanes: 2, image: {width: 48, height: 24, road_columns: [6, 42]}, arrivals_per_min: 0}
  - {id: R1, length_m: 375, lanes: 1, image: {width: 48, height: 24, road_columns: [6, 42]}, arrivals_per_min: 10}
junctions:
  - {id: J, roads: [R0, R1]}
routes:
  - id: L
    stops:
      - {id: A, name: A, lat: 18.5, lon: 73.8, offset_s: 0}
      - {id: B, name: B, lat: 18.51, lon: 73.8, offset_s: 100}
    legs: [R1]
buses:
  - {bus_no: "1", route: L, progress_m: 0, speed_mps: 10}
gazetteer: []
)";

std::shared_ptr<const CityModel> make_city(const std::string& text = kCity) {
  auto cfg = std::make_shared<const CityConfig>(parse_city_config(text, "."));
  return std::make_shared<const CityModel>(build_city(cfg));
}

void check_conservation(const SimState& s) {
  for (const auto& q : s.roads) {
    CHECK(q.queue >= 0);
    CHECK(q.entered == q.queue + q.departed);
  }
}

}  // namespace

TEST_CASE("dead road stays empty") {
  const auto city = make_city();
  auto s = initial_state(*city);
  for (int i = 0; i < 600; ++i) step(*city, s, 1);
  CHECK(s.roads[0].queue == 0);
  CHECK(s.roads[0].entered == 0);
}

TEST_CASE("10 vehicles per minute on red for 60 s adds 10") {
  const auto city = make_city();
  auto s = initial_state(*city);
  // R0 is green for its first 57 s; R1 stays red throughout.
  for (int i = 0; i < 60; ++i) {
    CHECK_FALSE(road_is_green(*city, s, 1));
    step(*city, s, 1);
  }
  CHECK(s.roads[1].queue == 10);
  CHECK(s.roads[1].departed == 0);
}

TEST_CASE("arrivals do not depend on the step size") {
  const auto city = make_city();
  auto a = initial_state(*city);
  auto b = initial_state(*city);
  for (int i = 0; i < 60; ++i) step(*city, a, 1);
  for (int i = 0; i < 6; ++i) step(*city, b, 10);
  CHECK(a.roads[1].entered == b.roads[1].entered);
}

TEST_CASE("green discharges at the saturation rate") {
  const auto city = make_city();
  auto s = initial_state(*city);
  for (int i = 0; i < 62; ++i) step(*city, s, 1);  // R1 turns green at 62 s
  CHECK(road_is_green(*city, s, 1));
  const auto q0 = s.roads[1].queue;
  const auto d0 = s.roads[1].departed;
  for (int i = 0; i < 10; ++i) step(*city, s, 1);
  // One lane at 0.5 veh/s for 10 s.
  CHECK(s.roads[1].departed - d0 == 5);
  CHECK(q0 >= 5);
  check_conservation(s);
}

TEST_CASE("conservation holds over mixed step sizes") {
  const auto city = make_city();
  auto s = initial_state(*city);
  for (int i = 0; i < 5000; ++i) {
    step(*city, s, 1 + i % 7);
    check_conservation(s);
  }
}

TEST_CASE("blob slots fill from the bottom row") {
  const auto city = make_city();
  const auto& road = city->roads[0];
  // 36 columns x 24 rows: 6 cells per row, 8 rows.
  CHECK(road.slots.size() == 48);
  CHECK(road.slots.front().x == 6);
  CHECK(road.slots.front().y == 21);
  CHECK(road.slots[6].y == 18);
}

TEST_CASE("frame with one vehicle changes exactly 18 masked pixels") {
  const auto city = make_city();
  const auto& road = city->roads[0];
  const auto empty = synthesize_frame(road, 0);
  CHECK(empty == road.profile.baseline);
  CHECK(diff_against_baseline(road.profile, empty).percent == 0.0);
  const auto one = diff_against_baseline(road.profile, synthesize_frame(road, 1));
  CHECK(one.changed == 18);
  CHECK(one.percent == doctest::Approx(1800.0 / static_cast<double>(road.profile.roi_mask.count())));
}

TEST_CASE("measured percent is nondecreasing in queue") {
  const auto city = make_city();
  const auto& road = city->roads[1];
  double last = -1.0;
  for (int q = 0; q <= 60; ++q) {
    const auto out = diff_against_baseline(road.profile, synthesize_frame(road, q, 99, 8));
    CHECK(out.percent >= last);
    last = out.percent;
  }
  CHECK(last == doctest::Approx(100.0));
}

TEST_CASE("noise within tolerance is invisible") {
  const auto city = make_city();
  const auto& road = city->roads[1];
  const auto noisy = synthesize_frame(road, 0, 1234, 10);
  CHECK_FALSE(noisy == road.profile.baseline);
  CHECK(diff_against_baseline(road.profile, noisy).percent == 0.0);
  CHECK(synthesize_frame(road, 3, 1234, 10) == synthesize_frame(road, 3, 1234, 10));
}

TEST_CASE("buses move at the congestion-adjusted speed") {
  const auto city = make_city();
  auto s = initial_state(*city);
  s.clock_s += 10;
  auto fixes = advance_buses(*city, s, 10);
  CHECK(s.buses[0].progress_m == doctest::Approx(100.0));
  REQUIRE(fixes.size() == 1);
  CHECK(fixes[0].fix.timestamp_s == s.clock_s);

  s.roads[1].queue = city->roads[1].capacity;
  s.clock_s += 10;
  advance_buses(*city, s, 10);
  CHECK(s.buses[0].progress_m == doctest::Approx(125.0));

  s.clock_s += 1;
  CHECK(advance_buses(*city, s, 1).empty());
}

TEST_CASE("bus wraps at the end of its route") {
  const auto city = make_city();
  auto s = initial_state(*city);
  const auto& route = *city->config->find_route("L");
  s.buses[0].progress_m = route.length_m() - 5.0;
  s.clock_s += 10;
  advance_buses(*city, s, 10);
  CHECK(s.buses[0].progress_m == 0.0);
}

TEST_CASE("ground truth congestion") {
  const auto city = make_city();
  auto s = initial_state(*city);
  CHECK(ground_truth_congestion(*city, s, "R1") == 0.0);
  CHECK(city->roads[1].capacity == 50);
  s.roads[1].queue = 25;
  CHECK(ground_truth_congestion(*city, s, "R1") == 50.0);
  s.roads[1].queue = 50;
  CHECK(ground_truth_congestion(*city, s, "R1") == 100.0);
  s.roads[1].queue = 80;
  CHECK(ground_truth_congestion(*city, s, "R1") == 100.0);
  CHECK_THROWS_AS(ground_truth_congestion(*city, s, "nope"), Error);
}

TEST_CASE("identical seeds give identical runs") {
  const auto city = make_city();
  auto a = initial_state(*city);
  auto b = initial_state(*city);
  for (int i = 0; i < 3600; ++i) {
    step(*city, a, 1);
    step(*city, b, 1);
  }
  CHECK(a.roads == b.roads);
  CHECK(a.clock_s == b.clock_s);
}

TEST_CASE("fixture city builds") {
  const auto cfg = std::make_shared<const CityConfig>(
      load_city_config(std::string(CITITS_FIXTURE_DIR) + "/city.yaml"));
  const auto city = build_city(cfg);
  CHECK(city.roads.size() == 4);
  CHECK(cfg->junctions.size() == 3);
  CHECK(cfg->routes.size() == 2);
  CHECK(cfg->buses.size() == 3);
  for (const auto& r : city.roads) CHECK(r.capacity >= 1);
}

TEST_CASE("config errors are reported") {
  CHECK_THROWS_AS(parse_city_config("roads: [", "."), Error);
  CHECK_THROWS_AS(parse_city_config(R"(
roads:
  - {id: R0, length_m: 300, lanes: 2, arrivals_per_min: 1}
junctions:
  - {id: J, roads: [R0, R9]}
)", "."), Error);
}
