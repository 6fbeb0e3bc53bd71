#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "citits/congestion.hpp"
#include "citits/error.hpp"
#include "support.hpp"

using namespace citits;

namespace {

RoadProfile flat_profile(int w, int h, Rgb color = {100, 100, 100}) {
  return RoadProfile{"R", Raster(w, h, color), Mask(w, h, true), 100.0, 1, 30, 10};
}

CongestionSample sample(std::int64_t t, double pct, std::string road = "R") {
  return {std::move(road), t, pct, std::nullopt};
}

// Textbook two-pass OLS, slope of percent against minutes.
double ols_oracle(const std::vector<std::pair<double, double>>& pts) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const long double n = static_cast<long double>(pts.size());
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += static_cast<long double>(x) * x;
    sxy += static_cast<long double>(x) * y;
  }
  return static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

}  // namespace

TEST_CASE("identical frame gives an all-white image and 0%") {
  std::mt19937_64 rng(1);
  auto p = flat_profile(8, 8);
  p.baseline = testing::random_raster(rng, 8, 8);
  const auto out = diff_against_baseline(p, p.baseline);
  CHECK(out.percent == 0.0);
  CHECK(out.processed == Raster(8, 8, kWhite));
}

TEST_CASE("four changed pixels of a 4x4 frame give 25%") {
  const auto p = flat_profile(4, 4);
  auto cur = p.baseline;
  for (int i = 0; i < 4; ++i) cur.at(i, i) = {200, 200, 200};
  const auto out = diff_against_baseline(p, cur);
  CHECK(out.percent == 25.0);
  CHECK(out.changed == 4);
  CHECK(out.processed.at(2, 2) == kRed);
  CHECK(out.processed.at(1, 2) == kWhite);
}

TEST_CASE("tolerance boundary is inclusive") {
  const auto p = flat_profile(4, 4);
  auto cur = Raster(4, 4, Rgb{110, 90, 110});
  CHECK(diff_against_baseline(p, cur).percent == 0.0);
  cur.at(0, 0) = {111, 100, 100};
  CHECK(diff_against_baseline(p, cur).percent == doctest::Approx(6.25));
}

TEST_CASE("unmasked pixels never count") {
  auto p = flat_profile(4, 4);
  p.roi_mask = Mask(4, 4, false);
  p.roi_mask.set(0, 0, true);
  p.roi_mask.set(1, 0, true);
  auto cur = Raster(4, 4, Rgb{0, 0, 0});
  cur.at(1, 0) = p.baseline.at(1, 0);
  const auto out = diff_against_baseline(p, cur);
  CHECK(out.percent == 50.0);
  CHECK(out.processed.at(3, 3) == kWhite);
}

TEST_CASE("dimension mismatch is rejected") {
  const auto p = flat_profile(4, 4);
  try {
    diff_against_baseline(p, Raster(4, 5));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("overwriting more masked pixels never lowers percent") {
  std::mt19937_64 rng(77);
  for (int c = 0; c < 50; ++c) {
    const int w = 4 + static_cast<int>(rng() % 28);
    const int h = 4 + static_cast<int>(rng() % 28);
    auto p = flat_profile(w, h);
    p.baseline = testing::random_raster(rng, w, h);
    p.roi_mask = testing::random_mask(rng, w, h);
    auto cur = p.baseline;
    double last = 0.0;
    for (int k = 0; k < 40; ++k) {
      const int x = static_cast<int>(rng() % static_cast<unsigned>(w));
      const int y = static_cast<int>(rng() % static_cast<unsigned>(h));
      const auto base = p.baseline.at(x, y);
      cur.at(x, y).r = static_cast<std::uint8_t>(base.r < 128 ? base.r + 100 : base.r - 100);
      const auto out = diff_against_baseline(p, cur);
      CHECK(out.percent >= last);
      last = out.percent;
      std::size_t red = 0;
      for (const auto& q : out.processed.pixels()) red += q == kRed ? 1 : 0;
      CHECK(100.0 * static_cast<double>(red) / static_cast<double>(p.roi_mask.count()) ==
            out.percent);
    }
  }
}

TEST_CASE("relative change") {
  CHECK(relative_change(sample(0, 40), sample(30, 40)) == 0.0);
  CHECK(relative_change(sample(0, 20), sample(30, 35)) == 15.0);
  CHECK(relative_change(sample(0, 35), sample(30, 20)) == -15.0);
  CHECK_THROWS_AS(relative_change(sample(0, 1, "A"), sample(30, 1, "B")), Error);
  try {
    relative_change(sample(30, 1), sample(30, 2));
    FAIL("expected NonMonotonicTimestamps");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonMonotonicTimestamps);
  }
}

TEST_CASE("status table") {
  CHECK(classify_status(0.0) == TrafficStatus::Free);
  CHECK(classify_status(24.999) == TrafficStatus::Free);
  CHECK(classify_status(25.0) == TrafficStatus::Moderate);
  CHECK(classify_status(50.0) == TrafficStatus::Heavy);
  CHECK(classify_status(75.0) == TrafficStatus::Jam);
  CHECK(classify_status(100.0) == TrafficStatus::Jam);
  CHECK_THROWS_AS(classify_status(-0.1), Error);
  CHECK_THROWS_AS(classify_status(100.1), Error);
  CHECK_THROWS_AS(classify_status(std::nan("")), Error);
  TrafficStatus prev = TrafficStatus::Free;
  for (int i = 0; i <= 1000; ++i) {
    const auto s = classify_status(i / 10.0);
    CHECK(static_cast<int>(s) >= static_cast<int>(prev));
    prev = s;
  }
}

TEST_CASE("trend examples") {
  std::vector<CongestionSample> flat{sample(0, 30), sample(60, 30), sample(120, 30)};
  auto t = trend_last_5min(flat);
  CHECK(t.slope_pct_per_min == 0.0);
  CHECK(t.label == TrendLabel::Steady);

  std::vector<CongestionSample> up;
  for (int i = 0; i < 5; ++i) up.push_back(sample(60 * i, 10.0 * (i + 1)));
  t = trend_last_5min(up);
  CHECK(t.slope_pct_per_min == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(t.label == TrendLabel::Rising);

  std::vector<CongestionSample> down{sample(0, 50), sample(60, 40), sample(120, 30)};
  t = trend_last_5min(down);
  CHECK(t.slope_pct_per_min == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(t.label == TrendLabel::Falling);
}

TEST_CASE("trend thresholds are strict") {
  // 0.5 %/min exactly is Steady.
  std::vector<CongestionSample> s{sample(0, 10), sample(120, 11)};
  CHECK(trend_last_5min(s).label == TrendLabel::Steady);
  s[1].percent = 11.01;
  CHECK(trend_last_5min(s).label == TrendLabel::Rising);
}

TEST_CASE("trend preconditions") {
  std::vector<CongestionSample> one{sample(0, 1)};
  try {
    trend_last_5min(one);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
  std::vector<CongestionSample> wide{sample(0, 1), sample(301, 2)};
  CHECK_THROWS_AS(trend_last_5min(wide), Error);
  std::vector<CongestionSample> back{sample(10, 1), sample(10, 2)};
  CHECK_THROWS_AS(trend_last_5min(back), Error);
}

TEST_CASE("trend slope matches an independent OLS") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  for (int c = 0; c < 100; ++c) {
    std::vector<CongestionSample> s;
    std::vector<std::pair<double, double>> pts;
    std::int64_t t = 1'700'000'000 + static_cast<std::int64_t>(rng() % 1000);
    const std::int64_t start = t;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n && t - start <= 300; ++i) {
      const double p = pct(rng);
      s.push_back(sample(t, p));
      pts.emplace_back(static_cast<double>(t - start) / 60.0, p);
      t += 1 + static_cast<std::int64_t>(rng() % 40);
    }
    if (s.size() < 2) continue;
    const double want = ols_oracle(pts);
    const double got = trend_last_5min(s).slope_pct_per_min;
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("trend window keeps the last 300 s") {
  std::vector<CongestionSample> s;
  for (int i = 0; i < 20; ++i) s.push_back(sample(30 * i, i));
  const auto w = trend_window(s);
  CHECK(w.size() == 11);
  CHECK(w.front().timestamp_s == 270);
}

TEST_CASE("calendar slot") {
  CHECK(calendar_slot(0).day_of_week == 3);  // Thursday
  const auto monday = calendar_slot(1'699'833'600);
  CHECK(monday.day_of_week == 0);
  CHECK(monday.hour == 0);
  const auto later = calendar_slot(1'699'833'600 + 6 * 86'400 + 23 * 3600 + 3599);
  CHECK(later.day_of_week == 6);
  CHECK(later.hour == 23);
}

TEST_CASE("historical means") {
  HistoricalModel m;
  m.update(sample(0, 20), 1, 8);
  CHECK(m.bucket("R", 1, 8) == HistoryBucket{1, 20.0});
  m.update(sample(1, 40), 1, 8);
  CHECK(m.predict("R", 1, 8) == 30.0);
  CHECK(m.bucket("R", 1, 8).count == 2);

  HistoricalModel z;
  for (int i = 0; i < 3; ++i) z.update(sample(i, 0.0), 0, 0);
  CHECK(z.predict("R", 0, 0) == 0.0);

  HistoricalModel t;
  for (double v : {10.0, 20.0, 60.0}) t.update(sample(0, v), 2, 2);
  CHECK(t.predict("R", 2, 2) == doctest::Approx(30.0).epsilon(1e-12));

  try {
    t.predict("R", 3, 3);
    FAIL("expected NoData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoData);
  }
  CHECK_THROWS_AS(t.update(sample(0, 1), 7, 0), Error);
  CHECK_THROWS_AS(t.update(sample(0, 1), 0, 24), Error);
}

TEST_CASE("historical mean equals the brute-force mean") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  for (int c = 0; c < 20; ++c) {
    HistoricalModel m;
    const int n = 1 + static_cast<int>(rng() % 500);
    long double sum = 0;
    for (int i = 0; i < n; ++i) {
      const double v = pct(rng);
      sum += v;
      m.update(sample(i, v), 4, 17);
    }
    const double want = static_cast<double>(sum / n);
    CHECK(std::abs(m.predict("R", 4, 17) - want) <= 1e-9 * want);
    CHECK(m.bucket("R", 4, 17).count == static_cast<std::uint64_t>(n));
  }
}

namespace {

// Dilated pixel set of an axis-aligned or 45-degree segment, computed
// without Bresenham.
std::set<std::pair<int, int>> thick_segment(MapPoint a, MapPoint b) {
  const int dx = (b.x > a.x) - (b.x < a.x);
  const int dy = (b.y > a.y) - (b.y < a.y);
  const int steps = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
  std::set<std::pair<int, int>> px;
  for (int i = 0; i <= steps; ++i) {
    for (int ox = -1; ox <= 1; ++ox) {
      for (int oy = -1; oy <= 1; ++oy) px.insert({a.x + i * dx + ox, a.y + i * dy + oy});
    }
  }
  return px;
}

std::size_t count_color(const Raster& r, Rgb c) {
  std::size_t n = 0;
  for (const auto& p : r.pixels()) n += p == c ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("virtual map colors follow the status table") {
  CHECK(status_color(TrafficStatus::Free) == Rgb{0, 200, 0});
  CHECK(status_color(TrafficStatus::Moderate) == Rgb{230, 200, 0});
  CHECK(status_color(TrafficStatus::Heavy) == Rgb{255, 140, 0});
  CHECK(status_color(TrafficStatus::Jam) == Rgb{255, 0, 0});

  std::vector<MapRoad> one{{{{5, 5}, {25, 5}}, 0.0}};
  auto img = render_virtual_map(one, 40, 20);
  CHECK(count_color(img, {0, 200, 0}) == 23 * 3);
  CHECK(count_color(img, kWhite) == 40 * 20 - 23 * 3);
  one[0].percent = 100.0;
  img = render_virtual_map(one, 40, 20);
  CHECK(count_color(img, kRed) == 23 * 3);
}

TEST_CASE("two roads match the rasterization oracle") {
  const MapPoint a0{2, 2}, a1{2, 30}, b0{10, 10}, b1{30, 30};
  std::vector<MapRoad> roads{{{a0, a1}, 10.0}, {{b0, b1}, 80.0}};
  const auto img = render_virtual_map(roads, 40, 40);
  CHECK(count_color(img, {0, 200, 0}) == thick_segment(a0, a1).size());
  CHECK(count_color(img, kRed) == thick_segment(b0, b1).size());
  for (auto [x, y] : thick_segment(b0, b1)) CHECK(img.at(x, y) == kRed);
}

TEST_CASE("virtual map errors") {
  std::vector<MapRoad> none;
  try {
    render_virtual_map(none, 10, 10);
    FAIL("expected EmptyRoadList");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRoadList);
  }
  std::vector<MapRoad> off{{{{0, 0}, {10, 0}}, 0.0}};
  CHECK_THROWS_AS(render_virtual_map(off, 10, 10), Error);
}

TEST_CASE("Bresenham polyline has no duplicate joints") {
  std::vector<MapPoint> pl{{0, 0}, {4, 0}, {4, 3}};
  const auto px = rasterize_polyline(pl);
  CHECK(px.size() == 8);
  CHECK(px.back().x == 4);
  CHECK(px.back().y == 3);
}
