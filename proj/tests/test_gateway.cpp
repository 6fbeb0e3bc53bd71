#include <doctest.h>

#include <numbers>
#include <random>

#include "citits/config.hpp"
#include "citits/datacenter.hpp"
#include "citits/error.hpp"
#include "citits/gateway.hpp"
#include "support.hpp"

using namespace citits;

namespace {

std::shared_ptr<const CityConfig> fixture() {
  static const auto cfg = std::make_shared<const CityConfig>(
      load_city_config(std::string(CITITS_FIXTURE_DIR) + "/city.yaml"));
  return cfg;
}

// Bus "105" placed `meters` before the AB Chowk stop on route 105.
Snapshot snapshot_with_bus(double meters, double pct_on_r1 = -1.0) {
  const auto cfg = fixture();
  const auto* route = cfg->find_route("105");
  std::vector<Bus> buses{{"105", "105", route->stop_progress(1) - meters, std::nullopt, 10.0}};
  SampleStore store;
  if (pct_on_r1 >= 0.0) store.append({"R1", cfg->start_epoch_s + 30, pct_on_r1, std::nullopt});
  return make_snapshot(cfg, store, buses, {}, cfg->start_epoch_s + 30);
}

Snapshot snapshot_with_traffic(std::vector<double> r2_percents) {
  const auto cfg = fixture();
  SampleStore store;
  std::int64_t t = cfg->start_epoch_s;
  for (double p : r2_percents) store.append({"R2", t += 30, p, std::nullopt});
  return make_snapshot(cfg, store, {}, {}, t);
}

}  // namespace

TEST_CASE("parse examples") {
  auto q = parse_query("BUS AB Chowk;Nal Stop");
  CHECK(q.kind == QueryKind::BusInfo);
  CHECK(std::get<std::string>(q.source) == "AB Chowk");
  CHECK(q.destination == "Nal Stop");

  q = parse_query("  traffic  AB Chowk ; Nal Stop ");
  CHECK(q.kind == QueryKind::TrafficInfo);
  CHECK(std::get<std::string>(q.source) == "AB Chowk");
  CHECK(q.destination == "Nal Stop");

  q = parse_query("Bus @GPS;Nal Stop");
  CHECK(std::holds_alternative<DeviceLocation>(q.source));

  q = parse_query("BUS @18.5,73.8;Nal Stop");
  CHECK(std::get<GeoPoint>(q.source) == GeoPoint{18.5, 73.8});
}

TEST_CASE("malformed queries are BadFormat") {
  for (const char* body : {"HELLO world", "BUS", "BUS AB Chowk", "BUS ;Nal Stop", "BUS AB;",
                           "BUS a;b;c", "TRAFFICX a;b", "", "BUS @91,0;x", "BUS @x,y;z"}) {
    try {
      parse_query(body);
      FAIL("expected BadFormat for: " << body);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadFormat);
    }
  }
}

TEST_CASE("reply templates") {
  CHECK(format_response(TrafficReply{42.5, TrendLabel::Rising, TrafficStatus::Moderate}) ==
        "CONGESTION 42.5% | TREND Rising | STATUS Moderate");
  CHECK(format_response(BusReply{"105", "Nal Stop", 600, 60, false}) ==
        "BUS 105 | STOP Nal Stop | DIST 600m | ETA 60s");
  CHECK(format_response(BusReply{"105", "Nal Stop", 600, 60, true}) ==
        "BUS 105 | STOP Nal Stop | DIST 600m | ETA 60s | SRC approx");
  CHECK(format_response(ErrorReply{"bad format"}) ==
        "ERR bad format | USAGE: BUS <src>;<dst> or TRAFFIC <src>;<dst>");
}

TEST_CASE("long names are shortened to fit 160 bytes") {
  const std::string stop(300, 'x');
  const auto text = format_response(BusReply{"105", stop, 600, 60, true});
  CHECK(text.size() <= 160);
  CHECK(text.find("\xE2\x80\xA6") != std::string::npos);
  CHECK(text.find("ETA 60s | SRC approx") != std::string::npos);

  // Multi-byte names are cut on a character boundary.
  std::string accented;
  for (int i = 0; i < 100; ++i) accented += "\xC3\xA9";
  const auto t2 = format_response(BusReply{accented, accented, 1, 1, false});
  CHECK(t2.size() <= 160);
  for (std::size_t i = 0; i + 1 < t2.size(); ++i) {
    if (static_cast<unsigned char>(t2[i]) == 0xC3) CHECK(static_cast<unsigned char>(t2[i + 1]) == 0xA9);
  }
  CHECK(format_response(ErrorReply{std::string(400, 'm')}).size() <= 160);
}

TEST_CASE("bus query on the fixture city") {
  const auto snap = snapshot_with_bus(600.0);
  const auto r = handle_query(parse_query("BUS AB Chowk;Nal Stop"), snap);
  const auto& bus = std::get<BusReply>(r);
  CHECK(bus.bus_no == "105");
  CHECK(bus.stop_name == "AB Chowk Stop");
  CHECK(bus.distance_m == doctest::Approx(600.0));
  CHECK(bus.eta_s == doctest::Approx(60.0));
  CHECK_FALSE(bus.approximate_source);
  CHECK(respond("BUS AB Chowk;Nal Stop", snap) ==
        "BUS 105 | STOP AB Chowk Stop | DIST 600m | ETA 60s");
}

TEST_CASE("bus query slows down under congestion") {
  const auto snap = snapshot_with_bus(600.0, 100.0);
  const auto& bus = std::get<BusReply>(handle_query(parse_query("BUS AB Chowk;Nal Stop"), snap));
  CHECK(bus.eta_s == doctest::Approx(240.0));
}

TEST_CASE("bus query source forms") {
  const auto snap = snapshot_with_bus(600.0);
  const GeoPoint at_stop{18.5, 73.8};
  auto r = handle_query(parse_query("BUS @GPS;Nal Stop"), snap, at_stop);
  CHECK(std::get<BusReply>(r).stop_name == "AB Chowk Stop");
  CHECK_FALSE(std::get<BusReply>(r).approximate_source);

  r = handle_query(parse_query("BUS @18.5001,73.8001;Nal Stop"), snap);
  CHECK(std::get<BusReply>(r).stop_name == "AB Chowk Stop");

  // Unknown place: falls back to the city center and says so.
  r = handle_query(parse_query("BUS Somewhere;Nal Stop"), snap);
  if (const auto* bus = std::get_if<BusReply>(&r)) {
    CHECK(bus->approximate_source);
  } else {
    CHECK(std::get<ErrorReply>(r).message.size() > 0);
  }
}

TEST_CASE("bus query errors are distinct") {
  const auto snap = snapshot_with_bus(600.0);
  auto msg = [&](const char* body) {
    return std::get<ErrorReply>(handle_query(parse_query(body), snap)).message;
  };
  CHECK(msg("BUS AB Chowk;Atlantis") == "unknown destination");
  CHECK(msg("BUS AB Chowk;Deccan") == "no route found");
  const auto late = snapshot_with_bus(-50.0);
  CHECK(std::get<ErrorReply>(handle_query(parse_query("BUS AB Chowk;Nal Stop"), late)).message ==
        "no bus available");
}

TEST_CASE("traffic query") {
  const auto snap = snapshot_with_traffic({42.0, 42.0, 42.0});
  const auto r = std::get<TrafficReply>(handle_query(parse_query("TRAFFIC AB Chowk;Nal Stop"), snap));
  CHECK(r.percent == 42.0);
  CHECK(r.trend == TrendLabel::Steady);
  CHECK(r.status == TrafficStatus::Moderate);
  CHECK(respond("traffic ab chowk;nal stop", snap) ==
        "CONGESTION 42.0% | TREND Steady | STATUS Moderate");

  const auto rising = snapshot_with_traffic({10.0, 20.0, 30.0});
  CHECK(respond("TRAFFIC AB Chowk;Nal Stop", rising) ==
        "CONGESTION 30.0% | TREND Rising | STATUS Moderate");

  const auto empty = snapshot_with_traffic({});
  CHECK(respond("TRAFFIC AB Chowk;Nal Stop", empty).rfind("ERR no data |", 0) == 0);
  CHECK(respond("TRAFFIC AB Chowk;Kothrud", empty).rfind("ERR unknown road |", 0) == 0);
}

TEST_CASE("fuzzed bodies never crash and stay within 160 bytes") {
  const auto snap = snapshot_with_bus(600.0);
  std::mt19937_64 rng(1234);
  const std::vector<std::string> pieces{"BUS", "TRAFFIC", "bus", " ", ";", "@", "@GPS", ",",
                                        "AB Chowk", "Nal Stop", "\xE2\x80\xA6", "\n", "\t", "9"};
  for (int i = 0; i < 1000; ++i) {
    std::string body;
    const int n = static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      if (rng() % 2) {
        body += pieces[rng() % pieces.size()];
      } else {
        body += static_cast<char>(rng() % 256);
      }
    }
    std::string reply;
    CHECK_NOTHROW(reply = respond(body, snap));
    CHECK(reply.size() <= 160);
    bool malformed = false;
    try {
      parse_query(body);
    } catch (const Error&) {
      malformed = true;
    }
    if (malformed) CHECK(reply.find("USAGE:") != std::string::npos);
    if (reply.rfind("ERR", 0) == 0) {
      CHECK(reply.find(kUsage) != std::string::npos);
    }
    CHECK(respond(body, snap) == reply);
  }
}

TEST_CASE("line protocol") {
  const auto snap = snapshot_with_bus(600.0);
  CHECK(handle_line("FROM +911234 TEXT BUS AB Chowk;Nal Stop", snap) ==
        "TO +911234 TEXT BUS 105 | STOP AB Chowk Stop | DIST 600m | ETA 60s");
  CHECK(handle_line("FROM +911234 TEXT HELLO", snap) ==
        "TO +911234 TEXT ERR bad format | USAGE: BUS <src>;<dst> or TRAFFIC <src>;<dst>");
  CHECK(handle_line("garbage", snap).rfind("TO unknown TEXT ERR bad request | USAGE:", 0) == 0);
  CHECK_FALSE(parse_request_line("FROM TEXT x").has_value());
}

TEST_CASE("accounts") {
  AccountStore store(1000);
  const auto a = store.register_user("alice", "pw", 1700000000);
  CHECK(a.salt_hex.size() == 32);
  CHECK(a.digest_hex.size() == 64);
  CHECK(store.authenticate("alice", "pw").username == "alice");
  auto code = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([&] { store.authenticate("alice", "wrong"); }) == ErrorCode::AuthFailed);
  CHECK(code([&] { store.authenticate("bob", "pw"); }) == ErrorCode::AuthFailed);
  CHECK(code([&] { store.register_user("alice", "other"); }) == ErrorCode::DuplicateUsername);
  CHECK(code([&] { store.register_user("", "pw"); }) == ErrorCode::BadFormat);

  // Same password, different salt, different digest.
  const auto b = store.register_user("bob", "pw");
  CHECK(b.digest_hex != a.digest_hex);

  testing::TempDir dir("accounts");
  write_accounts_csv(dir / "accounts.csv", store.accounts());
  const auto back = read_accounts_csv(dir / "accounts.csv");
  CHECK(back == store.accounts());
  AccountStore reloaded(1000);
  for (auto& acc : back) reloaded.insert(acc);
  CHECK(reloaded.authenticate("bob", "pw").username == "bob");
}
