#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "citits/congestion.hpp"
#include "citits/snapshot.hpp"
#include "citits/transit.hpp"

namespace citits {

inline constexpr std::size_t kSmsMaxChars = 160;
inline constexpr std::string_view kUsage = "USAGE: BUS <src>;<dst> or TRAFFIC <src>;<dst>";

enum class QueryKind { BusInfo, TrafficInfo };

// Where the user is: a named place, the device's own GPS (`@GPS`), or an
// explicit `@lat,lon` coordinate.
struct DeviceLocation {};
using QuerySource = std::variant<std::string, DeviceLocation, GeoPoint>;

struct Query {
  QueryKind kind = QueryKind::BusInfo;
  QuerySource source;
  std::string destination;
};

// Grammar: KEYWORD SOURCE;DESTINATION, KEYWORD in {BUS, TRAFFIC}, any case.
// Throws BadFormat.
Query parse_query(std::string_view body);

struct BusReply {
  std::string bus_no;
  std::string stop_name;
  double distance_m = 0.0;
  double eta_s = 0.0;
  bool approximate_source = false;  // network-location fallback was used
};

struct TrafficReply {
  double percent = 0.0;
  TrendLabel trend = TrendLabel::Steady;
  TrafficStatus status = TrafficStatus::Free;
};

struct ErrorReply {
  std::string message;
};

using Response = std::variant<BusReply, TrafficReply, ErrorReply>;

// Answers a query against a read-only snapshot. Domain failures come back as
// ErrorReply with a distinct message; nothing is thrown for them.
Response handle_query(const Query& q, const Snapshot& snap,
                      std::optional<GeoPoint> device_location = std::nullopt);

// Renders the SMS text; names are shortened with an ellipsis to stay within
// 160 bytes. Throws Overflow if that is impossible.
std::string format_response(const Response& r);

// parse + handle + format; malformed bodies yield the usage error.
std::string respond(std::string_view body, const Snapshot& snap,
                    std::optional<GeoPoint> device_location = std::nullopt);

struct SmsMessage {
  std::string from_number;
  std::string to_number;
  std::string body;
};

// Line protocol: "FROM <number> TEXT <body>" -> "TO <number> TEXT <reply>".
std::optional<SmsMessage> parse_request_line(std::string_view line);
std::string handle_line(std::string_view line, const Snapshot& snap);

struct Account {
  std::string username;
  std::string salt_hex;
  std::string digest_hex;
  std::int64_t created_at = 0;

  friend bool operator==(const Account&, const Account&) = default;
};

// Website accounts; salted PBKDF2-SHA256 digests compared in constant time.
class AccountStore {
 public:
  explicit AccountStore(int iterations = 20'000) : iterations_(iterations) {}

  Account register_user(const std::string& username, const std::string& password,
                        std::int64_t created_at = 0);
  // Throws AuthFailed for unknown users and wrong passwords alike.
  Account authenticate(const std::string& username, const std::string& password) const;

  std::vector<Account> accounts() const;
  void insert(Account a);  // for reloading persisted records

 private:
  int iterations_;
  mutable std::mutex mu_;
  std::vector<Account> accounts_;
};

// accounts.csv: username,salt,digest,created_at
void write_accounts_csv(const std::filesystem::path& path, const std::vector<Account>& accounts);
std::vector<Account> read_accounts_csv(const std::filesystem::path& path);

}  // namespace citits
