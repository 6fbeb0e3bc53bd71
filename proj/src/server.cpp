#include "citits/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <istream>
#include <ostream>
#include <vector>

#include "citits/error.hpp"
#include "citits/gateway.hpp"

namespace citits {

LivePipeline::LivePipeline(std::shared_ptr<const CityModel> city, LiveOptions options)
    : dc_(std::move(city)), options_(options) {
  dc_.run(options_.warmup_s);
  publisher_.publish(dc_.snapshot());
}

LivePipeline::~LivePipeline() { stop(); }

void LivePipeline::start() {
  if (writer_.joinable()) return;
  writer_ = std::thread([this] { loop(); });
}

void LivePipeline::stop() {
  stop_ = true;
  if (writer_.joinable()) writer_.join();
}

void LivePipeline::loop() {
  using clock = std::chrono::steady_clock;
  const auto began = clock::now();
  std::int64_t simulated = 0;
  while (!stop_) {
    if (options_.duration_s && simulated >= *options_.duration_s) break;
    if (options_.speed > 0.0) {
      const auto due = began + std::chrono::duration_cast<clock::duration>(
                                   std::chrono::duration<double>(simulated / options_.speed));
      if (clock::now() < due) {
        std::this_thread::sleep_for(std::min<clock::duration>(due - clock::now(),
                                                              std::chrono::milliseconds(50)));
        continue;
      }
    }
    dc_.tick(1);
    ++simulated;
    publisher_.publish(dc_.snapshot());
  }
  finished_ = true;
}

void serve_stream(std::istream& in, std::ostream& out, const SnapshotPublisher& pub) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto snap = pub.current();
    out << handle_line(line, *snap) << '\n' << std::flush;
  }
}

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const noexcept { return fd_; }

 private:
  int fd_;
};

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

void handle_client(int raw, const SnapshotPublisher& pub, const std::atomic<bool>& stop) {
  Fd fd(raw);
  std::string buffer;
  char chunk[1024];
  while (!stop) {
    pollfd p{fd.get(), POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0) return;
    if (ready == 0) continue;
    const auto n = ::recv(fd.get(), chunk, sizeof chunk, 0);
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
    for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n')) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto snap = pub.current();
      if (!send_all(fd.get(), handle_line(line, *snap) + "\n")) return;
    }
    if (buffer.size() > 4096) return;  // no sane request is this long
  }
}

}  // namespace

void serve_tcp(const std::string& host, int port, const SnapshotPublisher& pub,
               const std::atomic<bool>& stop) {
  Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.get() < 0) throw Error(ErrorCode::Io, "cannot create socket");
  const int yes = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::Io, "bad listen address " + host);
  }
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listener.get(), 16) != 0) {
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  }

  std::vector<std::thread> clients;
  while (!stop) {
    pollfd p{listener.get(), POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int client = ::accept(listener.get(), nullptr, nullptr);
    if (client < 0) continue;
    clients.emplace_back(handle_client, client, std::cref(pub), std::cref(stop));
  }
  for (auto& t : clients) t.join();
}

}  // namespace citits
