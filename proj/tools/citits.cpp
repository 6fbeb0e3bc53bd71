// citits: city traffic datacenter command line.
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "citits/datacenter.hpp"
#include "citits/error.hpp"
#include "citits/gateway.hpp"
#include "citits/server.hpp"
#include "citits/simulator.hpp"

namespace fs = std::filesystem;
using namespace citits;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const CityModel> load_city(const fs::path& config, std::optional<std::uint64_t> seed) {
  auto cfg = std::make_shared<CityConfig>(load_city_config(config));
  if (seed) cfg->seed = *seed;
  return std::make_shared<const CityModel>(build_city(std::move(cfg)));
}

int cmd_simulate(const fs::path& config, std::int64_t duration, std::optional<std::uint64_t> seed,
                 const fs::path& out, std::int64_t dt, const std::string& ingest, bool no_frames) {
  const auto city = load_city(config, seed);
  FrameSource source;
  if (!ingest.empty()) source = {FrameSource::Kind::Ingest, ingest};
  Datacenter dc(city, source);
  dc.set_log_sink([](const std::string& line) { std::cerr << line << '\n'; });

  fs::create_directories(out);
  const bool frames = city->config->write_frames && !no_frames && ingest.empty();
  if (frames) {
    for (const auto& r : city->roads) {
      const auto dir = out / "frames" / r.profile.road_id;
      fs::create_directories(dir);
      write_ppm(dir / "baseline.ppm", r.profile.baseline);
      write_pbm(dir / "mask.pbm", r.profile.roi_mask);
    }
    dc.set_frame_sink([&out](const std::string& road, std::int64_t ts, const Raster& frame) {
      write_ppm(out / "frames" / road / (std::to_string(ts) + ".ppm"), frame);
    });
  }
  dc.run(duration, dt);

  std::string text = read_text(config);
  if (seed) text += "\n# run seed override: " + std::to_string(*seed) + "\n";
  write_state_dir(out, dc, text);
  const auto& st = dc.stats();
  std::cout << "simulated " << duration << " s: " << st.samples << " samples, " << st.fixes
            << " fixes, " << st.replans << " replans, " << st.skipped_frames << " skipped frames\n";
  return 0;
}

int cmd_serve(const fs::path& config, const std::string& listen, double speed,
              std::int64_t warmup, std::optional<std::int64_t> duration) {
  const auto city = load_city(config, std::nullopt);
  LivePipeline live(city, LiveOptions{speed, warmup, duration});
  live.start();
  if (listen == "-" || listen == "stdin") {
    serve_stream(std::cin, std::cout, live.publisher());
    live.stop();
    return 0;
  }
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Io, "listen address must be HOST:PORT or -");
  const int port = std::stoi(listen.substr(colon + 1));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << listen << '\n';
  serve_tcp(listen.substr(0, colon), port, live.publisher(), g_stop);
  live.stop();
  return 0;
}

int cmd_query(const std::string& sms, const fs::path& state) {
  const auto loaded = load_state_dir(state);
  std::cout << respond(sms, loaded.snapshot()) << '\n';
  return 0;
}

int cmd_render_map(const fs::path& state, const fs::path& out) {
  const auto loaded = load_state_dir(state);
  write_ppm(out, render_state_map(loaded.snapshot()));
  return 0;
}

int cmd_report(const fs::path& state) {
  std::cout << render_report(load_state_dir(state));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"City traffic datacenter: congestion, transit and signal control"};
  app.require_subcommand(1);

  std::string config, out, state, sms, listen, ingest, map_out;
  std::int64_t duration = 3600, dt = 1, warmup = 0;
  std::uint64_t seed = 0;
  double speed = 1.0;
  bool no_frames = false;
  std::int64_t serve_duration = 0;

  auto* sim = app.add_subcommand("simulate", "Run the pipeline over a synthetic city");
  sim->add_option("--config", config, "City config (YAML)")->required()->check(CLI::ExistingFile);
  sim->add_option("--duration", duration, "Simulated seconds")->check(CLI::NonNegativeNumber);
  auto* seed_opt = sim->add_option("--seed", seed, "Override the config seed");
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--dt", dt, "Step in seconds")->check(CLI::PositiveNumber);
  sim->add_option("--ingest", ingest, "Read frames from DIR/<road>/<ts>.ppm instead of simulating")
      ->check(CLI::ExistingDirectory);
  sim->add_flag("--no-frames", no_frames, "Do not write frame files");

  auto* serve = app.add_subcommand("serve", "Answer line-protocol queries over a live pipeline");
  serve->add_option("--config", config, "City config (YAML)")->required()->check(CLI::ExistingFile);
  serve->add_option("--listen", listen, "HOST:PORT, or - for stdin/stdout")->required();
  serve->add_option("--speed", speed, "Simulated seconds per wall second (0 = unthrottled)");
  serve->add_option("--warmup", warmup, "Seconds simulated before serving")->check(CLI::NonNegativeNumber);
  auto* dur_opt = serve->add_option("--duration", serve_duration, "Stop advancing after S simulated seconds");

  auto* query = app.add_subcommand("query", "Answer one SMS query from a saved state");
  query->add_option("--sms", sms, "Message body, e.g. \"BUS AB Chowk;Nal Stop\"")->required();
  query->add_option("--state", state, "State directory")->required()->check(CLI::ExistingDirectory);

  auto* render = app.add_subcommand("render-map", "Draw the color-coded virtual map");
  render->add_option("--state", state, "State directory")->required()->check(CLI::ExistingDirectory);
  render->add_option("--out", map_out, "Output P6 file")->required();

  auto* report = app.add_subcommand("report", "Per-road statistics and junction plans");
  report->add_option("--state", state, "State directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) std::cerr << app.help();
    return app.exit(e);
  }

  try {
    if (*sim) {
      return cmd_simulate(config, duration,
                          seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, out,
                          dt, ingest, no_frames);
    }
    if (*serve) {
      return cmd_serve(config, listen, speed, warmup,
                       dur_opt->count() ? std::optional<std::int64_t>(serve_duration) : std::nullopt);
    }
    if (*query) return cmd_query(sms, state);
    if (*render) return cmd_render_map(state, map_out);
    if (*report) return cmd_report(state);
  } catch (const std::exception& e) {
    std::cerr << "citits: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
