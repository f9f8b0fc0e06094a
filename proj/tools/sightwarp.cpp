// sightwarp: generate sessions, simulate agents, replay traces, report, serve.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "sightwarp/error.hpp"
#include "sightwarp/pipeline.hpp"
#include "sightwarp/trace.hpp"
#include "sightwarp/transport.hpp"
#include "sightwarp/trial_runner.hpp"

namespace fs = std::filesystem;
using namespace sightwarp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::atomic<bool> g_stop{false};

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Parse, path.string() + ": cannot open for writing");
    out << text;
}

EngineConfig load_config(const std::string &path) {
    if (path.empty()) return {};
    try {
        return engine_config_from_json(read_json_file(path));
    } catch (const Error &e) {
        if (std::string(e.what()).rfind(path, 0) == 0) throw;
        throw Error(e.code(), path + ": " + e.what());
    }
}

template <class F> auto with_file(const std::string &path, F &&f) {
    try {
        return f();
    } catch (const Error &e) {
        if (std::string(e.what()).find(path) != std::string::npos) throw;
        throw Error(e.code(), path + ": " + e.what());
    }
}

// "host:port", ":port" or "port".
std::pair<std::string, std::uint16_t> parse_address(const std::string &addr) {
    std::string host = "127.0.0.1";
    std::string port = addr;
    if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
        if (colon > 0) host = addr.substr(0, colon);
        port = addr.substr(colon + 1);
    }
    try {
        const int p = std::stoi(port);
        if (p < 0 || p > 65535) throw std::out_of_range("port");
        return {host, static_cast<std::uint16_t>(p)};
    } catch (const std::exception &) {
        throw CLI::ValidationError("--listen", "expected HOST:PORT, got '" + addr + "'");
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"SightWarp interaction engine and docking benchmark"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;
    auto *gen = app.add_subcommand("generate-session", "Write a 144-trial session plan");
    gen->add_option("--seed", seed, "Participant seed")->required();
    gen->add_option("--out", out, "Session file to write")->required();

    std::string session_path, profile_path, config_path;
    unsigned threads = 0;
    auto *sim = app.add_subcommand("simulate", "Run scripted agents over every trial of a session");
    sim->add_option("--session", session_path, "Session file")->required()->check(CLI::ExistingFile);
    sim->add_option("--profile", profile_path, "Agent profile JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--config", config_path, "Engine config JSON")->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Output directory")->required();
    sim->add_option("--threads", threads, "Worker threads (0: all cores)");

    std::string trace_path, scene_path, events_out, metrics_out;
    bool smooth = false;
    auto *rep = app.add_subcommand("replay", "Replay a trace against a trial scene");
    rep->add_option("--trace", trace_path, "Trace (JSON lines)")->required()->check(CLI::ExistingFile);
    rep->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
    rep->add_option("--config", config_path, "Engine config JSON")->check(CLI::ExistingFile);
    rep->add_option("--events", events_out, "Event log to write (JSON lines)")->required();
    rep->add_option("--metrics", metrics_out, "Metrics JSON to write")->required();
    rep->add_flag("--smooth", smooth, "Apply 1-euro smoothing to hand positions");

    std::string in_dir;
    auto *report = app.add_subcommand("report", "Per-trial and per-condition CSV from a simulate directory");
    report->add_option("--in", in_dir, "Simulate output directory")->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", out, "Per-trial CSV; the aggregate goes to <name>.aggregate.csv")->required();

    std::string listen = "127.0.0.1:7878", http;
    auto *serve = app.add_subcommand("serve", "Session endpoint (NDJSON over TCP, optional HTTP bridge)");
    serve->add_option("--listen", listen, "TCP HOST:PORT");
    serve->add_option("--http", http, "HTTP bridge HOST:PORT for browser clients");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            write_json_file(out, to_json(make_session(seed)));
            std::cout << "wrote " << out << " (144 trials)\n";
        } else if (*sim) {
            const SessionPlan plan =
                with_file(session_path, [&] { return session_plan_from_json(read_json_file(session_path)); });
            const AgentProfile profile =
                with_file(profile_path, [&] { return agent_profile_from_json(read_json_file(profile_path)); });
            const EngineConfig config = load_config(config_path);
            const auto outcomes = simulate_session(plan, profile, config, fs::path(out), threads);
            int done = 0;
            for (const auto &o : outcomes) {
                if (o.metrics) {
                    ++done;
                } else {
                    std::cerr << "trial " << o.entry.index << ": " << o.error << '\n';
                }
            }
            std::cout << done << "/" << outcomes.size() << " trials completed; output in " << out << '\n';
            if (done != static_cast<int>(outcomes.size())) return kExitData;
        } else if (*rep) {
            const Scene scene = with_file(scene_path, [&] { return scene_from_json(read_json_file(scene_path)); });
            const EngineConfig config = load_config(config_path);
            auto frames = read_trace_file(trace_path);
            if (smooth) frames = smooth_hand(frames);
            const ReplayResult r = with_file(trace_path, [&] { return replay_trial(scene, config, frames); });
            write_events_file(events_out, r.events);
            write_json_file(metrics_out, to_json(r.metrics));
            std::cout << "completed at " << r.completed_at << " ms\n";
        } else if (*report) {
            const auto rows = load_report_rows(in_dir);
            const auto cells = aggregate(rows);
            write_text(out, per_trial_csv(rows));
            write_text(aggregate_path(out), aggregate_csv(cells));
            std::cout << rows.size() << " trials, " << cells.size() << " condition cells\n";
        } else if (*serve) {
            const auto [host, port] = parse_address(listen);
            LineServer server(host, port);
            server.start();
            std::cout << "listening on " << host << ":" << server.port() << std::endl;
            std::unique_ptr<HttpBridge> bridge;
            if (!http.empty()) {
                const auto [hhost, hport] = parse_address(http);
                bridge = std::make_unique<HttpBridge>(hhost, hport);
                bridge->start();
                std::cout << "http bridge on " << hhost << ":" << bridge->port() << std::endl;
            }
            std::signal(SIGINT, [](int) { g_stop = true; });
            std::signal(SIGTERM, [](int) { g_stop = true; });
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            if (bridge) bridge->stop();
            server.stop();
        }
    } catch (const CLI::ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error &e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}
