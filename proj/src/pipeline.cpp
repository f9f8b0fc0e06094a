#include "sightwarp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "sightwarp/error.hpp"
#include "sightwarp/trace.hpp"
#include "sightwarp/trial_runner.hpp"

namespace fs = std::filesystem;

namespace sightwarp {

namespace {

double number_field(const Json &j, const char *name, double fallback) {
    if (!j.contains(name)) return fallback;
    const Json &v = j.at(name);
    if (!v.is_number()) throw Error(ErrorCode::Schema, std::string("profile: field '") + name + "' must be a number");
    return v.get<double>();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

Json to_json(const AgentProfile &p) {
    Json j;
    j["reaction_ms"] = p.reaction_ms;
    j["hand_speed"] = p.hand_speed;
    j["wrist_speed_deg_s"] = p.wrist_speed_deg_s;
    j["rotation_per_grab_deg"] = p.rotation_per_grab_deg;
    j["technique"] = to_string(p.technique);
    j["noise_seed"] = p.noise_seed;
    j["gaze_noise_deg"] = p.gaze_noise_deg;
    j["frame_rate_hz"] = p.frame_rate_hz;
    j["eye_rate_hz"] = p.eye_rate_hz;
    j["horizon_ms"] = p.horizon_ms;
    return j;
}

AgentProfile agent_profile_from_json(const Json &j) {
    if (!j.is_object()) throw Error(ErrorCode::Schema, "profile: expected a JSON object");
    AgentProfile p;
    p.reaction_ms = number_field(j, "reaction_ms", p.reaction_ms);
    p.hand_speed = number_field(j, "hand_speed", p.hand_speed);
    p.wrist_speed_deg_s = number_field(j, "wrist_speed_deg_s", p.wrist_speed_deg_s);
    p.rotation_per_grab_deg = number_field(j, "rotation_per_grab_deg", p.rotation_per_grab_deg);
    p.gaze_noise_deg = number_field(j, "gaze_noise_deg", p.gaze_noise_deg);
    p.frame_rate_hz = number_field(j, "frame_rate_hz", p.frame_rate_hz);
    p.eye_rate_hz = number_field(j, "eye_rate_hz", p.eye_rate_hz);
    p.horizon_ms = number_field(j, "horizon_ms", p.horizon_ms);
    if (j.contains("technique")) {
        const auto t = j.at("technique").is_string() ? technique_from_string(j.at("technique").get<std::string>())
                                                     : std::nullopt;
        if (!t) throw Error(ErrorCode::Schema, "profile: field 'technique' must be Baseline, GazeToHand or HandToGaze");
        p.technique = *t;
    }
    if (j.contains("noise_seed")) {
        if (!j.at("noise_seed").is_number_unsigned()) {
            throw Error(ErrorCode::Schema, "profile: field 'noise_seed' must be a non-negative integer");
        }
        p.noise_seed = j.at("noise_seed").get<std::uint64_t>();
    }
    p.validate();
    return p;
}

void write_events_file(const fs::path &path, const std::vector<SemanticEvent> &events) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Parse, path.string() + ": cannot open for writing");
    for (const auto &e : events) out << to_json(e).dump() << '\n';
}

std::vector<SemanticEvent> read_events_file(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, path.string() + ": cannot open file");
    std::vector<SemanticEvent> events;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(n);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorCode::Parse, where + ": " + e.what());
        }
        events.push_back(semantic_event_from_json(j, where));
    }
    return events;
}

fs::path trial_dir(const fs::path &root, int index) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d", index);
    return root / name;
}

std::vector<TrialOutcome> simulate_session(const SessionPlan &plan, const AgentProfile &profile,
                                           const EngineConfig &config, const std::optional<fs::path> &out,
                                           unsigned threads) {
    profile.validate();
    config.validate();
    if (out) fs::create_directories(*out);

    std::vector<TrialOutcome> outcomes(plan.trials.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < plan.trials.size();) {
            const SessionEntry &entry = plan.trials[i];
            TrialOutcome &o = outcomes[i];
            o.entry = entry;
            try {
                AgentProfile p = profile;
                p.technique = entry.technique;
                EngineConfig c = config;
                c.mode = entry.technique;
                const auto frames = synthesize_trace(entry.spec, p, c, kDefaultEye);
                const Scene scene = trial_scene(make_trial(entry.spec, kDefaultEye), kDefaultEye);
                if (out) {
                    const fs::path dir = trial_dir(*out, entry.index);
                    fs::create_directories(dir);
                    write_trace_file(dir / "trace.jsonl", frames);
                    write_json_file(dir / "scene.json", to_json(scene));
                    write_json_file(dir / "config.json", to_json(c));
                }
                const ReplayResult r = replay_trial(scene, c, frames);
                o.metrics = r.metrics;
                o.completed_at = r.completed_at;
                if (out) {
                    const fs::path dir = trial_dir(*out, entry.index);
                    write_events_file(dir / "events.jsonl", r.events);
                    write_json_file(dir / "metrics.json", to_json(r.metrics));
                }
            } catch (const std::exception &e) {
                o.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, plan.trials.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
    work();
    for (auto &t : pool) t.join();

    if (out) {
        write_json_file(*out / "session.json", to_json(plan));
        Json manifest;
        manifest["schema"] = kSchemaVersion;
        manifest["participant_seed"] = plan.participant_seed;
        manifest["trials"] = plan.trials.size();
        manifest["profile"] = to_json(profile);
        manifest["config"] = to_json(config);
        write_json_file(*out / "manifest.json", manifest);
        std::ofstream results(*out / "results.jsonl");
        for (const auto &o : outcomes) {
            Json line;
            line["index"] = o.entry.index;
            line["technique"] = to_string(o.entry.technique);
            line["block"] = o.entry.block;
            line["completed"] = o.metrics.has_value();
            if (o.metrics) {
                line["completed_at"] = o.completed_at;
                line["metrics"] = to_json(*o.metrics);
            } else {
                line["error"] = o.error;
            }
            results << line.dump() << '\n';
        }
    }
    return outcomes;
}

std::vector<ReportRow> load_report_rows(const fs::path &dir) {
    const SessionPlan plan = session_plan_from_json(read_json_file(dir / "session.json"));
    std::vector<ReportRow> rows;
    for (const auto &entry : plan.trials) {
        const fs::path td = trial_dir(dir, entry.index);
        const auto events = read_events_file(td / "events.jsonl");
        const auto frames = read_trace_file(td / "trace.jsonl");
        try {
            rows.push_back({entry, compute_metrics(events, frames)});
        } catch (const Error &e) {
            throw Error(e.code(), (td / "events.jsonl").string() + ": " + e.what());
        }
    }
    return rows;
}

std::array<double, 7> measures_of(const MetricsRecord &m) {
    return {m.trial_completion_time, m.acquisition_time,
            m.first_manipulation_duration, static_cast<double>(m.clutch_count),
            static_cast<double>(m.failed_gesture_count), m.hand_translation,
            m.hand_rotation};
}

std::vector<CellStats> aggregate(const std::vector<ReportRow> &rows) {
    using Key = std::tuple<int, double, double>;
    std::map<Key, std::vector<std::array<double, 7>>> groups;
    for (const auto &r : rows) {
        groups[{static_cast<int>(r.entry.technique), r.entry.spec.object_size_deg,
                r.entry.spec.rotation_magnitude_deg}]
            .push_back(measures_of(r.metrics));
    }
    std::vector<CellStats> cells;
    for (const auto &[key, values] : groups) {
        CellStats c;
        c.technique = static_cast<Technique>(std::get<0>(key));
        c.size_deg = std::get<1>(key);
        c.rotation_deg = std::get<2>(key);
        c.n = static_cast<int>(values.size());
        for (std::size_t k = 0; k < 7; ++k) {
            double sum = 0.0;
            for (const auto &v : values) sum += v[k];
            c.mean[k] = sum / c.n;
            if (c.n > 1) {
                double ss = 0.0;
                for (const auto &v : values) ss += (v[k] - c.mean[k]) * (v[k] - c.mean[k]);
                c.sd[k] = std::sqrt(ss / (c.n - 1));
            }
        }
        cells.push_back(c);
    }
    return cells;
}

std::string per_trial_csv(const std::vector<ReportRow> &rows) {
    std::ostringstream out;
    out << "trial,technique,block,size_deg,rotation_deg,displacement,axis_pair";
    for (const char *name : kMeasureNames) out << ',' << name;
    out << '\n';
    for (const auto &r : rows) {
        out << r.entry.index << ',' << to_string(r.entry.technique) << ',' << r.entry.block << ','
            << fmt(r.entry.spec.object_size_deg) << ',' << fmt(r.entry.spec.rotation_magnitude_deg) << ','
            << to_string(r.entry.spec.displacement) << ',' << to_string(r.entry.spec.axis_pair);
        for (double v : measures_of(r.metrics)) out << ',' << fmt(v);
        out << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const std::vector<CellStats> &cells) {
    std::ostringstream out;
    out << "technique,size_deg,rotation_deg,n";
    for (const char *name : kMeasureNames) out << ',' << name << "_mean," << name << "_sd";
    out << '\n';
    for (const auto &c : cells) {
        out << to_string(c.technique) << ',' << fmt(c.size_deg) << ',' << fmt(c.rotation_deg) << ',' << c.n;
        for (std::size_t k = 0; k < 7; ++k) out << ',' << fmt(c.mean[k]) << ',' << fmt(c.sd[k]);
        out << '\n';
    }
    return out.str();
}

fs::path aggregate_path(const fs::path &report) {
    fs::path p = report;
    const std::string ext = p.extension().string();
    p.replace_extension();
    return fs::path(p.string() + ".aggregate" + (ext.empty() ? ".csv" : ext));
}

} // namespace sightwarp
