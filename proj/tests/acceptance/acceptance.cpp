// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "docking_gen.hpp"
#include "fsm_model.hpp"
#include "oracles.hpp"

#include "sightwarp/agent.hpp"
#include "sightwarp/metrics.hpp"
#include "sightwarp/pipeline.hpp"
#include "sightwarp/session.hpp"
#include "sightwarp/trial_runner.hpp"
#include "sightwarp/warp.hpp"

using namespace sightwarp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok{true};
    std::string detail;

    void require(bool cond, const std::string &what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

using Gen = std::mt19937_64;

double uni(Gen &g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

Vec3 unit(Gen &g) {
    std::normal_distribution<double> n;
    return normalize({n(g), n(g), n(g)});
}

UnitQuat quat(Gen &g) {
    std::normal_distribution<double> n;
    return UnitQuat(n(g), n(g), n(g), n(g));
}

std::string fmt(const char *f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome visual_angle_widths() {
    Outcome o;
    const double a = width_from_angle(7.5, 2.0) * 100, b = width_from_angle(12.5, 2.0) * 100;
    o.require(std::abs(a - 26.2) <= 0.05, fmt("7.5 deg at 2 m gives %.4f cm", a));
    o.require(std::abs(b - 43.8) <= 0.05, fmt("12.5 deg at 2 m gives %.4f cm", b));
    o.require(std::abs(a / 100 - oracle::width_for_angle(7.5, 2.0)) < 1e-12, "disagrees with the bisection oracle");
    if (o.ok) o.detail = fmt("%.3f cm, %.3f cm", a, b);
    return o;
}

Vec3 hand_at(const Vec3 &eye, double angle_deg, double depth) {
    const double r = deg_to_rad(angle_deg);
    return eye + Vec3{0, -std::sin(r), std::cos(r)} * depth;
}

Outcome hysteresis() {
    Outcome o;
    const Vec3 eye{0, 1.6, 0};
    const Ray gaze(eye, {0, 0, 1});
    Gen g(7);
    int toggles = 0;
    for (bool start : {false, true}) {
        AlignmentDetector d;
        d.aligned = start;
        for (int i = 0; i < 10000; ++i) {
            // oscillation strictly inside the band plus jitter
            const double a = 27.5 + 2.4 * std::sin(i * 0.37) + uni(g, -0.09, 0.09);
            const bool before = d.aligned;
            d = alignment_update(d, gaze, hand_at(eye, a, uni(g, 0.3, 0.5))).detector;
            toggles += d.aligned != before;
        }
    }
    o.require(toggles == 0, "toggles inside the band: " + std::to_string(toggles));
    AlignmentDetector d;
    d = alignment_update(d, gaze, hand_at(eye, 26.0, 0.4)).detector;
    o.require(!d.aligned, "26 deg entered");
    d = alignment_update(d, gaze, hand_at(eye, 24.9, 0.4)).detector;
    o.require(d.aligned, "24.9 deg did not enter within one frame");
    d = alignment_update(d, gaze, hand_at(eye, 29.0, 0.4)).detector;
    o.require(d.aligned, "29 deg exited");
    d = alignment_update(d, gaze, hand_at(eye, 30.1, 0.4)).detector;
    o.require(!d.aligned, "30.1 deg did not exit within one frame");
    if (o.ok) o.detail = "20000 frames, 0 toggles";
    return o;
}

Outcome fsm_conformance() {
    Outcome o;
    std::set<Transition> all;
    for (const auto &cfg : model::all_configs()) {
        const auto edges = model::explore(cfg, 4);
        all.insert(edges.begin(), edges.end());
        if (cfg.mode == Technique::Baseline) {
            for (const auto &t : edges) {
                o.require(t.to != StateKind::Summoning && t.to != StateKind::DirectManipulation,
                          "Baseline reached a summoning state");
            }
        }
    }
    const auto want = model::expected_edges();
    for (const auto &t : want) {
        if (!all.count(t)) o.require(false, "missing edge " + std::string(to_string(t.from)) + "->" + std::string(to_string(t.to)));
    }
    for (const auto &t : all) {
        if (!want.count(t)) o.require(false, "extra edge " + std::string(to_string(t.from)) + "->" + std::string(to_string(t.to)));
    }
    if (o.ok) o.detail = std::to_string(all.size()) + " edges";
    return o;
}

Outcome warp_round_trip() {
    Outcome o;
    Gen g(2024);
    double worst_pos = 0, worst_angle = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 eye{uni(g, -1, 1), uni(g, 1, 2), uni(g, -1, 1)};
        const Vec3 dir = unit(g);
        Scene s;
        s.eye = eye;
        SceneObject t;
        t.id = "t";
        t.pose = {eye + dir * uni(g, 1, 5), quat(g)};
        t.half_extents = {uni(g, 0.02, 0.3), uni(g, 0.02, 0.3), uni(g, 0.02, 0.3)};
        s.add(t);
        const auto ctx = capture_context(s, "t", default_context_radius(t));
        SummonRequest req;
        req.mode = i % 2 ? SummonMode::GazeToHand : SummonMode::HandToGaze;
        req.gaze = Ray(eye, dir);
        req.hand_point = eye + unit(g) * uni(g, 0.3, 0.5);
        req.reorientation = quat(g);
        const auto r = summon(s, ctx, req);
        const auto &b = r.binding;
        // pose inside the far sphere, out and back
        const Pose p{b.far_sphere.center + unit(g) * uni(g, 0, b.far_sphere.radius), quat(g)};
        const Pose back = map_near_to_far(b, b.far_to_near(p));
        worst_pos = std::max(worst_pos, length(back.position - p.position));
        const double rot = oracle::rotation_angle_deg(oracle::matrix_of(back.orientation), oracle::matrix_of(p.orientation));
        o.require(rot < 1e-6, fmt("orientation drift %.3g deg", rot));
        // the proxy subtends the angle of its source
        const double far_angle = 2 * std::asin(t.bounding_radius() / length(t.pose.position - eye));
        const Vec3 near_c = r.proxies[0].pose.position;
        const double near_angle = 2 * std::asin(t.bounding_radius() * b.scale / length(near_c - eye));
        worst_angle = std::max(worst_angle, std::abs(near_angle - far_angle) / far_angle);
    }
    o.require(worst_pos <= 1e-9, fmt("round-trip error %.3g m", worst_pos));
    o.require(worst_angle <= 1e-6, fmt("visual angle relative error %.3g", worst_angle));
    if (o.ok) o.detail = fmt("max position error %.2g m, max angle error %.2g", worst_pos, worst_angle);
    return o;
}

Outcome docking_oracle() {
    Outcome o;
    std::mt19937_64 g(99);
    int completed = 0, n = 2000;
    for (int i = 0; i < n; ++i) {
        const auto tr = docking_gen::random_pose_trace(g);
        const auto e = docking_gen::engine_completion(tr);
        o.require(e == docking_gen::oracle_completion(tr), "trace " + std::to_string(i) + " disagrees");
        completed += e.has_value();
    }
    o.require(completed > 0 && completed < n, "generator did not exercise both outcomes");
    if (o.ok) o.detail = std::to_string(n) + " traces, " + std::to_string(completed) + " completed";
    return o;
}

Outcome session_composition() {
    Outcome o;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SessionPlan p = make_session(seed);
        o.require(p.trials.size() == 144, "seed " + std::to_string(seed) + ": trial count");
        std::map<int, std::set<std::pair<Displacement, AxisPair>>> cross;
        std::map<int, int> sizes;
        for (const auto &e : p.trials) {
            cross[e.block].insert({e.spec.displacement, e.spec.axis_pair});
            ++sizes[e.block];
        }
        o.require(cross.size() == 12, "seed " + std::to_string(seed) + ": block count");
        for (const auto &[b, c] : cross) {
            o.require(c.size() == 12 && sizes[b] == 12, "seed " + std::to_string(seed) + ": block " + std::to_string(b));
        }
    }
    if (o.ok) o.detail = "100 seeds";
    return o;
}

SemanticEvent ev(std::int64_t t, EventType type, ObjectId id = {}) {
    SemanticEvent e;
    e.t = t;
    e.type = type;
    e.source = id;
    e.id = id;
    if (type == EventType::GrabStart || type == EventType::GrabEnd) e.space = Space::Far;
    return e;
}

InputFrame hand_frame(std::int64_t t, const Vec3 &p, const UnitQuat &q, bool pinch) {
    InputFrame f;
    f.t = t;
    f.gaze = Ray({0, 1.6, 0}, {0, 0, 1});
    f.hand = {p, q};
    f.pinch = pinch;
    return f;
}

Outcome metrics_goldens() {
    Outcome o;
    using E = EventType;
    {
        const std::vector<SemanticEvent> log{ev(0, E::ObjectAppear, "object"), ev(500, E::PinchStart),
                                             ev(500, E::GrabStart, "object"),  ev(1500, E::GrabEnd, "object"),
                                             ev(1500, E::PinchEnd),            ev(1500, E::TrialComplete, "object")};
        const auto m = compute_metrics(log, {});
        o.require(m == MetricsRecord{1500, 500, 1000, 0, 0, 0.0, 0.0}, "single grab log");
    }
    {
        // failed pinch, two grabs, and hand motion only while pinching
        const UnitQuat r = UnitQuat::from_axis_angle({0, 1, 0}, 40);
        const std::vector<SemanticEvent> log{
            ev(0, E::ObjectAppear, "object"), ev(200, E::PinchStart), ev(200, E::FailedPinch), ev(300, E::PinchEnd),
            ev(400, E::PinchStart), ev(400, E::GrabStart, "object"), ev(700, E::GrabEnd, "object"),
            ev(700, E::PinchEnd), ev(800, E::PinchStart), ev(800, E::GrabStart, "object"),
            ev(1000, E::GrabEnd, "object"), ev(1000, E::PinchEnd), ev(1300, E::TrialComplete, "object")};
        const std::vector<InputFrame> trace{
            hand_frame(400, {0, 1.3, 0.4}, {}, true),   hand_frame(500, {0.3, 1.3, 0.4}, {}, true),
            hand_frame(600, {0.3, 1.7, 0.4}, r, true),  hand_frame(700, {0.9, 1.7, 0.4}, r, false),
            hand_frame(800, {0.9, 1.7, 0.4}, r, true),  hand_frame(900, {0.9, 1.7, 0.5}, {}, true),
            hand_frame(1300, {5, 5, 5}, {}, false)};
        const auto m = compute_metrics(log, trace);
        o.require(m.trial_completion_time == 1300, "completion time");
        o.require(m.acquisition_time == 200, "acquisition time");
        o.require(m.first_manipulation_duration == 100, "first manipulation duration");
        o.require(m.clutch_count == 1, "clutch count");
        o.require(m.failed_gesture_count == 1, "failed gestures");
        o.require(std::abs(m.hand_translation - 0.8) < 1e-12, fmt("hand translation %.6f", m.hand_translation));
        o.require(std::abs(m.hand_rotation - 80.0) < 1e-9, fmt("hand rotation %.6f", m.hand_rotation));
    }
    // scripted clutch examples
    for (double rot : {90.0, 45.0}) {
        TrialSpec spec;
        spec.rotation_magnitude_deg = rot;
        AgentProfile prof;
        prof.rotation_per_grab_deg = 60;
        EngineConfig cfg;
        const auto r = replay_trial(trial_scene(make_trial(spec, kDefaultEye), kDefaultEye), cfg,
                                    synthesize_trace(spec, prof, cfg));
        o.require(r.metrics.clutch_count == (rot == 90.0 ? 1 : 0), fmt("%.0f deg rotation clutch count", rot));
    }
    if (o.ok) o.detail = "goldens exact; 90 deg at 60 deg per grab gives clutch_count 1";
    return o;
}

Outcome end_to_end() {
    Outcome o;
    const SessionPlan plan = make_session(7);
    std::ostringstream note;
    for (int variant = -1; variant < 3; ++variant) {
        SessionPlan p = plan;
        if (variant >= 0) {
            for (auto &e : p.trials) e.technique = static_cast<Technique>(variant);
        }
        const auto outcomes = simulate_session(p, AgentProfile{}, EngineConfig{});
        int done = 0;
        for (const auto &r : outcomes) done += r.metrics.has_value();
        const std::string name = variant < 0 ? "counterbalanced" : std::string(to_string(static_cast<Technique>(variant)));
        o.require(outcomes.size() == 144 && done == 144, name + ": " + std::to_string(done) + "/144 completed");
        note << name << " " << done << "/144; ";
    }
    const fs::path dir = fs::temp_directory_path() / "sightwarp_acceptance_e2e";
    fs::remove_all(dir);
    simulate_session(plan, AgentProfile{}, EngineConfig{}, dir);
    const auto cells = aggregate(load_report_rows(dir));
    const std::string csv = aggregate_csv(cells);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    o.require(cells.size() == 12 && lines == 13, "report has " + std::to_string(cells.size()) + " cells");
    fs::remove_all(dir);
    if (o.ok) o.detail = note.str() + "12 cells";
    return o;
}

Outcome transport_transparency() {
    Outcome o;
    int trials = 0;
    for (auto tech : {Technique::Baseline, Technique::GazeToHand, Technique::HandToGaze}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            TrialSpec spec;
            spec.seed = seed;
            spec.displacement = static_cast<Displacement>(seed % 4);
            spec.axis_pair = static_cast<AxisPair>(seed % 3);
            spec.rotation_magnitude_deg = seed % 2 ? 90 : 45;
            AgentProfile prof;
            prof.technique = tech;
            EngineConfig cfg;
            cfg.mode = tech;
            const auto frames = synthesize_trace(spec, prof, cfg);
            const auto direct = replay_trial(trial_scene(make_trial(spec, kDefaultEye), kDefaultEye), cfg, frames);
            Session s;
            const std::vector<std::string> setup{encode(InboundMessage{ConfigureMsg{cfg}}).dump(),
                                                 encode(InboundMessage{StartTrialMsg{spec}}).dump()};
            s.handle_lines(setup);
            std::vector<SemanticEvent> events;
            std::optional<TrialResultMsg> result;
            for (const auto &f : frames) {
                const std::vector<std::string> one{encode(InboundMessage{FrameMsg{f}}).dump()};
                for (const auto &line : s.handle_lines(one)) {
                    const auto m = decode_outbound(Json::parse(line));
                    if (const auto *sn = std::get_if<Snapshot>(&m)) events.insert(events.end(), sn->events.begin(), sn->events.end());
                    if (const auto *r = std::get_if<TrialResultMsg>(&m)) result = *r;
                }
            }
            o.require(events == direct.events, "event logs differ");
            o.require(result && result->metrics == direct.metrics && result->completed_at == direct.completed_at,
                      "metrics differ");
            ++trials;
        }
    }
    if (o.ok) o.detail = std::to_string(trials) + " trials identical through the session endpoint";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char *name;
        double budget_s; // zero: no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"visual-angle widths", 0.5, visual_angle_widths},
        {"alignment hysteresis", 1.0, hysteresis},
        {"fsm conformance", 1.0, fsm_conformance},
        {"warp round-trip and angle preservation", 2.0, warp_round_trip},
        {"docking oracle equivalence", 30.0, docking_oracle},
        {"session composition", 5.0, session_composition},
        {"metrics goldens", 0.5, metrics_goldens},
        {"end-to-end scripted sessions", 60.0, end_to_end},
        {"human-study outcomes via transport transparency", 0.0, transport_transparency},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.ok && c.budget_s > 0 && s > c.budget_s) {
            o.ok = false;
            o.detail = fmt("took %.2f s, budget %.2f s", s, c.budget_s);
        }
        failed += !o.ok;
        std::printf("%s  %s (%.2f s)  %s\n", o.ok ? "PASS" : "FAIL", c.name, s, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
