#include "test_util.hpp"

#include "sightwarp/agent.hpp"
#include "sightwarp/metrics.hpp"
#include "sightwarp/trial_runner.hpp"

using namespace sightwarp;
using testutil::error_code_of;

namespace {

SemanticEvent ev(std::int64_t t, EventType type, ObjectId id = {}, bool retarget = false) {
    SemanticEvent e;
    e.t = t;
    e.type = type;
    e.source = id;
    e.id = id;
    if (type == EventType::GrabStart || type == EventType::GrabEnd) e.space = Space::Far;
    e.retarget = retarget;
    return e;
}

InputFrame fr(std::int64_t t, const Vec3 &p, const UnitQuat &q, bool pinch, bool valid = true) {
    InputFrame f;
    f.t = t;
    f.gaze = Ray({0, 1.6, 0}, {0, 0, 1});
    f.hand = {p, q};
    f.pinch = pinch;
    f.hand_valid = valid;
    return f;
}

using E = EventType;

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("single grab golden") {
    const std::vector<SemanticEvent> log{ev(0, E::ObjectAppear, "object"), ev(500, E::PinchStart),
                                         ev(500, E::GrabStart, "object"),  ev(1500, E::GrabEnd, "object"),
                                         ev(1500, E::PinchEnd),            ev(1500, E::TrialComplete, "object")};
    const auto m = compute_metrics(log, {});
    CHECK(m.trial_completion_time == 1500);
    CHECK(m.acquisition_time == 500);
    CHECK(m.first_manipulation_duration == 1000);
    CHECK(m.clutch_count == 0);
    CHECK(m.failed_gesture_count == 0);
    CHECK(m.hand_translation == 0);
    CHECK(m.hand_rotation == 0);
}

TEST_CASE("two grabs give one clutch") {
    const std::vector<SemanticEvent> log{
        ev(0, E::ObjectAppear, "object"), ev(100, E::PinchStart),   ev(100, E::GrabStart, "object"),
        ev(400, E::GrabEnd, "object"),    ev(400, E::PinchEnd),     ev(600, E::PinchStart),
        ev(600, E::GrabStart, "object"),  ev(900, E::GrabEnd, "object"), ev(900, E::PinchEnd),
        ev(1200, E::TrialComplete, "object")};
    const auto m = compute_metrics(log, {});
    CHECK(m.clutch_count == 1);
    CHECK(m.first_manipulation_duration == 300);
    CHECK(m.acquisition_time == 100);
}

TEST_CASE("a retargeted grab within one pinch is not a clutch") {
    const std::vector<SemanticEvent> log{
        ev(0, E::ObjectAppear, "object"), ev(100, E::PinchStart), ev(100, E::GrabStart, "object"),
        ev(200, E::SummonStart, "object"), ev(200, E::GrabStart, "object", true), ev(700, E::GrabEnd, "object"),
        ev(700, E::PinchEnd), ev(700, E::TrialComplete, "object")};
    CHECK(compute_metrics(log, {}).clutch_count == 0);
}

TEST_CASE("failed pinches are counted but are not clutches") {
    const std::vector<SemanticEvent> log{
        ev(0, E::ObjectAppear, "object"), ev(50, E::PinchStart), ev(50, E::FailedPinch), ev(80, E::PinchEnd),
        ev(100, E::PinchStart), ev(100, E::GrabStart, "object"), ev(700, E::GrabEnd, "object"),
        ev(700, E::PinchEnd), ev(700, E::TrialComplete, "object")};
    const auto m = compute_metrics(log, {});
    CHECK(m.failed_gesture_count == 1);
    CHECK(m.clutch_count == 0);
    CHECK(m.acquisition_time == 50);
    CHECK(m.first_manipulation_duration == 30);
}

TEST_CASE("grabs of other objects do not count") {
    const std::vector<SemanticEvent> log{
        ev(0, E::ObjectAppear, "object"), ev(10, E::PinchStart), ev(10, E::GrabStart, "other"),
        ev(20, E::GrabEnd, "other"), ev(20, E::PinchEnd), ev(30, E::PinchStart), ev(30, E::GrabStart, "object"),
        ev(40, E::GrabEnd, "object"), ev(40, E::PinchEnd), ev(50, E::TrialComplete, "object")};
    CHECK(compute_metrics(log, {}).clutch_count == 0);
}

TEST_CASE("no pinch at all") {
    const std::vector<SemanticEvent> log{ev(0, E::ObjectAppear, "object"), ev(900, E::TrialComplete, "object")};
    const auto m = compute_metrics(log, {});
    CHECK(m.acquisition_time == 900);
    CHECK(m.first_manipulation_duration == 0);
}

TEST_CASE("errors") {
    CHECK(error_code_of([] { compute_metrics(std::vector{ev(5, E::TrialComplete)}, {}); }) == ErrorCode::IncompleteTrial);
    CHECK(error_code_of([] { compute_metrics(std::vector{ev(0, E::ObjectAppear, "object")}, {}); }) ==
          ErrorCode::IncompleteTrial);
    CHECK(error_code_of([] {
              compute_metrics(std::vector{ev(0, E::ObjectAppear), ev(1, E::PinchStart), ev(2, E::PinchStart),
                                          ev(3, E::TrialComplete)},
                              {});
          }) == ErrorCode::MalformedLog);
    CHECK(error_code_of([] {
              compute_metrics(std::vector{ev(0, E::ObjectAppear), ev(1, E::PinchEnd), ev(3, E::TrialComplete)}, {});
          }) == ErrorCode::MalformedLog);
}

TEST_CASE("hand motion while pinching") {
    const UnitQuat r30 = UnitQuat::from_axis_angle({0, 0, 1}, 30);
    const std::vector<InputFrame> trace{fr(0, {0, 0, 0}, {}, false),     fr(10, {0, 0, 0}, {}, true),
                                        fr(20, {0.1, 0, 0}, r30, true),  fr(30, {0.1, 0.2, 0}, r30, true),
                                        fr(40, {0.5, 0.2, 0}, {}, false), fr(50, {0.6, 0.2, 0}, {}, true)};
    const std::vector<SemanticEvent> log{ev(0, E::ObjectAppear, "object"), ev(10, E::PinchStart),
                                         ev(40, E::PinchEnd), ev(50, E::PinchStart),
                                         ev(50, E::TrialComplete, "object")};
    const auto m = compute_metrics(log, trace);
    CHECK(std::abs(m.hand_translation - 0.3) < 1e-12);
    CHECK(std::abs(m.hand_rotation - 30.0) < 1e-9);
    // a motionless pinch contributes nothing
    const std::vector<InputFrame> still{fr(0, {1, 1, 1}, r30, true), fr(10, {1, 1, 1}, r30, true)};
    const auto z = compute_metrics(log, still);
    CHECK(z.hand_translation == 0);
    CHECK(z.hand_rotation == 0);
}

TEST_CASE("invariances") {
    testutil::Gen g(61);
    for (int k = 0; k < 200; ++k) {
        std::vector<InputFrame> trace;
        std::int64_t t = 0;
        for (int i = 0; i < 50; ++i, t += 11) {
            trace.push_back(fr(t, testutil::random_vec(g, -1, 1), testutil::random_quat(g), i >= 5 && i < 40));
        }
        const std::vector<SemanticEvent> log{ev(0, E::ObjectAppear, "object"), ev(55, E::PinchStart),
                                             ev(55, E::GrabStart, "object"), ev(440, E::GrabEnd, "object"),
                                             ev(440, E::PinchEnd), ev(539, E::TrialComplete, "object")};
        const auto base = compute_metrics(log, trace);

        // time translation
        const std::int64_t dt = static_cast<std::int64_t>(g() % 100000);
        auto log2 = log;
        auto tr2 = trace;
        for (auto &e : log2) e.t += dt;
        for (auto &f : tr2) f.t += dt;
        const auto shifted = compute_metrics(log2, tr2);
        CHECK(shifted.trial_completion_time == base.trial_completion_time);
        CHECK(shifted.acquisition_time == base.acquisition_time);
        CHECK(shifted.first_manipulation_duration == base.first_manipulation_duration);
        CHECK(shifted.hand_translation == base.hand_translation);
        CHECK(shifted.hand_rotation == base.hand_rotation);

        // rigid world rotation and left-composition of hand orientations
        const UnitQuat w = testutil::random_quat(g);
        const Vec3 shift = testutil::random_vec(g, -5, 5);
        auto tr3 = trace;
        for (auto &f : tr3) f.hand = {w.rotate(f.hand.position) + shift, w * f.hand.orientation};
        const auto rotated = compute_metrics(log, tr3);
        CHECK(std::abs(rotated.hand_translation - base.hand_translation) < 1e-9);
        CHECK(std::abs(rotated.hand_rotation - base.hand_rotation) < 1e-6);
    }
}

TEST_CASE("splitting a grab adds exactly one clutch") {
    const std::vector<InputFrame> trace{fr(0, {0, 0, 0}, {}, true), fr(10, {0.1, 0, 0}, {}, true),
                                        fr(20, {0.1, 0, 0}, {}, true), fr(30, {0.2, 0, 0}, {}, true)};
    const std::vector<SemanticEvent> one{ev(0, E::ObjectAppear, "object"), ev(0, E::PinchStart),
                                         ev(0, E::GrabStart, "object"), ev(30, E::GrabEnd, "object"),
                                         ev(30, E::PinchEnd), ev(30, E::TrialComplete, "object")};
    const std::vector<SemanticEvent> two{ev(0, E::ObjectAppear, "object"), ev(0, E::PinchStart),
                                         ev(0, E::GrabStart, "object"), ev(15, E::GrabEnd, "object"),
                                         ev(15, E::PinchEnd), ev(15, E::PinchStart), ev(15, E::GrabStart, "object"),
                                         ev(30, E::GrabEnd, "object"), ev(30, E::PinchEnd),
                                         ev(30, E::TrialComplete, "object")};
    const auto a = compute_metrics(one, trace), b = compute_metrics(two, trace);
    CHECK(b.clutch_count == a.clutch_count + 1);
    CHECK(b.hand_translation == a.hand_translation);
    CHECK(b.hand_rotation == a.hand_rotation);
}

TEST_CASE("replayed agent: 45 degrees in one grab, 90 degrees with one clutch") {
    for (auto tech : {Technique::Baseline, Technique::GazeToHand, Technique::HandToGaze}) {
        for (double rot : {45.0, 90.0}) {
            TrialSpec spec;
            spec.rotation_magnitude_deg = rot;
            spec.axis_pair = AxisPair::XZ;
            spec.displacement = Displacement::NegZ;
            spec.seed = 5;
            AgentProfile prof;
            prof.technique = tech;
            prof.rotation_per_grab_deg = 60;
            EngineConfig cfg;
            cfg.mode = tech;
            const auto frames = synthesize_trace(spec, prof, cfg);
            const auto r = replay_trial(trial_scene(make_trial(spec, kDefaultEye), kDefaultEye), cfg, frames);
            int grabs = 0;
            for (const auto &e : r.events) grabs += e.type == EventType::GrabStart && !e.retarget;
            CHECK(grabs == (rot == 45.0 ? 1 : 2));
            CHECK(r.metrics.clutch_count == (rot == 45.0 ? 0 : 1));
            CHECK(r.metrics.failed_gesture_count == 0);
            CHECK(r.metrics.acquisition_time <= r.metrics.trial_completion_time);
            CHECK(r.metrics.first_manipulation_duration <=
                  r.metrics.trial_completion_time - r.metrics.acquisition_time);
        }
    }
}

}
