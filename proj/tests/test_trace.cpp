#include <set>
#include <sstream>

#include "test_util.hpp"

#include "sightwarp/agent.hpp"
#include "sightwarp/trace.hpp"
#include "sightwarp/trial_runner.hpp"

using namespace sightwarp;
using testutil::error_code_of;

namespace {

std::string message_of(const std::string &text) {
    std::istringstream in(text);
    try {
        read_trace(in, "t.jsonl");
    } catch (const Error &e) {
        return e.what();
    }
    return {};
}

InputFrame random_frame(testutil::Gen &g, std::int64_t t) {
    InputFrame f;
    f.t = t;
    f.gaze = Ray(testutil::random_vec(g, -1, 1), testutil::random_unit(g));
    f.head = {testutil::random_vec(g, -1, 1), testutil::random_quat(g)};
    f.hand = {testutil::random_vec(g, -1, 1), testutil::random_quat(g)};
    f.pinch = g() % 2;
    f.hand_valid = g() % 5 != 0;
    return f;
}

const char *kThree =
    R"({"t":0,"gaze":{"o":[0,1.6,0],"d":[0,0,1]},"head":{"p":[0,1.6,0],"q":[1,0,0,0]},"hand":{"p":[0.1,1.3,0.3],"q":[1,0,0,0]},"pinch":false,"valid":true})"
    "\n\n"
    R"({"t":11,"gaze":{"o":[0,1.6,0],"d":[0,0,1]},"head":{"p":[0,1.6,0],"q":[1,0,0,0]},"hand":{"p":[0.1,1.3,0.3],"q":[1,0,0,0]},"pinch":true,"valid":true})"
    "\n"
    R"({"t":22,"gaze":{"o":[0,1.6,0],"d":[0,0,1]},"head":{"p":[0,1.6,0],"q":[1,0,0,0]},"hand":{"p":[0.1,1.3,0.3],"q":[1,0,0,0]},"pinch":true,"valid":false,"note":"x"})"
    "\n";

} // namespace

TEST_SUITE("trace") {

TEST_CASE("empty input is an empty trace") {
    std::istringstream in("");
    CHECK(read_trace(in).empty());
    std::istringstream blank("\n\n  \n");
    CHECK(read_trace(blank).empty());
}

TEST_CASE("handwritten three-frame trace") {
    std::istringstream in(kThree);
    const auto fr = read_trace(in);
    REQUIRE(fr.size() == 3);
    CHECK(fr[0].t == 0);
    CHECK(fr[1].pinch);
    CHECK_FALSE(fr[2].hand_valid);
    CHECK(fr[0].hand.position == Vec3{0.1, 1.3, 0.3});
    CHECK(fr[2].extras == R"({"note":"x"})");
}

TEST_CASE("non-increasing timestamps name the line") {
    const std::string text = std::string(kThree) + R"({"t":22,"gaze":{"o":[0,0,0],"d":[0,0,1]},"head":{"p":[0,0,0],"q":[1,0,0,0]},"hand":{"p":[0,0,0],"q":[1,0,0,0]},"pinch":false,"valid":true})" "\n";
    std::istringstream in(text);
    CHECK(error_code_of([&] { read_trace(in, "t.jsonl"); }) == ErrorCode::Sequencing);
    CHECK(message_of(text).find("t.jsonl:5") != std::string::npos);
}

TEST_CASE("parse errors name the line") {
    const std::string text = std::string(kThree) + "{not json\n";
    std::istringstream in(text);
    CHECK(error_code_of([&] { read_trace(in, "t.jsonl"); }) == ErrorCode::Parse);
    CHECK(message_of(text).find("t.jsonl:5") != std::string::npos);
    CHECK(message_of(R"({"t":1.5})").find("t.jsonl:1") != std::string::npos);
    CHECK(message_of(R"({"t":0,"gaze":{"o":[0,0,0],"d":[0,0,1]},"head":{"p":[0,0,0],"q":[1,0,0,0]},"hand":{"p":[0,0,0],"q":[1,0,0,0]},"pinch":1,"valid":true})")
              .find("pinch") != std::string::npos);
}

TEST_CASE("write then read is the identity") {
    testutil::Gen g(3);
    std::vector<InputFrame> frames;
    std::int64_t t = 0;
    for (int i = 0; i < 500; ++i) {
        t += 1 + static_cast<std::int64_t>(g() % 30);
        frames.push_back(random_frame(g, t));
        if (i % 7 == 0) frames.back().extras = R"({"a":[1,2],"b":"c"})";
    }
    std::stringstream io;
    write_trace(io, frames);
    const auto back = read_trace(io);
    CHECK(back == frames);
    // and the text is stable
    std::stringstream again;
    write_trace(again, back);
    CHECK(again.str() == io.str());
}

TEST_CASE("synthesized traces") {
    for (auto tech : {Technique::Baseline, Technique::GazeToHand, Technique::HandToGaze}) {
        for (double size : {7.5, 12.5}) {
            for (double rot : {45.0, 90.0}) {
                for (int d = 0; d < 4; ++d) {
                    TrialSpec spec;
                    spec.object_size_deg = size;
                    spec.rotation_magnitude_deg = rot;
                    spec.displacement = static_cast<Displacement>(d);
                    spec.axis_pair = static_cast<AxisPair>(d % 3);
                    spec.sign_b = -1;
                    spec.seed = 100 + d;
                    AgentProfile prof;
                    prof.technique = tech;
                    EngineConfig cfg;
                    cfg.mode = tech;
                    const auto a = synthesize_trace(spec, prof, cfg);
                    CHECK(a == synthesize_trace(spec, prof, cfg));
                    REQUIRE(a.size() > 2);
                    CHECK(a.front().t == 0);
                    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].t > a[i - 1].t);
                    CHECK(a.back().t <= 30000);
                    const auto r = replay_trial(trial_scene(make_trial(spec, kDefaultEye), kDefaultEye), cfg, a);
                    CHECK(r.completed_at <= 30000);
                }
            }
        }
    }
}

TEST_CASE("frame cadence") {
    std::set<std::int64_t> seen;
    for (std::int64_t i = 0; i < 2000; ++i) {
        const auto t = frame_time_ms(i, 90.0);
        CHECK(t == static_cast<std::int64_t>(std::llround(i * 1000.0 / 90.0)));
        CHECK(seen.insert(t).second);
    }
    CHECK(grabs_needed(45, 60) == 1);
    CHECK(grabs_needed(90, 60) == 2);
    CHECK(grabs_needed(60, 60) == 1);
    CHECK(grabs_needed(121, 60) == 3);
}

TEST_CASE("profile validation") {
    AgentProfile p;
    p.hand_speed = 0;
    CHECK(error_code_of([&] { p.validate(); }) == ErrorCode::Config);
    AgentProfile q;
    q.frame_rate_hz = -1;
    CHECK(error_code_of([&] { q.validate(); }) == ErrorCode::Config);
}

TEST_CASE("hand smoothing") {
    testutil::Gen g(9);
    std::vector<InputFrame> frames;
    for (int i = 0; i < 200; ++i) {
        frames.push_back(random_frame(g, frame_time_ms(i, 90.0)));
        frames.back().hand_valid = i % 17 != 3;
    }
    const auto s = smooth_hand(frames);
    REQUIRE(s.size() == frames.size());
    OneEuroState st{OneEuroParams{}};
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CHECK(s[i].t == frames[i].t);
        CHECK(s[i].gaze.direction == frames[i].gaze.direction);
        CHECK(s[i].hand.orientation == frames[i].hand.orientation);
        CHECK(s[i].pinch == frames[i].pinch);
        if (!frames[i].hand_valid) {
            CHECK(s[i].hand.position == frames[i].hand.position);
            continue;
        }
        const auto o = one_euro_step(st, frames[i].hand.position, frames[i].t / 1000.0);
        CHECK(s[i].hand.position == o.value);
        st = o.state;
    }
    // smoothing reduces jitter of a noisy still hand
    std::vector<InputFrame> still;
    for (int i = 0; i < 300; ++i) {
        InputFrame f;
        f.t = frame_time_ms(i, 90.0);
        f.hand.position = Vec3{0, 1.3, 0.4} + testutil::random_vec(g, -0.005, 0.005);
        still.push_back(f);
    }
    const auto ss = smooth_hand(still);
    double raw = 0, smooth = 0;
    for (std::size_t i = 1; i < still.size(); ++i) {
        raw += length(still[i].hand.position - still[i - 1].hand.position);
        smooth += length(ss[i].hand.position - ss[i - 1].hand.position);
    }
    CHECK(smooth < 0.5 * raw);
}

}
