#include "sightwarp/metrics.hpp"

#include <algorithm>
#include <string>

#include "sightwarp/error.hpp"

namespace sightwarp {

MetricsRecord compute_metrics(std::span<const SemanticEvent> events, std::span<const InputFrame> trace,
                              const ObjectId &trial_object) {
    auto appear = std::find_if(events.begin(), events.end(),
                               [](const SemanticEvent &e) { return e.type == EventType::ObjectAppear; });
    if (appear == events.end()) {
        throw Error(ErrorCode::IncompleteTrial, "event log has no ObjectAppear");
    }
    auto complete = std::find_if(appear, events.end(),
                                 [](const SemanticEvent &e) { return e.type == EventType::TrialComplete; });
    if (complete == events.end()) {
        throw Error(ErrorCode::IncompleteTrial, "event log has no TrialComplete after ObjectAppear");
    }
    const std::int64_t t0 = appear->t;
    const std::int64_t t1 = complete->t;

    MetricsRecord m;
    m.trial_completion_time = static_cast<double>(t1 - t0);

    bool pinch_open = false;
    bool grabbed_this_pinch = false;
    std::optional<std::int64_t> first_pinch;
    std::optional<std::int64_t> first_pinch_end;
    int grabs = 0;
    std::int64_t last_t = t0;
    for (auto it = appear; it != complete; ++it) {
        const SemanticEvent &e = *it;
        if (e.t < last_t) {
            throw Error(ErrorCode::MalformedLog, "event timestamps decrease at t=" + std::to_string(e.t));
        }
        last_t = e.t;
        switch (e.type) {
        case EventType::PinchStart:
            if (pinch_open) {
                throw Error(ErrorCode::MalformedLog, "overlapping pinch at t=" + std::to_string(e.t));
            }
            pinch_open = true;
            grabbed_this_pinch = false;
            if (!first_pinch) first_pinch = e.t;
            break;
        case EventType::PinchEnd:
            if (!pinch_open) {
                throw Error(ErrorCode::MalformedLog, "PinchEnd without PinchStart at t=" + std::to_string(e.t));
            }
            pinch_open = false;
            if (first_pinch && !first_pinch_end) first_pinch_end = e.t;
            break;
        case EventType::GrabStart:
            if (e.source == trial_object && !e.retarget && !grabbed_this_pinch) {
                ++grabs;
                grabbed_this_pinch = true;
            }
            break;
        case EventType::FailedPinch:
            ++m.failed_gesture_count;
            break;
        default:
            break;
        }
    }
    m.clutch_count = std::max(0, grabs - 1);
    if (first_pinch) {
        m.acquisition_time = static_cast<double>(*first_pinch - t0);
        const std::int64_t end = first_pinch_end ? std::min(*first_pinch_end, t1) : t1;
        m.first_manipulation_duration = static_cast<double>(end - *first_pinch);
    } else {
        m.acquisition_time = m.trial_completion_time;
    }

    const InputFrame *prev = nullptr;
    for (const InputFrame &f : trace) {
        if (f.t < t0 || f.t > t1) {
            prev = nullptr;
            continue;
        }
        if (prev && prev->pinch && f.pinch && prev->hand_valid && f.hand_valid) {
            m.hand_translation += distance(prev->hand.position, f.hand.position);
            m.hand_rotation += quat_angle(prev->hand.orientation, f.hand.orientation);
        }
        prev = &f;
    }
    return m;
}

} // namespace sightwarp
