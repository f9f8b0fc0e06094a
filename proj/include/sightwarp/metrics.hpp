#pragma once

#include <span>

#include "sightwarp/fsm.hpp"
#include "sightwarp/input_frame.hpp"

namespace sightwarp {

/// The seven per-trial measures.
struct MetricsRecord {
    double trial_completion_time{0.0};       // ms, appearance -> completion
    double acquisition_time{0.0};            // ms, appearance -> first pinch
    double first_manipulation_duration{0.0}; // ms, first pinch held (truncated at completion)
    int clutch_count{0};                     // grabs of the trial object beyond the first
    int failed_gesture_count{0};             // pinches with no effect on any object
    double hand_translation{0.0};            // m travelled while pinching
    double hand_rotation{0.0};               // degrees turned while pinching

    bool operator==(const MetricsRecord &) const noexcept = default;
};

/// Computes the measures for one trial.
///
/// The log must contain an ObjectAppear and a later TrialComplete (else
/// IncompleteTrial). Events outside that window are ignored. A PinchStart
/// while a pinch is open, or a PinchEnd without one, is MalformedLog.
///
/// A grab counts once per pinch: the GrabStart that re-targets an ongoing grab
/// to a summoned proxy is not a new grab. Hand motion sums over consecutive
/// valid frames that both have the pinch held, clipped to the trial window.
MetricsRecord compute_metrics(std::span<const SemanticEvent> events, std::span<const InputFrame> trace,
                              const ObjectId &trial_object = "object");

} // namespace sightwarp
