#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sightwarp/docking.hpp"
#include "sightwarp/fsm.hpp"
#include "sightwarp/metrics.hpp"

namespace sightwarp {

CompletionCriteria criteria_of(const TrialBinding &binding);

/// Drives one engine over a frame stream and, when the scene carries a trial
/// binding, tracks docking completion. Emits ObjectAppear on the first frame;
/// on the completing frame it closes any open grab, summon and pinch and then
/// emits TrialComplete. Frames after completion are ignored.
class TrialRunner {
public:
    TrialRunner(Scene scene, EngineConfig config);

    /// Events produced by this frame.
    const std::vector<SemanticEvent> &step(const InputFrame &frame);

    bool has_trial() const noexcept { return trial_.has_value(); }
    bool completed() const noexcept { return trial_ && trial_->completed_at.has_value(); }
    std::optional<std::int64_t> completed_at() const noexcept {
        return trial_ ? trial_->completed_at : std::nullopt;
    }

    const std::vector<SemanticEvent> &log() const noexcept { return log_; }
    const std::vector<InputFrame> &frames() const noexcept { return frames_; }
    const Engine &engine() const noexcept { return engine_; }
    const std::optional<TrialState> &trial() const noexcept { return trial_; }

    /// Throws IncompleteTrial before completion.
    MetricsRecord metrics() const;

private:
    Engine engine_;
    std::optional<TrialState> trial_;
    CompletionCriteria criteria_;
    std::vector<SemanticEvent> step_events_;
    std::vector<SemanticEvent> log_;
    std::vector<InputFrame> frames_;
};

struct ReplayResult {
    std::vector<SemanticEvent> events;
    MetricsRecord metrics;
    std::int64_t completed_at{0};
};

/// Replays a trace against a trial scene. Throws IncompleteTrial when the
/// trace ends before the trial completes, Consistency when the scene has no
/// trial binding.
ReplayResult replay_trial(const Scene &scene, const EngineConfig &config, std::span<const InputFrame> frames);

} // namespace sightwarp
