#include "sightwarp/trial_runner.hpp"

#include "sightwarp/error.hpp"

namespace sightwarp {

CompletionCriteria criteria_of(const TrialBinding &b) {
    return {b.threshold_pos_frac, b.threshold_rot_deg, b.dwell_required_ms};
}

TrialRunner::TrialRunner(Scene scene, EngineConfig config) : engine_(std::move(config), scene) {
    if (scene.trial) {
        const TrialBinding &b = *scene.trial;
        TrialState t;
        t.object = scene.at(b.object_id);
        t.target = scene.at(b.target_id);
        t.width = b.width;
        trial_ = t;
        criteria_ = criteria_of(b);
    }
}

const std::vector<SemanticEvent> &TrialRunner::step(const InputFrame &frame) {
    step_events_.clear();
    if (completed()) return step_events_;

    if (frames_.empty() && trial_) step_events_.push_back({frame.t, EventType::ObjectAppear, trial_->object.id, {}, std::nullopt});
    const auto &ev = engine_.tick(frame);
    step_events_.insert(step_events_.end(), ev.begin(), ev.end());
    frames_.push_back(frame);

    if (trial_) {
        trial_->object.pose = engine_.far_pose(trial_->object.id);
        *trial_ = completion_step(*trial_, frame.t, criteria_);
        if (trial_->completed_at) {
            const auto &closing = engine_.finish(frame.t);
            step_events_.insert(step_events_.end(), closing.begin(), closing.end());
            step_events_.push_back({frame.t, EventType::TrialComplete, trial_->object.id, {}, std::nullopt});
        }
    }
    log_.insert(log_.end(), step_events_.begin(), step_events_.end());
    return step_events_;
}

MetricsRecord TrialRunner::metrics() const {
    if (!completed()) throw Error(ErrorCode::IncompleteTrial, "trial has not completed");
    return compute_metrics(log_, frames_, trial_->object.id);
}

ReplayResult replay_trial(const Scene &scene, const EngineConfig &config, std::span<const InputFrame> frames) {
    if (!scene.trial) throw Error(ErrorCode::Consistency, "scene has no trial binding");
    TrialRunner runner(scene, config);
    for (const auto &f : frames) {
        runner.step(f);
        if (runner.completed()) break;
    }
    if (!runner.completed()) {
        throw Error(ErrorCode::IncompleteTrial,
                    "trace ended after " + std::to_string(runner.frames().size()) + " frames without completing the trial");
    }
    return {runner.log(), runner.metrics(), *runner.completed_at()};
}

} // namespace sightwarp
