#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "sightwarp/geom.hpp"
#include "sightwarp/input_frame.hpp"
#include "sightwarp/scene.hpp"
#include "sightwarp/warp.hpp"

namespace sightwarp {

struct DepthBand {
    double min{0.0};
    double max{0.0};

    bool contains(double d) const noexcept { return d >= min && d <= max; }
    bool operator==(const DepthBand &) const noexcept = default;
};

struct AlignmentThresholds {
    double enter_angle{25.0}; // degrees
    double exit_angle{30.0};
    DepthBand enter_depth{0.30, 0.50}; // meters from the eye
    DepthBand exit_depth{0.25, 0.65};

    // Throws Config when exit bands do not contain the enter bands.
    void validate() const;
    bool operator==(const AlignmentThresholds &) const noexcept = default;
};

/// Hysteretic gaze-hand alignment: enter on the tight band, leave only when the
/// relaxed band is violated.
struct AlignmentDetector {
    AlignmentThresholds thresholds;
    bool aligned{false};
};

struct AlignmentUpdate {
    AlignmentDetector detector;
    bool aligned{false};
};

AlignmentUpdate alignment_update(const AlignmentDetector &detector, const Ray &gaze, const Vec3 &hand_point);

enum class Technique { Baseline, GazeToHand, HandToGaze };

std::string_view to_string(Technique t) noexcept;
std::optional<Technique> technique_from_string(std::string_view s) noexcept;

/// Reorientation used by GazeToHand unless configured otherwise: -90 degrees
/// about the view-right axis, so content behind the target shows up above it
/// (a top view).
UnitQuat default_reorientation();

struct EngineConfig {
    AlignmentThresholds alignment;
    bool summon_on_pinch{true};
    Technique mode{Technique::HandToGaze};
    double dwell_ms{0.0};
    Placement placement{Placement::AtHand};
    UnitQuat reorientation{default_reorientation()};
    bool hide_far_on_summon{true};
    double grab_margin{0.02}; // meters added to a proxy's radius for direct grabs
    ContextRadiusRule context_rule{ContextRadiusRule::BoundingSphere};
    std::optional<double> context_radius;     // fixed radius instead of the rule
    std::optional<double> gaze_to_hand_scale; // proxy scale override for GazeToHand

    void validate() const;
};

struct Idle {};
struct Hovering {
    ObjectId target;
};
struct IndirectManipulation {
    ObjectId target;
    GrabState grab;
};
struct Summoning {
    ProxyBinding binding;
};
struct DirectManipulation {
    ProxyBinding binding;
    ObjectId proxy_id;
    GrabState grab;
};

using InteractionState = std::variant<Idle, Hovering, IndirectManipulation, Summoning, DirectManipulation>;

enum class StateKind { Idle, Hovering, IndirectManipulation, Summoning, DirectManipulation };

StateKind kind_of(const InteractionState &state) noexcept;
std::string_view to_string(StateKind kind) noexcept;
std::optional<StateKind> state_kind_from_string(std::string_view s) noexcept;

enum class EventType {
    ObjectAppear,
    PinchStart,
    PinchEnd,
    GrabStart,
    GrabEnd,
    FailedPinch,
    SummonStart,
    SummonEnd,
    TrialComplete,
};

std::string_view to_string(EventType type) noexcept;
std::optional<EventType> event_type_from_string(std::string_view s) noexcept;

struct SemanticEvent {
    std::int64_t t{0}; // ms
    EventType type{EventType::PinchStart};
    ObjectId id;     // grabbed object (proxy id for near grabs) or summon target
    ObjectId source; // far object behind `id`
    std::optional<Space> space;
    // GrabStart that moves an ongoing grab onto the freshly summoned proxy
    // within the same pinch, rather than starting a new grab.
    bool retarget{false};

    bool operator==(const SemanticEvent &) const noexcept = default;
};

/// Everything the machine carries between frames.
struct EngineState {
    InteractionState state{Idle{}};
    AlignmentDetector detector;
    bool pinch_held{false};
    std::optional<std::int64_t> last_t;
    Pose last_hand;
    bool hand_seen{false};
    std::optional<ObjectId> fixation_candidate;
    std::int64_t fixation_since{0};

    static EngineState initial(const EngineConfig &config);
};

struct Transition {
    StateKind from;
    StateKind to;

    bool operator==(const Transition &) const noexcept = default;
    auto operator<=>(const Transition &) const noexcept = default;
};

struct StepResult {
    EngineState state;
    std::vector<SemanticEvent> events;
    Scene scene;
    std::vector<Transition> transitions;
};

/// Advances the interaction machine by one input frame.
///
/// Within a frame the order is: pinch edges, hand pose, alignment, gaze target,
/// then state transitions (several may chain, e.g. Direct -> Summoning -> Idle
/// when the pinch opens after alignment is already lost). Alignment is resolved
/// before the pinch so a pinch landing on the frame that aligns grabs in near
/// space.
///
/// Throws Sequencing for a non-increasing timestamp and Consistency when the
/// state references an object missing from the scene.
StepResult fsm_step(const EngineState &state, const EngineConfig &config, const InputFrame &frame,
                    const Scene &scene);

/// Closes any open grab, summon and pinch at time t and returns to Idle. Used
/// when a trial ends while the user is still holding on.
StepResult fsm_finish(const EngineState &state, const EngineConfig &config, std::int64_t t, const Scene &scene);

/// Pose the far object has, or would have after commit-back if it is currently
/// proxied.
Pose authoritative_far_pose(const EngineState &state, const Scene &scene, const ObjectId &far_id);

const ProxyBinding *active_binding(const InteractionState &state) noexcept;

/// Stateful convenience wrapper over fsm_step for a single session.
class Engine {
public:
    Engine(EngineConfig config, Scene scene);

    const std::vector<SemanticEvent> &tick(const InputFrame &frame);
    const std::vector<SemanticEvent> &finish(std::int64_t t);

    const EngineState &state() const noexcept { return state_; }
    const Scene &scene() const noexcept { return scene_; }
    const EngineConfig &config() const noexcept { return config_; }
    StateKind kind() const noexcept { return kind_of(state_.state); }
    const std::vector<Transition> &last_transitions() const noexcept { return transitions_; }

    Pose far_pose(const ObjectId &far_id) const { return authoritative_far_pose(state_, scene_, far_id); }

private:
    EngineConfig config_;
    Scene scene_;
    EngineState state_;
    std::vector<SemanticEvent> events_;
    std::vector<Transition> transitions_;
};

} // namespace sightwarp
