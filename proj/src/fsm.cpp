#include "sightwarp/fsm.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "sightwarp/error.hpp"

namespace sightwarp {

void AlignmentThresholds::validate() const {
    auto in_range = [](double a) { return a > 0.0 && a < 180.0; };
    if (!in_range(enter_angle) || !in_range(exit_angle)) {
        throw Error(ErrorCode::Config, "alignment angles must lie in (0, 180) degrees");
    }
    if (exit_angle < enter_angle) {
        throw Error(ErrorCode::Config, "alignment exit angle must be >= enter angle");
    }
    if (!(enter_depth.min <= enter_depth.max) || !(exit_depth.min <= exit_depth.max)) {
        throw Error(ErrorCode::Config, "alignment depth band is inverted");
    }
    if (exit_depth.min > enter_depth.min || exit_depth.max < enter_depth.max) {
        throw Error(ErrorCode::Config, "alignment exit depth band must contain the enter band");
    }
}

AlignmentUpdate alignment_update(const AlignmentDetector &detector, const Ray &gaze, const Vec3 &hand_point) {
    AlignmentDetector next = detector;
    const double depth = distance(hand_point, gaze.origin);
    if (!(depth > 0.0)) {
        next.aligned = false;
        return {next, false};
    }
    const double angle = alignment_angle(gaze, hand_point);
    const AlignmentThresholds &th = detector.thresholds;
    if (detector.aligned) {
        next.aligned = !(angle > th.exit_angle || !th.exit_depth.contains(depth));
    } else {
        next.aligned = angle <= th.enter_angle && th.enter_depth.contains(depth);
    }
    return {next, next.aligned};
}

std::string_view to_string(Technique t) noexcept {
    switch (t) {
    case Technique::Baseline: return "Baseline";
    case Technique::GazeToHand: return "GazeToHand";
    case Technique::HandToGaze: return "HandToGaze";
    }
    return "Baseline";
}

std::optional<Technique> technique_from_string(std::string_view s) noexcept {
    for (auto t : {Technique::Baseline, Technique::GazeToHand, Technique::HandToGaze}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

UnitQuat default_reorientation() { return UnitQuat::from_axis_angle(Vec3::unit_x(), -90.0); }

void EngineConfig::validate() const {
    alignment.validate();
    if (!(dwell_ms >= 0.0)) throw Error(ErrorCode::Config, "dwell_ms must be non-negative");
    if (!(grab_margin >= 0.0)) throw Error(ErrorCode::Config, "grab_margin must be non-negative");
    if (context_radius && !(*context_radius > 0.0)) throw Error(ErrorCode::Config, "context_radius must be positive");
    if (gaze_to_hand_scale && !(*gaze_to_hand_scale > 0.0)) {
        throw Error(ErrorCode::Config, "gaze_to_hand_scale must be positive");
    }
}

StateKind kind_of(const InteractionState &state) noexcept { return static_cast<StateKind>(state.index()); }

namespace {

constexpr std::array<std::string_view, 5> kStateNames{"Idle", "Hovering", "IndirectManipulation", "Summoning",
                                                      "DirectManipulation"};
constexpr std::array<std::string_view, 9> kEventNames{"ObjectAppear", "PinchStart", "PinchEnd",
                                                      "GrabStart",    "GrabEnd",    "FailedPinch",
                                                      "SummonStart",  "SummonEnd",  "TrialComplete"};

} // namespace

std::string_view to_string(StateKind kind) noexcept { return kStateNames[static_cast<std::size_t>(kind)]; }

std::optional<StateKind> state_kind_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kStateNames.size(); ++i) {
        if (kStateNames[i] == s) return static_cast<StateKind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(EventType type) noexcept { return kEventNames[static_cast<std::size_t>(type)]; }

std::optional<EventType> event_type_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kEventNames.size(); ++i) {
        if (kEventNames[i] == s) return static_cast<EventType>(i);
    }
    return std::nullopt;
}

EngineState EngineState::initial(const EngineConfig &config) {
    EngineState s;
    s.detector.thresholds = config.alignment;
    return s;
}

const ProxyBinding *active_binding(const InteractionState &state) noexcept {
    if (const auto *s = std::get_if<Summoning>(&state)) return &s->binding;
    if (const auto *d = std::get_if<DirectManipulation>(&state)) return &d->binding;
    return nullptr;
}

Pose authoritative_far_pose(const EngineState &state, const Scene &scene, const ObjectId &far_id) {
    if (const ProxyBinding *b = active_binding(state.state)) {
        auto it = b->member_map.find(far_id);
        if (it != b->member_map.end()) {
            return b->near_to_far(scene.at(it->second).pose);
        }
    }
    return scene.at(far_id).pose;
}

namespace {

// One frame of machine evaluation over working copies of state and scene.
class Stepper {
public:
    Stepper(const EngineState &state, const EngineConfig &config, const Scene &scene)
        : s_(state), cfg_(config), scene_(scene) {}

    StepResult step(const InputFrame &frame);
    StepResult finish(std::int64_t t);

private:
    void check_consistency() const;
    void emit(EventType type, ObjectId id = {}, ObjectId source = {}, std::optional<Space> space = std::nullopt,
              bool retarget = false) {
        events_.push_back({t_, type, std::move(id), std::move(source), space, retarget});
    }
    void go(InteractionState next) {
        transitions_.push_back({kind_of(s_.state), kind_of(next)});
        s_.state = std::move(next);
    }
    std::optional<ObjectId> resolve_target(const Ray &gaze);
    ProxyBinding summon_context(const ObjectId &target_id, const Ray &gaze, const Vec3 &hand_point);
    void commit_back(const ProxyBinding &binding);
    void mirror(const ProxyBinding &binding);
    std::optional<ObjectId> proxy_under_hand(const ProxyBinding &binding, const Vec3 &hand_point) const;
    StepResult result() { return {std::move(s_), std::move(events_), std::move(scene_), std::move(transitions_)}; }

    EngineState s_;
    const EngineConfig &cfg_;
    Scene scene_;
    std::int64_t t_{0};
    std::vector<SemanticEvent> events_;
    std::vector<Transition> transitions_;
};

void Stepper::check_consistency() const {
    std::visit(
        [&](const auto &st) {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, Hovering> || std::is_same_v<T, IndirectManipulation>) {
                scene_.at(st.target);
            } else if constexpr (std::is_same_v<T, Summoning> || std::is_same_v<T, DirectManipulation>) {
                for (const auto &[far_id, proxy_id] : st.binding.member_map) {
                    scene_.at(far_id);
                    scene_.at(proxy_id);
                }
                if constexpr (std::is_same_v<T, DirectManipulation>) scene_.at(st.proxy_id);
            }
        },
        s_.state);
}

std::optional<ObjectId> Stepper::resolve_target(const Ray &gaze) {
    const auto candidate = gaze_target(scene_, gaze, std::numeric_limits<double>::infinity());
    if (candidate != s_.fixation_candidate) {
        s_.fixation_candidate = candidate;
        s_.fixation_since = t_;
    }
    if (!candidate) return std::nullopt;
    if (static_cast<double>(t_ - s_.fixation_since) < cfg_.dwell_ms) return std::nullopt;
    return candidate;
}

ProxyBinding Stepper::summon_context(const ObjectId &target_id, const Ray &gaze, const Vec3 &hand_point) {
    const SceneObject &target = scene_.at(target_id);
    const double radius = cfg_.context_radius ? *cfg_.context_radius : default_context_radius(target, cfg_.context_rule);
    const CapturedContext ctx = capture_context(scene_, target_id, radius);

    SummonRequest req;
    req.mode = cfg_.mode == Technique::GazeToHand ? SummonMode::GazeToHand : SummonMode::HandToGaze;
    req.placement = cfg_.placement;
    req.gaze = gaze;
    req.hand_point = hand_point;
    req.reorientation = cfg_.reorientation;
    req.scale_override = cfg_.gaze_to_hand_scale;
    SummonResult res = summon(scene_, ctx, req);

    for (auto &p : res.proxies) {
        scene_.remove(p.id);
        scene_.add(std::move(p));
    }
    if (cfg_.hide_far_on_summon) {
        for (const auto &[far_id, proxy_id] : res.binding.member_map) scene_.at(far_id).hidden = true;
    }
    emit(EventType::SummonStart, target_id, target_id);
    return std::move(res.binding);
}

void Stepper::commit_back(const ProxyBinding &binding) {
    for (const auto &[far_id, proxy_id] : binding.member_map) {
        SceneObject &far = scene_.at(far_id);
        far.pose = binding.near_to_far(scene_.at(proxy_id).pose);
        far.hidden = false;
        scene_.remove(proxy_id);
    }
    emit(EventType::SummonEnd, binding.target_id, binding.target_id);
}

void Stepper::mirror(const ProxyBinding &binding) {
    for (const auto &[far_id, proxy_id] : binding.member_map) {
        scene_.at(far_id).pose = binding.near_to_far(scene_.at(proxy_id).pose);
    }
}

std::optional<ObjectId> Stepper::proxy_under_hand(const ProxyBinding &binding, const Vec3 &hand_point) const {
    std::optional<ObjectId> best;
    double best_d = 0.0;
    for (const auto &[far_id, proxy_id] : binding.member_map) {
        const SceneObject &p = scene_.at(proxy_id);
        if (!p.interactable) continue;
        // Proxies are cropped to the near sphere, so their reach is too.
        const double reach = std::min(p.bounding_radius(), binding.near_sphere.radius) + cfg_.grab_margin;
        const double d = distance(p.pose.position, hand_point);
        if (d <= reach && (!best || d < best_d)) {
            best = proxy_id;
            best_d = d;
        }
    }
    return best;
}

StepResult Stepper::step(const InputFrame &frame) {
    if (s_.last_t && frame.t <= *s_.last_t) {
        throw Error(ErrorCode::Sequencing, "frame at t=" + std::to_string(frame.t) +
                                               " ms does not follow t=" + std::to_string(*s_.last_t) + " ms");
    }
    check_consistency();
    t_ = frame.t;
    s_.last_t = frame.t;

    // Tracking loss holds the last known hand and pinch.
    const bool valid = frame.hand_valid || !s_.hand_seen;
    const Pose hand = valid ? frame.hand : s_.last_hand;
    const bool pinch = valid ? frame.pinch : s_.pinch_held;
    const bool pinch_down = pinch && !s_.pinch_held;
    const bool pinch_up = !pinch && s_.pinch_held;
    if (valid) {
        s_.last_hand = hand;
        s_.hand_seen = true;
    }
    if (pinch_down) emit(EventType::PinchStart);

    bool aligned = s_.detector.aligned;
    if (valid) {
        auto upd = alignment_update(s_.detector, frame.gaze, hand.position);
        s_.detector = upd.detector;
        aligned = upd.aligned;
    }

    const Vec3 eye = frame.gaze.origin;
    bool pending_pinch = pinch_down;

    for (int guard = 0; guard < 12; ++guard) {
        bool again = false;
        switch (kind_of(s_.state)) {
        case StateKind::Idle: {
            if (auto tgt = resolve_target(frame.gaze)) {
                go(Hovering{*tgt});
                again = true;
            } else if (pending_pinch) {
                emit(EventType::FailedPinch);
                pending_pinch = false;
            }
            break;
        }
        case StateKind::Hovering: {
            auto tgt = resolve_target(frame.gaze);
            if (!tgt) {
                go(Idle{});
                again = true;
                break;
            }
            std::get<Hovering>(s_.state).target = *tgt;
            if (cfg_.mode == Technique::HandToGaze) {
                if (aligned && (!cfg_.summon_on_pinch || pending_pinch)) {
                    go(Summoning{summon_context(*tgt, frame.gaze, hand.position)});
                    again = true;
                } else if (pending_pinch) {
                    emit(EventType::FailedPinch);
                    pending_pinch = false;
                }
                break;
            }
            if (pending_pinch) {
                pending_pinch = false;
                const SceneObject &obj = scene_.at(*tgt);
                GrabState grab{hand, obj.pose, cd_ratio(eye, obj.pose.position, hand.position)};
                emit(EventType::GrabStart, *tgt, *tgt, Space::Far);
                go(IndirectManipulation{*tgt, grab});
                again = true;
            }
            break;
        }
        case StateKind::IndirectManipulation: {
            auto &im = std::get<IndirectManipulation>(s_.state);
            if (!pinch) {
                emit(EventType::GrabEnd, im.target, im.target, Space::Far);
                go(Hovering{im.target});
                again = true;
                break;
            }
            scene_.at(im.target).pose = apply_indirect_delta(im.grab, hand);
            if (cfg_.mode == Technique::GazeToHand && aligned) {
                const ObjectId target = im.target;
                ProxyBinding binding = summon_context(target, frame.gaze, hand.position);
                const ObjectId proxy = binding.member_map.at(target);
                GrabState grab{hand, scene_.at(proxy).pose, 1.0};
                emit(EventType::GrabStart, proxy, target, Space::Near, true);
                go(DirectManipulation{std::move(binding), proxy, grab});
            }
            break;
        }
        case StateKind::Summoning: {
            auto &sm = std::get<Summoning>(s_.state);
            if (!aligned) {
                const ProxyBinding binding = sm.binding;
                commit_back(binding);
                if (auto tgt = resolve_target(frame.gaze)) {
                    go(Hovering{*tgt});
                } else {
                    go(Idle{});
                }
                again = true;
                break;
            }
            if (pending_pinch) {
                pending_pinch = false;
                if (auto proxy = proxy_under_hand(sm.binding, hand.position)) {
                    GrabState grab{hand, scene_.at(*proxy).pose, 1.0};
                    emit(EventType::GrabStart, *proxy, *sm.binding.source_of(*proxy), Space::Near);
                    go(DirectManipulation{sm.binding, *proxy, grab});
                } else {
                    emit(EventType::FailedPinch);
                }
            }
            break;
        }
        case StateKind::DirectManipulation: {
            auto &dm = std::get<DirectManipulation>(s_.state);
            if (!pinch) {
                emit(EventType::GrabEnd, dm.proxy_id, *dm.binding.source_of(dm.proxy_id), Space::Near);
                go(Summoning{dm.binding});
                again = true;
                break;
            }
            scene_.at(dm.proxy_id).pose = apply_indirect_delta(dm.grab, hand);
            if (!cfg_.hide_far_on_summon) mirror(dm.binding);
            break;
        }
        }
        if (!again) break;
    }

    if (pinch_up) emit(EventType::PinchEnd);
    s_.pinch_held = pinch;
    return result();
}

StepResult Stepper::finish(std::int64_t t) {
    if (s_.last_t && t < *s_.last_t) {
        throw Error(ErrorCode::Sequencing, "finish at t=" + std::to_string(t) + " ms precedes the last frame");
    }
    t_ = t;
    std::visit(
        [&](auto &st) {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, IndirectManipulation>) {
                emit(EventType::GrabEnd, st.target, st.target, Space::Far);
            } else if constexpr (std::is_same_v<T, DirectManipulation>) {
                emit(EventType::GrabEnd, st.proxy_id, *st.binding.source_of(st.proxy_id), Space::Near);
                commit_back(st.binding);
            } else if constexpr (std::is_same_v<T, Summoning>) {
                commit_back(st.binding);
            }
        },
        s_.state);
    if (s_.pinch_held) emit(EventType::PinchEnd);
    s_.pinch_held = false;
    s_.state = Idle{};
    return result();
}

} // namespace

StepResult fsm_step(const EngineState &state, const EngineConfig &config, const InputFrame &frame,
                    const Scene &scene) {
    return Stepper(state, config, scene).step(frame);
}

StepResult fsm_finish(const EngineState &state, const EngineConfig &config, std::int64_t t, const Scene &scene) {
    return Stepper(state, config, scene).finish(t);
}

Engine::Engine(EngineConfig config, Scene scene)
    : config_(std::move(config)), scene_(std::move(scene)), state_(EngineState::initial(config_)) {
    config_.validate();
}

const std::vector<SemanticEvent> &Engine::tick(const InputFrame &frame) {
    StepResult r = fsm_step(state_, config_, frame, scene_);
    state_ = std::move(r.state);
    scene_ = std::move(r.scene);
    events_ = std::move(r.events);
    transitions_ = std::move(r.transitions);
    return events_;
}

const std::vector<SemanticEvent> &Engine::finish(std::int64_t t) {
    StepResult r = fsm_finish(state_, config_, t, scene_);
    state_ = std::move(r.state);
    scene_ = std::move(r.scene);
    events_ = std::move(r.events);
    transitions_.clear();
    return events_;
}

} // namespace sightwarp
