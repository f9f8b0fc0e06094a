#include "sightwarp/agent.hpp"

#include <algorithm>
#include <cmath>

#include "sightwarp/error.hpp"
#include "sightwarp/rng.hpp"
#include "sightwarp/warp.hpp"

namespace sightwarp {

void AgentProfile::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(reaction_ms) || !positive(hand_speed) || !positive(wrist_speed_deg_s) ||
        !positive(frame_rate_hz) || !positive(eye_rate_hz) || !positive(horizon_ms)) {
        throw Error(ErrorCode::Config, "agent profile: times, speeds and rates must be positive");
    }
    if (!(rotation_per_grab_deg > 0.0 && rotation_per_grab_deg <= 180.0)) {
        throw Error(ErrorCode::Config, "agent profile: rotation_per_grab_deg must lie in (0, 180]");
    }
    if (!(gaze_noise_deg >= 0.0 && gaze_noise_deg < 10.0)) {
        throw Error(ErrorCode::Config, "agent profile: gaze_noise_deg must lie in [0, 10)");
    }
}

int grabs_needed(double rotation_deg, double rotation_per_grab_deg) {
    return std::max(1, static_cast<int>(std::ceil(rotation_deg / rotation_per_grab_deg - 1e-9)));
}

std::int64_t frame_time_ms(std::int64_t index, double rate_hz) {
    return std::llround(static_cast<double>(index) * 1000.0 / rate_hz);
}

namespace {

constexpr double kSettleMs = 150.0;
constexpr double kPauseMs = 100.0;
constexpr double kMinMoveMs = 250.0;
constexpr double kApproachDepth = 0.45;
// Relaxed hand beside the torso: 0.45 m from the eye, about 48 degrees below
// and right of straight ahead, well outside the alignment cone.
constexpr Vec3 kRestOffset{0.15, -0.30, 0.30};
// Idle gaze rests on the floor ahead, clear of the spawn point.
constexpr Vec3 kIdleGazeOffset{0.0, -1.0, 1.5};

double min_jerk(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }

class Script {
public:
    Script(const AgentProfile &profile, const Vec3 &eye, Rng &rng)
        : p_(profile), eye_(eye), rng_(rng), hand_{eye + kRestOffset, UnitQuat::identity()} {}

    void look_at(const Vec3 &point) {
        follow_hand_ = false;
        gaze_point_ = point;
    }
    void look_at_hand() { follow_hand_ = true; }
    void pinch(bool down) { pinch_ = down; }

    void hold(double ms) {
        const auto n = frames_for(ms);
        for (std::int64_t i = 0; i < n; ++i) emit();
    }
    void one_frame() { emit(); }

    void move(const Pose &to, double ms) {
        const Pose from = hand_;
        const auto n = frames_for(ms);
        for (std::int64_t i = 1; i <= n; ++i) {
            if (i == n) {
                hand_ = to;
            } else {
                const double s = min_jerk(static_cast<double>(i) / static_cast<double>(n));
                hand_.position = from.position + (to.position - from.position) * s;
                hand_.orientation = slerp(from.orientation, to.orientation, s);
            }
            emit();
        }
    }

    double duration(double distance_m, double angle_deg) const {
        // Minimum-jerk peak velocity is 1.875x the mean.
        return std::max({kMinMoveMs, 1000.0 * 1.875 * distance_m / p_.hand_speed,
                         1000.0 * 1.875 * angle_deg / p_.wrist_speed_deg_s});
    }

    const Pose &hand() const noexcept { return hand_; }
    const Vec3 &eye() const noexcept { return eye_; }
    std::vector<InputFrame> &frames() noexcept { return frames_; }

private:
    std::int64_t frames_for(double ms) const {
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ms * p_.frame_rate_hz / 1000.0)));
    }

    Vec3 jitter(const Vec3 &dir) {
        if (p_.gaze_noise_deg <= 0.0) return dir;
        const Vec3 helper = std::abs(dir.y) < 0.9 ? Vec3::unit_y() : Vec3::unit_x();
        const Vec3 u = normalize(cross(dir, helper));
        const Vec3 v = cross(dir, u);
        const double a = std::tan(deg_to_rad(uniform_range(rng_, -p_.gaze_noise_deg, p_.gaze_noise_deg)));
        const double b = std::tan(deg_to_rad(uniform_range(rng_, -p_.gaze_noise_deg, p_.gaze_noise_deg)));
        return normalize(dir + u * a + v * b);
    }

    void emit() {
        const std::int64_t t = frame_time_ms(index_, p_.frame_rate_hz);
        const auto sample = static_cast<std::int64_t>(std::floor(static_cast<double>(t) * p_.eye_rate_hz / 1000.0));
        if (sample != eye_sample_) {
            eye_sample_ = sample;
            const Vec3 goal = follow_hand_ ? hand_.position : gaze_point_;
            held_dir_ = jitter(normalize(goal - eye_));
        }
        InputFrame f;
        f.t = t;
        f.gaze = Ray(eye_, held_dir_);
        f.head = {eye_, UnitQuat::identity()};
        f.hand = hand_;
        f.pinch = pinch_;
        f.hand_valid = true;
        frames_.push_back(std::move(f));
        ++index_;
    }

    const AgentProfile &p_;
    Vec3 eye_;
    Rng &rng_;
    Pose hand_;
    bool pinch_{false};
    bool follow_hand_{false};
    Vec3 gaze_point_;
    Vec3 held_dir_{0, 0, 1};
    std::int64_t eye_sample_{-1};
    std::int64_t index_{0};
    std::vector<InputFrame> frames_;
};

// First frame at or after `from` where the engine's detector, run over the
// whole trace so far, reports alignment.
std::size_t first_aligned(const std::vector<InputFrame> &frames, const EngineConfig &config, std::size_t from) {
    AlignmentDetector det{config.alignment, false};
    for (std::size_t i = 0; i < frames.size(); ++i) {
        det = alignment_update(det, frames[i].gaze, frames[i].hand.position).detector;
        if (i >= from && det.aligned) return i;
    }
    throw Error(ErrorCode::Config, "agent: gaze and hand never aligned; check alignment thresholds");
}

Vec3 near_center_at(const InputFrame &f, const EngineConfig &config) {
    if (config.placement == Placement::AtHand) return f.hand.position;
    return f.gaze.origin + f.gaze.direction * distance(f.hand.position, f.gaze.origin);
}

struct NearPlan {
    UnitQuat step;    // per-grab proxy rotation
    Vec3 translation; // total proxy translation, done in the last grab
    int grabs{1};
    double step_deg{0.0};
};

void clutch(Script &sc, double step_deg) {
    sc.hold(kPauseMs);
    sc.pinch(false);
    sc.hold(kPauseMs);
    sc.move({sc.hand().position, UnitQuat::identity()}, sc.duration(0.0, step_deg));
    sc.hold(kPauseMs);
}

void final_hold(Script &sc, const CompletionCriteria &criteria) { sc.hold(criteria.dwell_ms + 2.0 * kSettleMs); }

// Grabs in near space; the hand sits on the grabbed proxy throughout.
void direct_phase(Script &sc, const NearPlan &plan, bool already_pinching) {
    sc.look_at_hand();
    for (int k = 1; k <= plan.grabs; ++k) {
        if (k > 1 || !already_pinching) {
            sc.pinch(true);
            sc.one_frame();
        }
        const Vec3 dp = k == plan.grabs ? plan.translation : Vec3{};
        const Pose to{sc.hand().position + dp, plan.step * sc.hand().orientation};
        sc.move(to, sc.duration(length(dp), plan.step_deg));
        if (k < plan.grabs) clutch(sc, plan.step_deg);
    }
    final_hold(sc, {});
}

} // namespace

std::vector<InputFrame> synthesize_trace(const TrialSpec &spec, const AgentProfile &profile,
                                         const EngineConfig &config, const Vec3 &eye) {
    profile.validate();
    config.validate();
    const TrialState trial = make_trial(spec, eye);
    Rng rng(derive_seed(spec.seed, profile.noise_seed));
    Script sc(profile, eye, rng);

    const Vec3 object = trial.object.pose.position;
    const Vec3 displacement = trial.target.pose.position - object;
    const int grabs = grabs_needed(spec.rotation_magnitude_deg, profile.rotation_per_grab_deg);
    const double step_deg = spec.rotation_magnitude_deg / grabs;
    const UnitQuat step = UnitQuat::from_axis_angle(spec.rotation_axis(), step_deg);

    sc.look_at(eye + kIdleGazeOffset);
    sc.hold(profile.reaction_ms * uniform_range(rng, 0.85, 1.15));
    sc.look_at(object);
    sc.hold(kSettleMs);

    switch (profile.technique) {
    case Technique::Baseline: {
        for (int k = 1; k <= grabs; ++k) {
            sc.pinch(true);
            sc.one_frame();
            const double gain = cd_ratio(eye, object, sc.hand().position);
            const Vec3 dh = k == grabs ? displacement / gain : Vec3{};
            sc.move({sc.hand().position + dh, step * sc.hand().orientation}, sc.duration(length(dh), step_deg));
            if (k < grabs) {
                clutch(sc, step_deg);
                sc.hold(kSettleMs);
            }
        }
        final_hold(sc, {});
        break;
    }
    case Technique::GazeToHand: {
        sc.pinch(true);
        sc.one_frame();
        const std::size_t pinch_frame = sc.frames().size() - 1;
        sc.hold(kPauseMs);
        sc.look_at_hand();
        sc.hold(kSettleMs);
        const InputFrame &f = sc.frames()[first_aligned(sc.frames(), config, pinch_frame)];
        const Vec3 near_center = near_center_at(f, config);
        const double scale =
            config.gaze_to_hand_scale ? *config.gaze_to_hand_scale : 1.0 / cd_ratio(eye, object, near_center);
        const UnitQuat &r = config.reorientation;
        NearPlan plan{r * step * r.inverse(), r.rotate(displacement) * scale, grabs, step_deg};
        direct_phase(sc, plan, true);
        break;
    }
    case Technique::HandToGaze: {
        const std::size_t approach_start = sc.frames().size();
        const Vec3 approach = eye + normalize(object - eye) * kApproachDepth;
        sc.move({approach, sc.hand().orientation}, sc.duration(distance(approach, sc.hand().position), 0.0));
        sc.hold(kSettleMs);
        Vec3 near_center;
        bool pinching = false;
        if (config.summon_on_pinch) {
            sc.pinch(true);
            sc.one_frame();
            near_center = near_center_at(sc.frames().back(), config);
            pinching = true;
        } else {
            near_center = near_center_at(sc.frames()[first_aligned(sc.frames(), config, approach_start)], config);
        }
        const double scale = 1.0 / cd_ratio(eye, object, near_center);
        const double far_radius = config.context_radius ? *config.context_radius
                                                        : default_context_radius(trial.object, config.context_rule);
        const double reach = std::min(trial.object.bounding_radius(), far_radius) * scale + config.grab_margin;
        if (distance(sc.hand().position, near_center) > reach) {
            // The proxy landed off the hand (along-gaze placement or an early
            // summon); reach over to it and pinch there.
            if (pinching) {
                sc.hold(kPauseMs);
                sc.pinch(false);
                pinching = false;
            }
            sc.move({near_center, sc.hand().orientation},
                    sc.duration(distance(near_center, sc.hand().position), 0.0));
            sc.hold(kPauseMs);
        }
        NearPlan plan{step, displacement * scale, grabs, step_deg};
        direct_phase(sc, plan, pinching);
        break;
    }
    }

    if (static_cast<double>(sc.frames().back().t) > profile.horizon_ms) {
        throw Error(ErrorCode::Config, "agent profile cannot finish the trial within the horizon");
    }
    return std::move(sc.frames());
}

} // namespace sightwarp
