#include "sightwarp/docking.hpp"

#include <array>
#include <cmath>
#include <string>

#include "sightwarp/error.hpp"
#include "sightwarp/rng.hpp"

namespace sightwarp {

namespace {

constexpr std::array<std::string_view, 4> kDisplacementNames{"+X", "-X", "+Z", "-Z"};
constexpr std::array<std::string_view, 3> kAxisPairNames{"XY", "YZ", "XZ"};

// Williams design for three conditions: with an odd count, all six orders are
// needed for every condition to precede every other equally often.
constexpr std::array<std::array<Technique, 3>, 6> kTechniqueOrders{{
    {Technique::Baseline, Technique::GazeToHand, Technique::HandToGaze},
    {Technique::GazeToHand, Technique::HandToGaze, Technique::Baseline},
    {Technique::HandToGaze, Technique::Baseline, Technique::GazeToHand},
    {Technique::HandToGaze, Technique::GazeToHand, Technique::Baseline},
    {Technique::Baseline, Technique::HandToGaze, Technique::GazeToHand},
    {Technique::GazeToHand, Technique::Baseline, Technique::HandToGaze},
}};

} // namespace

std::string_view to_string(Displacement d) noexcept { return kDisplacementNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(AxisPair p) noexcept { return kAxisPairNames[static_cast<std::size_t>(p)]; }

std::optional<Displacement> displacement_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kDisplacementNames.size(); ++i) {
        if (kDisplacementNames[i] == s) return static_cast<Displacement>(i);
    }
    return std::nullopt;
}

std::optional<AxisPair> axis_pair_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kAxisPairNames.size(); ++i) {
        if (kAxisPairNames[i] == s) return static_cast<AxisPair>(i);
    }
    return std::nullopt;
}

Vec3 direction_of(Displacement d) noexcept {
    switch (d) {
    case Displacement::PosX: return {1, 0, 0};
    case Displacement::NegX: return {-1, 0, 0};
    case Displacement::PosZ: return {0, 0, 1};
    case Displacement::NegZ: return {0, 0, -1};
    }
    return {};
}

void TrialSpec::validate() const {
    if (object_size_deg != 7.5 && object_size_deg != 12.5) {
        throw Error(ErrorCode::Domain, "object_size_deg must be 7.5 or 12.5, got " + std::to_string(object_size_deg));
    }
    if (rotation_magnitude_deg != 45.0 && rotation_magnitude_deg != 90.0) {
        throw Error(ErrorCode::Domain,
                    "rotation_magnitude_deg must be 45 or 90, got " + std::to_string(rotation_magnitude_deg));
    }
    if ((sign_a != 1 && sign_a != -1) || (sign_b != 1 && sign_b != -1)) {
        throw Error(ErrorCode::Domain, "axis signs must be +1 or -1");
    }
    if (!(spawn_distance > 0.0)) throw Error(ErrorCode::Domain, "spawn_distance must be positive");
}

Vec3 TrialSpec::rotation_axis() const {
    Vec3 a;
    Vec3 b;
    switch (axis_pair) {
    case AxisPair::XY: a = Vec3::unit_x(); b = Vec3::unit_y(); break;
    case AxisPair::YZ: a = Vec3::unit_y(); b = Vec3::unit_z(); break;
    case AxisPair::XZ: a = Vec3::unit_x(); b = Vec3::unit_z(); break;
    }
    return normalize(a * sign_a + b * sign_b);
}

TrialState make_trial(const TrialSpec &spec, const Vec3 &eye) {
    spec.validate();
    const double w = width_from_angle(spec.object_size_deg, spec.spawn_distance);
    const Vec3 half{w / 2, w / 2, w / 2};

    TrialState t;
    t.width = w;
    t.object.id = std::string(kTrialObjectId);
    t.object.pose = {eye + Vec3::unit_z() * spec.spawn_distance, UnitQuat::identity()};
    t.object.half_extents = half;
    t.object.interactable = true;

    t.target.id = std::string(kTrialTargetId);
    t.target.pose.position = t.object.pose.position + direction_of(spec.displacement) * (2.0 * w);
    t.target.pose.orientation =
        UnitQuat::from_axis_angle(spec.rotation_axis(), spec.rotation_magnitude_deg) * t.object.pose.orientation;
    t.target.half_extents = half;
    t.target.interactable = false;
    return t;
}

Scene trial_scene(const TrialState &trial, const Vec3 &eye, const CompletionCriteria &criteria) {
    Scene s;
    s.eye = eye;
    s.add(trial.object);
    s.add(trial.target);
    s.trial = TrialBinding{trial.object.id, trial.target.id, trial.width, criteria.pos_frac, criteria.rot_deg,
                           criteria.dwell_ms};
    return s;
}

bool completion_conditions(const TrialState &trial, const CompletionCriteria &criteria) {
    const double offset = distance(trial.object.pose.position, trial.target.pose.position);
    const double angle = quat_angle(trial.object.pose.orientation, trial.target.pose.orientation);
    // the rotation bound is closed; absorb round-off from the quaternion product
    constexpr double kAngleSlackDeg = 1e-9;
    return offset < criteria.pos_frac * trial.width && angle <= criteria.rot_deg + kAngleSlackDeg;
}

TrialState completion_step(const TrialState &trial, std::int64_t now_ms, const CompletionCriteria &criteria) {
    TrialState next = trial;
    if (next.completed_at) return next;
    if (!completion_conditions(trial, criteria)) {
        next.hold_start.reset();
        next.dwell_elapsed = 0.0;
        return next;
    }
    if (!next.hold_start) next.hold_start = now_ms;
    const double held = static_cast<double>(now_ms - *next.hold_start);
    next.dwell_elapsed = std::min(held, criteria.dwell_ms);
    if (held >= criteria.dwell_ms) next.completed_at = now_ms;
    return next;
}

SessionPlan make_session(std::uint64_t participant_seed) {
    SessionPlan plan;
    plan.participant_seed = participant_seed;
    Rng rng(derive_seed(participant_seed, 0));

    const auto &order = kTechniqueOrders[participant_seed % kTechniqueOrders.size()];
    int block = 0;
    int index = 0;
    for (Technique technique : order) {
        struct Cell {
            double rotation;
            double size;
        };
        std::vector<Cell> cells{{45, 7.5}, {45, 12.5}, {90, 7.5}, {90, 12.5}};
        shuffle(cells, rng);
        for (const Cell &cell : cells) {
            std::vector<TrialSpec> specs;
            for (int d = 0; d < 4; ++d) {
                for (int p = 0; p < 3; ++p) {
                    TrialSpec s;
                    s.object_size_deg = cell.size;
                    s.rotation_magnitude_deg = cell.rotation;
                    s.displacement = static_cast<Displacement>(d);
                    s.axis_pair = static_cast<AxisPair>(p);
                    s.sign_a = uniform_index(rng, 2) ? 1 : -1;
                    s.sign_b = uniform_index(rng, 2) ? 1 : -1;
                    specs.push_back(s);
                }
            }
            shuffle(specs, rng);
            for (auto &s : specs) {
                s.seed = derive_seed(participant_seed, 1000 + static_cast<std::uint64_t>(index));
                plan.trials.push_back({index++, technique, block, s});
            }
            ++block;
        }
    }
    return plan;
}

} // namespace sightwarp
