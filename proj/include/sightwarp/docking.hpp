#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sightwarp/fsm.hpp"
#include "sightwarp/geom.hpp"
#include "sightwarp/scene.hpp"

namespace sightwarp {

enum class Displacement { PosX, NegX, PosZ, NegZ };
enum class AxisPair { XY, YZ, XZ };

std::string_view to_string(Displacement d) noexcept;
std::string_view to_string(AxisPair p) noexcept;
std::optional<Displacement> displacement_from_string(std::string_view s) noexcept;
std::optional<AxisPair> axis_pair_from_string(std::string_view s) noexcept;
Vec3 direction_of(Displacement d) noexcept;

/// One 6DOF docking trial.
struct TrialSpec {
    double object_size_deg{7.5};         // 7.5 or 12.5
    double rotation_magnitude_deg{45.0}; // 45 or 90
    Displacement displacement{Displacement::PosX};
    AxisPair axis_pair{AxisPair::XY};
    int sign_a{1}; // sign on the first axis of the pair
    int sign_b{1}; // sign on the second
    double spawn_distance{2.0};
    std::uint64_t seed{0};

    void validate() const;
    Vec3 rotation_axis() const;
    bool operator==(const TrialSpec &) const noexcept = default;
};

struct CompletionCriteria {
    double pos_frac{0.2};  // of the object width, strict
    double rot_deg{15.0};  // closed
    double dwell_ms{300.0};
};

struct TrialState {
    SceneObject object;
    SceneObject target; // not interactable
    double width{0.0};  // W: metric width realizing the nominal visual angle
    double dwell_elapsed{0.0};
    std::optional<std::int64_t> hold_start;
    std::optional<std::int64_t> completed_at;
};

inline constexpr std::string_view kTrialObjectId = "object";
inline constexpr std::string_view kTrialTargetId = "target";

/// Object straight ahead of the eye at the spawn distance; target offset by
/// 2W along the displacement direction and rotated about the signed diagonal
/// of the axis pair.
TrialState make_trial(const TrialSpec &spec, const Vec3 &eye);

/// Scene holding the trial's object and target, annotated with the trial binding.
Scene trial_scene(const TrialState &trial, const Vec3 &eye, const CompletionCriteria &criteria = {});

bool completion_conditions(const TrialState &trial, const CompletionCriteria &criteria = {});

/// Advances the dwell timer for one frame at now_ms. Idempotent once completed.
TrialState completion_step(const TrialState &trial, std::int64_t now_ms, const CompletionCriteria &criteria = {});

struct SessionEntry {
    int index{0};
    Technique technique{Technique::Baseline};
    int block{0}; // 0..11 in presentation order
    TrialSpec spec;

    bool operator==(const SessionEntry &) const noexcept = default;
};

struct SessionPlan {
    std::uint64_t participant_seed{0};
    std::vector<SessionEntry> trials;
};

inline constexpr int kTrialsPerBlock = 12;
inline constexpr int kBlocksPerSession = 12;

/// 3 techniques x 2 rotations x 2 sizes blocks of 12 trials (4 displacements x
/// 3 axis pairs). Technique order follows a balanced Latin square row chosen by
/// the seed; block and trial order are shuffled by the seed.
SessionPlan make_session(std::uint64_t participant_seed);

} // namespace sightwarp
