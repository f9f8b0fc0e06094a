#pragma once

#include <cstdint>
#include <vector>

#include "sightwarp/docking.hpp"
#include "sightwarp/fsm.hpp"
#include "sightwarp/input_frame.hpp"

namespace sightwarp {

/// Scripted stand-in for a participant.
struct AgentProfile {
    double reaction_ms{250.0};
    double hand_speed{0.5};            // m/s, peak-speed budget for reaches
    double wrist_speed_deg_s{120.0};   // deg/s, same for wrist turns
    double rotation_per_grab_deg{60.0}; // comfortable wrist turn before clutching
    Technique technique{Technique::HandToGaze};
    std::uint64_t noise_seed{1};
    double gaze_noise_deg{0.3}; // per-axis bound on eye-sample jitter
    double frame_rate_hz{90.0};
    double eye_rate_hz{30.0};
    double horizon_ms{30000.0};

    // Throws Config on non-positive rates, speeds or times.
    void validate() const;
};

inline const Vec3 kDefaultEye{0.0, 1.6, 0.0};

/// Number of pinches the agent spends on a rotation of `rotation_deg`.
int grabs_needed(double rotation_deg, double rotation_per_grab_deg);

/// Frame timestamps in ms for a given rate: round(i * 1000 / rate).
std::int64_t frame_time_ms(std::int64_t index, double rate_hz);

/// Emits a trace that docks the trial's object under profile.technique.
///
/// Motion model: minimum-jerk reaches, slerped wrist turns, gaze that jumps
/// after a reaction delay and is sampled at the eye-tracker rate then held on
/// the frame grid. The agent plans with the same gain and mapping the engine
/// applies. A rotation larger than rotation_per_grab_deg is split into equal
/// parts with a release, wrist unwind and re-grab between them; translation is
/// done during the last grab. Deterministic given the trial seed and noise_seed.
std::vector<InputFrame> synthesize_trace(const TrialSpec &trial, const AgentProfile &profile,
                                         const EngineConfig &config, const Vec3 &eye = kDefaultEye);

} // namespace sightwarp
