#pragma once

#include "rangeloc/vec2.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rangeloc {

inline constexpr int kDefaultSampleCount = 4096;

/// One agent: a circle center translating at constant velocity, and the agent
/// itself riding that circle. Phase is the angular position at window start,
/// measured in the agent's working frame.
struct AgentState {
    Vec2 center;
    Vec2 center_velocity;
    double radius{0.0};  ///< m, >= 0
    double omega{0.0};   ///< rad/s, counter-clockwise positive
    double phase{0.0};   ///< rad

    bool valid() const noexcept;
    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Measurement window. `harmonics` holds k = omega*T/(2 pi) for the agents
/// taking part, rounded to integers in commensurate mode.
struct Window {
    double period{0.0};
    int sample_count{kDefaultSampleCount};
    std::vector<int> harmonics;

    double sample_time(int m) const noexcept { return period * m / sample_count; }
};

/// Throws Error(InvalidArgument) if period <= 0, sample_count < 2, or the
/// sample count leaves less than a 4x margin over the largest harmonic.
void validate_window(const Window& w);

/// Uniform samples z(mT/M), m = 0..M-1, plus the distance at t = T, which is
/// the first sample of the following window. The closing sample lets the
/// spectrum treat the periodic-extension jump at the window edge exactly.
struct DistanceTrace {
    std::vector<double> samples;
    std::optional<double> closing_sample;

    std::size_t size() const noexcept { return samples.size(); }
};

Vec2 agent_position(const AgentState& a, double t) noexcept;

/// Distance between the two agents over one window, t measured from window
/// start. Both states must be expressed in a common frame.
DistanceTrace distance_trace(const AgentState& a, const AgentState& b, const Window& w);

/// Zero-mean Gaussian noise on every sample (closing sample included), drawn in
/// sample order. Negative results are clamped to zero.
void add_measurement_noise(DistanceTrace& trace, double stddev, std::mt19937_64& rng);

/// Pair frame: origin at a's center, x-axis through b's center.
struct AnalysisFrame {
    Vec2 origin;
    double rotation{0.0};      ///< world -> frame rotation angle
    double separation{0.0};    ///< distance between the centers
    double first_phase{0.0};   ///< a's phase seen in this frame
    double second_phase{0.0};  ///< b's phase seen in this frame

    Vec2 to_frame(Vec2 world_point) const noexcept { return (world_point - origin).rotated(rotation); }
    Vec2 direction_to_frame(Vec2 world_vector) const noexcept { return world_vector.rotated(rotation); }
};

/// Throws Error(CoincidentCenters) when both centers coincide.
AnalysisFrame analysis_frame(const AgentState& a, const AgentState& b);

/// Integer k with |omega*T/2pi - k| <= tolerance; throws Error(InvalidArgument)
/// when the frequency is not commensurate with the window at that tolerance.
int harmonic_index(double omega, double period, double tolerance);

}  // namespace rangeloc
