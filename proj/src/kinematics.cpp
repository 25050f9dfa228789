#include "rangeloc/kinematics.hpp"

#include "rangeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace rangeloc {

bool AgentState::valid() const noexcept {
    return center.finite() && center_velocity.finite() && std::isfinite(radius) && radius >= 0.0 &&
           std::isfinite(omega) && std::isfinite(phase);
}

void validate_window(const Window& w) {
    if (!(w.period > 0.0) || !std::isfinite(w.period)) {
        throw Error(ErrorCode::InvalidArgument, "window period must be positive and finite");
    }
    if (w.sample_count < 2) {
        throw Error(ErrorCode::InvalidArgument, "window needs at least two samples");
    }
    int kmax = 0;
    for (int k : w.harmonics) kmax = std::max(kmax, std::abs(k));
    if (w.sample_count < 4 * kmax) {
        throw Error(ErrorCode::InvalidArgument,
                    "sample count " + std::to_string(w.sample_count) + " is below 4x the largest harmonic " +
                        std::to_string(kmax));
    }
}

Vec2 agent_position(const AgentState& a, double t) noexcept {
    const double angle = a.omega * t + a.phase;
    return a.center + a.center_velocity * t + a.radius * unit_at(angle);
}

DistanceTrace distance_trace(const AgentState& a, const AgentState& b, const Window& w) {
    validate_window(w);
    DistanceTrace trace;
    trace.samples.resize(static_cast<std::size_t>(w.sample_count));
    for (int m = 0; m < w.sample_count; ++m) {
        const double t = w.sample_time(m);
        trace.samples[static_cast<std::size_t>(m)] = (agent_position(b, t) - agent_position(a, t)).norm();
    }
    trace.closing_sample = (agent_position(b, w.period) - agent_position(a, w.period)).norm();
    return trace;
}

void add_measurement_noise(DistanceTrace& trace, double stddev, std::mt19937_64& rng) {
    if (stddev <= 0.0) return;
    std::normal_distribution<double> noise(0.0, stddev);
    for (double& z : trace.samples) z = std::max(0.0, z + noise(rng));
    if (trace.closing_sample) *trace.closing_sample = std::max(0.0, *trace.closing_sample + noise(rng));
}

AnalysisFrame analysis_frame(const AgentState& a, const AgentState& b) {
    const Vec2 baseline = b.center - a.center;
    const double separation = baseline.norm();
    if (separation == 0.0) {
        throw Error(ErrorCode::CoincidentCenters, "analysis frame undefined: circle centers coincide");
    }
    AnalysisFrame f;
    f.origin = a.center;
    f.rotation = -std::atan2(baseline.y, baseline.x);
    f.separation = separation;
    f.first_phase = wrap_angle(a.phase + f.rotation);
    f.second_phase = wrap_angle(b.phase + f.rotation);
    return f;
}

int harmonic_index(double omega, double period, double tolerance) {
    const double k = omega * period / (2.0 * M_PI);
    const double nearest = std::round(k);
    if (std::abs(k - nearest) > tolerance) {
        throw Error(ErrorCode::InvalidArgument,
                    "omega " + std::to_string(omega) + " is not commensurate with window period " +
                        std::to_string(period) + " (k = " + std::to_string(k) + ")");
    }
    return static_cast<int>(nearest);
}

}  // namespace rangeloc
