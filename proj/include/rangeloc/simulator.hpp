#pragma once

#include "rangeloc/control.hpp"
#include "rangeloc/errors.hpp"
#include "rangeloc/kinematics.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rangeloc {

enum class ControlMode { ConsensusOnly, ConsensusAndShape };

struct PerturbationEvent {
    int round{0};  ///< applied at t = round * T, before that round's window
    int agent{0};  ///< 0-based
    Vec2 delta_v;

    friend bool operator==(const PerturbationEvent&, const PerturbationEvent&) = default;
};

/// Agents start with `radius` as r_i(0) and `phase` as phi_i(0), world frame.
struct Scenario {
    std::vector<AgentState> agents;
    FormationGraph graph;
    ControllerGains gains;
    int windows{1};
    std::vector<PerturbationEvent> events;
    double noise_std{0.0};
    ControlMode mode{ControlMode::ConsensusAndShape};
    bool omega_sign_known{false};
    std::uint64_t seed{1};
    int sample_count{kDefaultSampleCount};
    double commensurability_tolerance{1e-9};

    /// Throws ValidationError naming the violated invariant. Normalises the
    /// graph edges to i < j.
    void validate();
    /// k_i = omega_i T / 2 pi, rounded. Call after validate().
    std::vector<int> harmonics() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct AgentRow {
    int round{0};
    int agent{0};
    Vec2 center;
    Vec2 velocity;
    double radius{0.0};
};

/// Estimates are the lower-index agent's view, in its working frame. Fields
/// that the estimator could not produce this round are NaN.
struct EdgeRow {
    int round{0};
    int i{0};
    int j{0};
    double d_true{0.0};
    double d_hat{0.0};
    Vec2 vij_true;
    Vec2 vij_hat;
    double residual{0.0};
    std::optional<ErrorCode> failure;
};

struct RoundRow {
    int round{0};
    double disagreement{0.0};  ///< max over agent pairs of |v_i - v_j|
    double shape_error{0.0};   ///< max over edges with d* of |d_ij - d*|
    double radius_jump{0.0};   ///< max over agents of |r_i(k) - r_i(k-1)|
    int failures{0};           ///< endpoint estimates that failed
};

struct TimeSeries {
    int agent_count{0};
    std::vector<AgentRow> agents;
    std::vector<EdgeRow> edges;
    std::vector<RoundRow> rounds;
    std::optional<int> diverged_at;  ///< round whose update left the finite range
};

struct RunOptions {
    bool exact_measurements{false};  ///< feed ground truth to the controller
};

/// Closed-loop episode. Deterministic for a given scenario (seed included).
TimeSeries run(Scenario scenario, const RunOptions& options = {});

/// Continuous-time law on the centers with true states, RK4 at step T/256,
/// sampled at every window boundary. Events are applied at their boundaries.
TimeSeries reference_continuous_run(Scenario scenario);

}  // namespace rangeloc
