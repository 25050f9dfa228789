#pragma once

#include "rangeloc/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rangeloc {

/// Drift and sideband constants of one window. `quadratic` ~ |V|^2 T^2/(2 pi^2),
/// `linear` ~ (|V|^2 T^2 + 2 v_x d T)/(2 pi), `own_sideband` and
/// `neighbor_sideband` are the complex amplitudes of the linear-times-rotation
/// terms. The real parts of the first two are the physical values; imaginary
/// parts only absorb noise.
struct SolveBlock {
    Complex quadratic;
    Complex linear;
    Complex own_sideband;
    Complex neighbor_sideband;
    std::vector<int> indices;
};

/// What an agent knows about itself when it estimates a neighbor.
struct OwnMotion {
    int harmonic{0};     ///< signed k1
    double radius{0.0};  ///< r1 during the window
    double phase{0.0};   ///< own phase at window start, working frame
};

/// Estimate of one neighbor in the pair analysis frame.
struct NeighborEstimate {
    double distance{0.0};
    double own_phase{0.0};  ///< phi1 in (-pi, pi]
    Vec2 relative_velocity;  ///< neighbor center velocity minus own
    int neighbor_harmonic{0};
    double neighbor_omega{0.0};
    double speed_norm{0.0};
    double residual{0.0};
};

struct FrameLink {
    double rotation{0.0};  ///< analysis frame -> working frame

    Vec2 to_working(Vec2 v) const noexcept { return v.rotated(rotation); }
    /// Neighbor center offset from own center, working frame.
    Vec2 offset(double distance) const noexcept { return distance * unit_at(rotation); }
};

struct PeakIdentification {
    int magnitude{0};
    std::vector<int> sign_candidates;  ///< +1 and/or -1
};

struct IdentifyOptions {
    double peak_factor{5.0};
};

/// Least-squares fit of the drift and sideband model over `indices`, using
/// sampled kernels matched to the spectrum's sample count. Works for either
/// sign of k1 and k2. Throws Error(IndexClash) for inadmissible indices,
/// Error(SingularSystem) if the system loses rank.
SolveBlock solve_drift_and_sidebands(const Spectrum& s, int k1, int k2, std::span<const int> indices);

/// Finds |k2| from the peak structure. Throws Error(NoPeak) when no index
/// carries a neighbor peak, Error(AmbiguousSpectrum) when the spectrum points to
/// a neighbor rotating at |k2| = |k1|.
PeakIdentification identify_neighbor_harmonic(const Spectrum& s, int k1, double own_radius,
                                              const IdentifyOptions& options = {});

/// Distance, own phase and relative velocity from a solved block. The residual
/// is the model mismatch over admissible indices the block did not use,
/// relative to the norm of c_1..c_nmax. Throws Error(DegenerateRadius) if r1 is
/// zero or below 1e-9 sqrt(|c_0|).
NeighborEstimate recover_state(const Spectrum& s, const SolveBlock& blk, int k1, int k2, double r1);

/// Solve rows: the first `rows` admissible indices when rows > 0, otherwise
/// every other admissible index up to n_max (the rest stay out for the
/// residual). Spanning the peaks keeps the sideband columns apart when the
/// harmonics are large. Throws Error(IndexOverflow) below four rows.
std::vector<int> solve_indices(int k1, int k2, int n_max, int rows = 0);

/// Solves and recovers under each candidate sign of k2 and keeps the smaller
/// residual. Throws Error(AmbiguousSign) if the residuals differ by <= 1e-9.
NeighborEstimate resolve_neighbor_sign(const Spectrum& s, int k1, int k2_magnitude, double r1,
                                       std::span<const int> signs = {}, int solve_rows = 0);

/// pi * sqrt(2 max(Re R, 0)) / T.
double speed_norm_from_quadratic(Complex quadratic, double period) noexcept;

/// Shortest T = m 2pi/|omega1| with |omega2| T / 2pi within `tol` of an integer.
/// Throws Error(NoWindow) if none fits in T_max.
Window choose_window(double omega1, double omega2_abs, double tol, double max_period,
                     int sample_count = kDefaultSampleCount);

FrameLink frame_link(double own_phase, double phi1_hat) noexcept;

/// Neither agent rotating: z^2 = d^2 + 2 d v_x t + |v|^2 t^2. Only the
/// magnitude of the cross-track component is observable.
struct LinearMotionEstimate {
    double distance{0.0};
    double along_track{0.0};
    double cross_track_magnitude{0.0};
    double speed_norm{0.0};
};

LinearMotionEstimate estimate_linear_motion(const Spectrum& s);

/// Fallback relative speed when full recovery fails: fits the drift and
/// sidebands under every neighbor harmonic up to (max_index - 12) / 2, and
/// none, and reads R from the best fit.
double estimate_speed_norm(const Spectrum& s, int k1);

struct EstimateOptions {
    int max_index{0};                   ///< 0: derived from the neighbor bound
    int max_neighbor_harmonic{0};       ///< bound on |k2| when it is unknown
    std::optional<int> neighbor_harmonic;  ///< signed k2, when known
    int known_sign{0};                  ///< +1/-1 fixes the sign of an identified k2
    int solve_rows{0};  ///< see solve_indices
    IdentifyOptions identify;
};

/// Full per-window pipeline from a distance trace.
NeighborEstimate estimate_neighbor(const DistanceTrace& trace, const Window& w, const OwnMotion& own,
                                   const EstimateOptions& options);

}  // namespace rangeloc
