#pragma once

#include "rangeloc/vec2.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace rangeloc {

struct Edge {
    int i{0};  ///< 0-based, i < j after validation
    int j{0};
    std::optional<double> desired_distance;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected interaction graph with optional desired center distances.
struct FormationGraph {
    int agent_count{0};
    std::vector<Edge> edges;

    /// Throws ValidationError: fewer than two agents, out-of-range or
    /// self-loop edges, duplicate edges, non-positive distances, disconnected.
    /// Normalises every edge to i < j.
    void validate();
    std::vector<int> neighbors(int agent) const;
    int max_degree() const;

    friend bool operator==(const FormationGraph&, const FormationGraph&) = default;
};

struct ControllerGains {
    double eps1{0.0};
    double eps2{0.0};
    double alpha{0.0};
    double period{0.0};

    friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

/// Empty when eps1 T maxdeg < 1; otherwise a human-readable warning.
std::optional<std::string> gain_warning(const ControllerGains& g, const FormationGraph& graph);

/// alpha * max(norms). Throws Error(EmptyNeighborhood) for an empty list.
double adaptive_radius(const std::vector<double>& neighbor_speed_norms, double alpha);

/// Agent i's view of one neighbor j, working frame.
struct NeighborTerm {
    Vec2 relative_velocity;  ///< v_j - v_i
    Vec2 relative_position;  ///< p_j - p_i
    double distance{0.0};
    double desired_distance{0.0};
    bool use_shape{true};  ///< false skips this edge's shape term
};

/// v + eps1 T sum(v_ij) + 2 eps2 T sum((d*^2 - d^2)(p_i - p_j)).
Vec2 consensus_shape_update(Vec2 v, const std::vector<NeighborTerm>& neighbors, const ControllerGains& g);

inline Vec2 position_advance(Vec2 p, Vec2 v, double period) noexcept { return p + period * v; }

Eigen::MatrixXd laplacian(const FormationGraph& g);

/// Ascending eigenvalues of the Laplacian.
Eigen::VectorXd laplacian_spectrum(const FormationGraph& g);

}  // namespace rangeloc
