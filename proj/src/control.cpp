#include "rangeloc/control.hpp"

#include "rangeloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace rangeloc {

void FormationGraph::validate() {
    if (agent_count < 2) throw ValidationError("graph needs at least two agents");
    std::set<std::pair<int, int>> seen;
    for (Edge& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= agent_count || e.j >= agent_count) {
            throw ValidationError(fmt::format("edge ({}, {}) references a missing agent", e.i + 1, e.j + 1));
        }
        if (e.i == e.j) throw ValidationError(fmt::format("self-loop on agent {}", e.i + 1));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (!seen.insert({e.i, e.j}).second) {
            throw ValidationError(fmt::format("duplicate edge ({}, {})", e.i + 1, e.j + 1));
        }
        if (e.desired_distance && !(*e.desired_distance > 0.0 && std::isfinite(*e.desired_distance))) {
            throw ValidationError(fmt::format("edge ({}, {}) desired distance must be positive", e.i + 1, e.j + 1));
        }
    }
    std::vector<int> stack{0};
    std::vector<bool> reached(static_cast<std::size_t>(agent_count), false);
    reached[0] = true;
    while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b : neighbors(a)) {
            if (!reached[static_cast<std::size_t>(b)]) {
                reached[static_cast<std::size_t>(b)] = true;
                stack.push_back(b);
            }
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end()) {
        throw ValidationError("interaction graph is not connected");
    }
}

std::vector<int> FormationGraph::neighbors(int agent) const {
    std::vector<int> out;
    for (const Edge& e : edges) {
        if (e.i == agent) out.push_back(e.j);
        else if (e.j == agent) out.push_back(e.i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int FormationGraph::max_degree() const {
    int best = 0;
    for (int a = 0; a < agent_count; ++a) best = std::max(best, static_cast<int>(neighbors(a).size()));
    return best;
}

std::optional<std::string> gain_warning(const ControllerGains& g, const FormationGraph& graph) {
    const double product = g.eps1 * g.period * graph.max_degree();
    if (product < 1.0) return std::nullopt;
    return fmt::format("eps1*T*max_degree = {:.4g} >= 1; the consensus step may not contract", product);
}

double adaptive_radius(const std::vector<double>& neighbor_speed_norms, double alpha) {
    if (neighbor_speed_norms.empty()) throw Error(ErrorCode::EmptyNeighborhood, "agent has no neighbors");
    return alpha * *std::max_element(neighbor_speed_norms.begin(), neighbor_speed_norms.end());
}

Vec2 consensus_shape_update(Vec2 v, const std::vector<NeighborTerm>& neighbors, const ControllerGains& g) {
    Vec2 consensus;
    Vec2 shape;
    for (const NeighborTerm& n : neighbors) {
        consensus += n.relative_velocity;
        if (n.use_shape) {
            const double gap = n.desired_distance * n.desired_distance - n.distance * n.distance;
            shape += gap * (-n.relative_position);
        }
    }
    return v + (g.eps1 * g.period) * consensus + (2.0 * g.eps2 * g.period) * shape;
}

Eigen::MatrixXd laplacian(const FormationGraph& g) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.agent_count, g.agent_count);
    for (const Edge& e : g.edges) {
        l(e.i, e.j) -= 1.0;
        l(e.j, e.i) -= 1.0;
        l(e.i, e.i) += 1.0;
        l(e.j, e.j) += 1.0;
    }
    return l;
}

Eigen::VectorXd laplacian_spectrum(const FormationGraph& g) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(laplacian(g), Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace rangeloc
