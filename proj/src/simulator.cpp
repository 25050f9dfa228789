#include "rangeloc/simulator.hpp"

#include "rangeloc/estimator.hpp"
#include "rangeloc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace rangeloc {

namespace {

constexpr double kBlowUp = 1e12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool state_ok(const std::vector<AgentState>& agents) {
    return std::all_of(agents.begin(), agents.end(), [](const AgentState& a) {
        return a.center.finite() && a.center_velocity.finite() && std::isfinite(a.radius) &&
               std::abs(a.center.x) < kBlowUp && std::abs(a.center.y) < kBlowUp &&
               std::abs(a.center_velocity.x) < kBlowUp && std::abs(a.center_velocity.y) < kBlowUp;
    });
}

void apply_events(const Scenario& s, int round, std::vector<AgentState>& agents) {
    for (const PerturbationEvent& e : s.events) {
        if (e.round == round) agents[static_cast<std::size_t>(e.agent)].center_velocity += e.delta_v;
    }
}

// Agent rows plus the round's disagreement and shape metrics.
RoundRow record_round(const Scenario& s, int round, const std::vector<AgentState>& agents,
                      const std::vector<double>& previous_radius, TimeSeries& ts) {
    RoundRow r;
    r.round = round;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        ts.agents.push_back({round, static_cast<int>(i), a.center, a.center_velocity, a.radius});
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            r.disagreement = std::max(r.disagreement, (agents[j].center_velocity - a.center_velocity).norm());
        }
        if (!previous_radius.empty()) r.radius_jump = std::max(r.radius_jump, std::abs(a.radius - previous_radius[i]));
    }
    for (const Edge& e : s.graph.edges) {
        if (!e.desired_distance) continue;
        const double d = (agents[static_cast<std::size_t>(e.j)].center - agents[static_cast<std::size_t>(e.i)].center).norm();
        r.shape_error = std::max(r.shape_error, std::abs(d - *e.desired_distance));
    }
    return r;
}

// Agent i's working-frame picture of neighbor j for one window.
struct View {
    Vec2 relative_velocity;
    Vec2 relative_position;
    double distance{0.0};
    double speed{0.0};
    double residual{0.0};
};

struct Slot {
    std::optional<View> last;  // most recent successful estimate
};

}  // namespace

void Scenario::validate() {
    if (agents.size() < 2) throw ValidationError("scenario needs at least two agents");
    if (static_cast<int>(agents.size()) != graph.agent_count) {
        throw ValidationError("graph agent count does not match the agent list");
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!agents[i].valid()) throw ValidationError(fmt::format("agent {} has a negative radius or non-finite field", i + 1));
    }
    if (windows < 1) throw ValidationError("windows must be at least 1");
    if (!(gains.period > 0.0) || !std::isfinite(gains.period)) throw ValidationError("T must be positive");
    if (!(gains.eps1 > 0.0)) throw ValidationError("eps1 must be positive");
    if (!(gains.eps2 >= 0.0)) throw ValidationError("eps2 must be non-negative");
    if (!(gains.alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ValidationError("noise_std must be non-negative");
    if (sample_count < 2) throw ValidationError("samples must be at least 2");
    graph.validate();
    for (const PerturbationEvent& e : events) {
        if (e.round < 0 || e.round >= windows) {
            throw ValidationError(fmt::format("event round {} outside the episode [0, {})", e.round, windows));
        }
        if (e.agent < 0 || e.agent >= graph.agent_count) {
            throw ValidationError(fmt::format("event references missing agent {}", e.agent + 1));
        }
        if (!e.delta_v.finite()) throw ValidationError("event velocity change must be finite");
    }

    std::vector<int> k;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        try {
            k.push_back(harmonic_index(agents[i].omega, gains.period, commensurability_tolerance));
        } catch (const Error& err) {
            throw ValidationError(fmt::format("agent {}: {}", i + 1, err.what()));
        }
    }
    int kmax = 0;
    for (int h : k) kmax = std::max(kmax, std::abs(h));
    if (sample_count < 4 * kmax || 2 * (2 * kmax + 12) >= sample_count) {
        throw ValidationError(fmt::format("samples = {} too few for harmonics up to {}", sample_count, kmax));
    }
    for (const Edge& e : graph.edges) {
        const int a = k[static_cast<std::size_t>(e.i)];
        const int b = k[static_cast<std::size_t>(e.j)];
        const int x = std::abs(a - b);
        if (a == 0 || b == 0 || std::abs(a) == std::abs(b) || x == std::abs(a) || x == std::abs(b)) {
            throw ValidationError(fmt::format(
                "edge ({}, {}) violates frequency admissibility: k = {}, {}, |k_i - k_j| = {} must be distinct and nonzero",
                e.i + 1, e.j + 1, a, b, x));
        }
    }
}

std::vector<int> Scenario::harmonics() const {
    std::vector<int> k;
    for (const AgentState& a : agents) k.push_back(static_cast<int>(std::lround(a.omega * gains.period / (2.0 * M_PI))));
    return k;
}

TimeSeries run(Scenario s, const RunOptions& options) {
    s.validate();
    const std::size_t n = s.agents.size();
    const double T = s.gains.period;
    const std::vector<int> k = s.harmonics();
    int kmax = 0;
    for (int h : k) kmax = std::max(kmax, std::abs(h));

    ControllerGains gains = s.gains;
    if (s.mode == ControlMode::ConsensusOnly) gains.eps2 = 0.0;

    std::mt19937_64 rng(s.seed);
    std::vector<AgentState> agents = s.agents;
    std::vector<double> previous_radius;
    // slots[i][j]: agent i's memory of neighbor j.
    std::vector<std::vector<Slot>> slots(n, std::vector<Slot>(n));

    TimeSeries ts;
    ts.agent_count = static_cast<int>(n);
    for (int round = 0; round < s.windows; ++round) {
        apply_events(s, round, agents);
        RoundRow row = record_round(s, round, agents, previous_radius, ts);

        std::vector<std::vector<NeighborTerm>> terms(n);
        std::vector<std::vector<double>> speeds(n);
        for (const Edge& e : s.graph.edges) {
            const auto i = static_cast<std::size_t>(e.i);
            const auto j = static_cast<std::size_t>(e.j);
            Window w;
            w.period = T;
            w.sample_count = s.sample_count;
            w.harmonics = {k[i], k[j]};
            DistanceTrace trace;
            if (!options.exact_measurements) {
                trace = distance_trace(agents[i], agents[j], w);
                add_measurement_noise(trace, s.noise_std, rng);
            }

            EdgeRow er;
            er.round = round;
            er.i = e.i;
            er.j = e.j;
            er.d_true = (agents[j].center - agents[i].center).norm();
            er.vij_true = agents[j].center_velocity - agents[i].center_velocity;

            for (auto [self, other] : {std::pair{i, j}, std::pair{j, i}}) {
                const AgentState& me = agents[self];
                const AgentState& them = agents[other];
                std::optional<View> view;
                std::optional<ErrorCode> failure;
                double fallback_speed = kNaN;
                if (options.exact_measurements) {
                    View v;
                    v.relative_velocity = them.center_velocity - me.center_velocity;
                    v.relative_position = them.center - me.center;
                    v.distance = v.relative_position.norm();
                    v.speed = v.relative_velocity.norm();
                    view = v;
                } else {
                    EstimateOptions eo;
                    eo.max_neighbor_harmonic = kmax;
                    if (s.omega_sign_known) eo.known_sign = k[other] > 0 ? 1 : -1;
                    try {
                        const NeighborEstimate est =
                            estimate_neighbor(trace, w, {k[self], me.radius, me.phase}, eo);
                        const FrameLink link = frame_link(me.phase, est.own_phase);
                        View v;
                        v.relative_velocity = link.to_working(est.relative_velocity);
                        v.relative_position = link.offset(est.distance);
                        v.distance = est.distance;
                        v.speed = est.speed_norm;
                        v.residual = est.residual;
                        view = v;
                    } catch (const Error& err) {
                        failure = err.code();
                        try {
                            const Spectrum sp = spectrum_of_squared_trace(trace, w, 2 * kmax + 12);
                            fallback_speed = estimate_speed_norm(sp, k[self]);
                        } catch (const Error&) {
                        }
                    }
                }

                Slot& slot = slots[self][other];
                NeighborTerm term;
                term.desired_distance = e.desired_distance.value_or(0.0);
                double speed = 0.0;
                if (view) {
                    slot.last = view;
                    term.relative_velocity = view->relative_velocity;
                    term.relative_position = view->relative_position;
                    term.distance = view->distance;
                    term.use_shape = e.desired_distance.has_value();
                    speed = view->speed;
                } else {
                    ++row.failures;
                    term.use_shape = false;
                    if (std::isfinite(fallback_speed)) speed = fallback_speed;
                    else if (slot.last) speed = slot.last->speed;
                    if (slot.last) {
                        // Last direction, current speed when the fallback measured one.
                        term.relative_velocity = slot.last->relative_velocity;
                        const double old = term.relative_velocity.norm();
                        if (std::isfinite(fallback_speed)) {
                            term.relative_velocity = old > 0.0 ? (fallback_speed / old) * term.relative_velocity : Vec2{};
                        }
                    }
                }
                terms[self].push_back(term);
                speeds[self].push_back(speed);

                if (self == i) {
                    er.failure = failure;
                    if (view) {
                        er.d_hat = view->distance;
                        er.vij_hat = view->relative_velocity;
                        er.residual = view->residual;
                    } else {
                        er.d_hat = kNaN;
                        er.vij_hat = {kNaN, kNaN};
                        er.residual = kNaN;
                    }
                }
            }
            ts.edges.push_back(er);
        }
        ts.rounds.push_back(row);

        previous_radius.clear();
        std::vector<AgentState> next = agents;
        for (std::size_t i = 0; i < n; ++i) {
            previous_radius.push_back(agents[i].radius);
            next[i].radius = adaptive_radius(speeds[i], gains.alpha);
            next[i].center_velocity = consensus_shape_update(agents[i].center_velocity, terms[i], gains);
            next[i].center = position_advance(agents[i].center, agents[i].center_velocity, T);
            next[i].phase = wrap_angle(agents[i].phase + agents[i].omega * T);
        }
        agents = std::move(next);
        if (!state_ok(agents)) {
            ts.diverged_at = round;
            break;
        }
    }
    return ts;
}

TimeSeries reference_continuous_run(Scenario s) {
    s.validate();
    const std::size_t n = s.agents.size();
    const double T = s.gains.period;
    const int steps = 256;
    const double h = T / steps;
    const double eps1 = s.gains.eps1;
    const double eps2 = s.mode == ControlMode::ConsensusOnly ? 0.0 : s.gains.eps2;

    using State = std::vector<Vec2>;  // positions then velocities
    auto deriv = [&](const State& x) {
        State dx(2 * n);
        for (std::size_t i = 0; i < n; ++i) dx[i] = x[n + i];
        for (const Edge& e : s.graph.edges) {
            const auto i = static_cast<std::size_t>(e.i);
            const auto j = static_cast<std::size_t>(e.j);
            const Vec2 dv = x[n + j] - x[n + i];
            Vec2 acc = eps1 * dv;
            if (e.desired_distance) {
                const Vec2 pij = x[j] - x[i];
                acc += (2.0 * eps2 * (*e.desired_distance * *e.desired_distance - pij.squared_norm())) * (-pij);
            }
            dx[n + i] += acc;
            dx[n + j] -= acc;
        }
        return dx;
    };
    auto axpy = [](const State& x, double a, const State& d) {
        State y(x.size());
        for (std::size_t q = 0; q < x.size(); ++q) y[q] = x[q] + a * d[q];
        return y;
    };

    std::vector<AgentState> agents = s.agents;
    std::vector<double> previous_radius;
    TimeSeries ts;
    ts.agent_count = static_cast<int>(n);
    for (int round = 0; round < s.windows; ++round) {
        apply_events(s, round, agents);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> norms;
            for (int j : s.graph.neighbors(static_cast<int>(i))) {
                norms.push_back((agents[static_cast<std::size_t>(j)].center_velocity - agents[i].center_velocity).norm());
            }
            if (round > 0) agents[i].radius = adaptive_radius(norms, s.gains.alpha);
        }
        ts.rounds.push_back(record_round(s, round, agents, previous_radius, ts));
        for (const Edge& e : s.graph.edges) {
            const AgentState& a = agents[static_cast<std::size_t>(e.i)];
            const AgentState& b = agents[static_cast<std::size_t>(e.j)];
            ts.edges.push_back({round, e.i, e.j, (b.center - a.center).norm(), kNaN,
                                b.center_velocity - a.center_velocity, {kNaN, kNaN}, kNaN, std::nullopt});
        }
        previous_radius.clear();
        for (const AgentState& a : agents) previous_radius.push_back(a.radius);

        State x(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = agents[i].center;
            x[n + i] = agents[i].center_velocity;
        }
        for (int q = 0; q < steps; ++q) {
            const State k1 = deriv(x);
            const State k2 = deriv(axpy(x, 0.5 * h, k1));
            const State k3 = deriv(axpy(x, 0.5 * h, k2));
            const State k4 = deriv(axpy(x, h, k3));
            for (std::size_t p = 0; p < x.size(); ++p) x[p] += (h / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            agents[i].center = x[i];
            agents[i].center_velocity = x[n + i];
            agents[i].phase = wrap_angle(agents[i].phase + agents[i].omega * T);
        }
        if (!state_ok(agents)) {
            ts.diverged_at = round;
            break;
        }
    }
    return ts;
}

}  // namespace rangeloc
