#include <doctest.h>

#include "rangeloc/control.hpp"
#include "rangeloc/errors.hpp"

#include <cmath>
#include <random>

using namespace rangeloc;

namespace {

FormationGraph complete3(std::optional<double> dstar = std::nullopt) {
    FormationGraph g;
    g.agent_count = 3;
    g.edges = {{0, 1, dstar}, {0, 2, dstar}, {1, 2, dstar}};
    g.validate();
    return g;
}

FormationGraph path3() {
    FormationGraph g;
    g.agent_count = 3;
    g.edges = {{0, 1, {}}, {1, 2, {}}};
    g.validate();
    return g;
}

ControllerGains formation_gains() { return {5e-2, 7e-7, 0.35, 2 * M_PI}; }

// Exact neighbor data for every agent of the graph.
std::vector<std::vector<NeighborTerm>> exact_terms(const FormationGraph& g, const std::vector<Vec2>& p,
                                                   const std::vector<Vec2>& v) {
    std::vector<std::vector<NeighborTerm>> out(static_cast<std::size_t>(g.agent_count));
    for (const Edge& e : g.edges) {
        for (auto [a, b] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            NeighborTerm t;
            t.relative_velocity = v[ib] - v[ia];
            t.relative_position = p[ib] - p[ia];
            t.distance = t.relative_position.norm();
            t.desired_distance = e.desired_distance.value_or(0.0);
            t.use_shape = e.desired_distance.has_value();
            out[ia].push_back(t);
        }
    }
    return out;
}

std::string validation_message(FormationGraph g) {
    try {
        g.validate();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("adaptive radius") {
    CHECK(adaptive_radius({1.0, 3.0, 2.0}, 0.35) == doctest::Approx(1.05));
    CHECK(adaptive_radius({0.0, 0.0}, 0.35) == 0.0);
    CHECK(adaptive_radius({std::hypot(7.0, 5.0)}, 0.35) == doctest::Approx(0.35 * std::sqrt(74.0)));
    try {
        adaptive_radius({}, 0.35);
        FAIL("expected EmptyNeighborhood");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyNeighborhood);
    }
    // Radius guarantee: r >= alpha * |v_ij| for every neighbor.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 10);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> s{U(rng), U(rng), U(rng)};
        const double r = adaptive_radius(s, 0.35);
        for (double x : s) CHECK(r >= 0.35 * x);
    }
}

TEST_CASE("fixed point of the update") {
    const FormationGraph g = complete3(20.0);
    const double h = 20 * std::sqrt(3.0) / 2;
    const std::vector<Vec2> p{{0, 0}, {20, 0}, {10, h}};
    const std::vector<Vec2> v(3, Vec2{1.5, -0.5});
    const auto terms = exact_terms(g, p, v);
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec2 next = consensus_shape_update(v[i], terms[i], formation_gains());
        CHECK(std::abs(next.x - v[i].x) <= 1e-12);
        CHECK(std::abs(next.y - v[i].y) <= 1e-12);
    }
    CHECK(consensus_shape_update({2, 3}, {}, formation_gains()) == Vec2{2, 3});
}

TEST_CASE("two agents contract toward their average") {
    FormationGraph g;
    g.agent_count = 2;
    g.edges = {{0, 1, {}}};
    g.validate();
    std::vector<Vec2> p{{0, 0}, {30, 5}};
    std::vector<Vec2> v{{-4, 2}, {3, -2}};
    const Vec2 mean = 0.5 * (v[0] + v[1]);
    ControllerGains gains = formation_gains();
    gains.eps2 = 0;
    double gap = (v[1] - v[0]).norm();
    for (int round = 0; round < 20; ++round) {
        const auto terms = exact_terms(g, p, v);
        std::vector<Vec2> next{consensus_shape_update(v[0], terms[0], gains), consensus_shape_update(v[1], terms[1], gains)};
        for (int i = 0; i < 2; ++i) p[static_cast<std::size_t>(i)] = position_advance(p[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)], gains.period);
        v = next;
        const Vec2 m = 0.5 * (v[0] + v[1]);
        CHECK(std::abs(m.x - mean.x) <= 1e-14);
        CHECK(std::abs(m.y - mean.y) <= 1e-14);
        const double now = (v[1] - v[0]).norm();
        CHECK(now < gap);
        gap = now;
    }
}

TEST_CASE("mean velocity is conserved with exact data") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    const FormationGraph g = complete3(20.0);
    for (int it = 0; it < 100; ++it) {
        std::vector<Vec2> p, v;
        for (int i = 0; i < 3; ++i) {
            p.push_back({100 * U(rng), 100 * U(rng)});
            v.push_back({5 * U(rng), 5 * U(rng)});
        }
        const auto terms = exact_terms(g, p, v);
        Vec2 change;
        double scale = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            const Vec2 step = consensus_shape_update(v[i], terms[i], formation_gains()) - v[i];
            change += step;
            scale += step.norm();
        }
        CHECK(change.norm() <= 1e-14 * (1 + scale));
    }
}

TEST_CASE("gain scaling identity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1, 1);
    const ControllerGains base = formation_gains();
    ControllerGains scaled = base;
    scaled.period *= 2;
    scaled.eps1 /= 2;
    scaled.eps2 /= 2;
    for (int it = 0; it < 50; ++it) {
        std::vector<NeighborTerm> terms(2);
        for (NeighborTerm& t : terms) {
            t.relative_velocity = {U(rng), U(rng)};
            t.relative_position = {50 * U(rng), 50 * U(rng)};
            t.distance = t.relative_position.norm();
            t.desired_distance = 20;
        }
        const Vec2 v{U(rng), U(rng)};
        const Vec2 a = consensus_shape_update(v, terms, base);
        const Vec2 b = consensus_shape_update(v, terms, scaled);
        CHECK(std::abs(a.x - b.x) <= 1e-13 * (1 + std::abs(a.x)));
        CHECK(std::abs(a.y - b.y) <= 1e-13 * (1 + std::abs(a.y)));
    }
}

TEST_CASE("use_shape false drops only the shape term") {
    NeighborTerm t;
    t.relative_velocity = {1, 0};
    t.relative_position = {30, 0};
    t.distance = 30;
    t.desired_distance = 20;
    const ControllerGains g = formation_gains();
    const Vec2 with = consensus_shape_update({0, 0}, {t}, g);
    t.use_shape = false;
    const Vec2 without = consensus_shape_update({0, 0}, {t}, g);
    CHECK(without.x == doctest::Approx(g.eps1 * g.period));
    // Too far apart: the shape term pulls toward the neighbor.
    CHECK(with.x > without.x);
    CHECK(with.x - without.x == doctest::Approx(2 * g.eps2 * g.period * (400.0 - 900.0) * -30.0));
}

TEST_CASE("position advance") {
    CHECK(position_advance({1, 2}, {0, 0}, 5) == Vec2{1, 2});
    const Vec2 p = position_advance({0, 0}, {1, 2}, 2 * M_PI);
    CHECK(p.x == doctest::Approx(2 * M_PI));
    CHECK(p.y == doctest::Approx(4 * M_PI));
}

TEST_CASE("laplacian spectra") {
    const Eigen::VectorXd c = laplacian_spectrum(complete3());
    CHECK(c(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c(1) == doctest::Approx(3.0));
    CHECK(c(2) == doctest::Approx(3.0));
    const Eigen::VectorXd p = laplacian_spectrum(path3());
    CHECK(std::abs(p(0)) <= 1e-12);
    CHECK(p(1) == doctest::Approx(1.0));
    CHECK(p(2) == doctest::Approx(3.0));
    const Eigen::MatrixXd l = laplacian(path3());
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
    CHECK(l(1, 1) == 2.0);
}

TEST_CASE("graph validation") {
    FormationGraph g;
    g.agent_count = 3;
    g.edges = {{0, 1, {}}};
    CHECK(validation_message(g).find("not connected") != std::string::npos);
    g.edges = {{0, 1, {}}, {1, 0, {}}, {1, 2, {}}};
    CHECK(validation_message(g).find("duplicate edge (1, 2)") != std::string::npos);
    g.edges = {{0, 1, {}}, {2, 2, {}}};
    CHECK(validation_message(g).find("self-loop on agent 3") != std::string::npos);
    g.edges = {{0, 3, {}}};
    CHECK(validation_message(g).find("missing agent") != std::string::npos);
    g.edges = {{0, 1, -1.0}, {1, 2, {}}};
    CHECK(validation_message(g).find("desired distance") != std::string::npos);
    g.agent_count = 1;
    g.edges = {};
    CHECK(!validation_message(g).empty());

    FormationGraph h;
    h.agent_count = 3;
    h.edges = {{2, 1, {}}, {1, 0, {}}};
    h.validate();
    CHECK(h.edges[0] == Edge{1, 2, {}});
    CHECK(h.neighbors(1) == std::vector<int>{0, 2});
    CHECK(h.max_degree() == 2);
}

TEST_CASE("gain warning") {
    CHECK_FALSE(gain_warning(formation_gains(), complete3()).has_value());
    ControllerGains hot = formation_gains();
    hot.eps1 = 0.1;
    const auto w = gain_warning(hot, complete3());
    REQUIRE(w.has_value());
    CHECK(w->find("1.257") != std::string::npos);
}
