#include <doctest.h>

#include "rangeloc/errors.hpp"
#include "rangeloc/scenario.hpp"

#include <cmath>
#include <string>

using namespace rangeloc;

namespace {

const char* const kMinimal = R"(# two agents on one edge
[scenario]
T = 6.283185307179586
windows = 3
mode = consensus_only
seed = 7
noise_std = 0
alpha = 0.35
eps1 = 0.05
eps2 = 0
omega_sign_known = false

[agent 1]
px = 0
py = 0
vx = 1
vy = 0
omega = 5
radius0 = 0.35
phase0 = 0

[agent 2]
px = 30
py = 0
vx = 0
vy = 0
omega = -3
radius0 = 0.35
phase0 = 0.5

[edge]
1 2 25
)";

std::string with_line(std::string text, const std::string& after, const std::string& inserted) {
    const auto at = text.find(after);
    REQUIRE(at != std::string::npos);
    text.insert(at + after.size(), inserted);
    return text;
}

// Line of the ParseError thrown by parse_scenario, or 0.
int parse_error_line(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::string validation_message(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal file parses") {
    const Scenario s = parse_scenario(kMinimal);
    REQUIRE(s.agents.size() == 2);
    CHECK(s.windows == 3);
    CHECK(s.seed == 7);
    CHECK(s.mode == ControlMode::ConsensusOnly);
    CHECK(s.agents[1].center == Vec2{30, 0});
    CHECK(s.agents[1].omega == -3);
    CHECK(s.agents[1].phase == 0.5);
    REQUIRE(s.graph.edges.size() == 1);
    CHECK(s.graph.edges[0] == Edge{0, 1, 25.0});
    CHECK(s.harmonics() == std::vector<int>{5, -3});
}

TEST_CASE("serialization roundtrips") {
    const Scenario s = parse_scenario(kMinimal);
    CHECK(parse_scenario(serialize_scenario(s)) == s);
    for (const std::string& name : preset_names()) {
        const Scenario p = preset(name);
        const std::string text = serialize_scenario(p);
        CHECK(parse_scenario(text) == p);
        CHECK(serialize_scenario(parse_scenario(text)) == text);
    }
    Scenario odd = preset("reconsensus_sec3");
    odd.agents[0].phase = 0.1 + 0.2;
    odd.noise_std = 1e-3 / 3;
    odd.sample_count = 2048;
    odd.omega_sign_known = true;
    CHECK(parse_scenario(serialize_scenario(odd)) == odd);
}

TEST_CASE("parse errors carry the line") {
    CHECK(parse_error_line(with_line(kMinimal, "eps2 = 0\n", "foo=1\n")) == 11);
    CHECK(parse_error_line(with_line(kMinimal, "eps2 = 0\n", "eps1 = 0.1\n")) == 11);
    CHECK(parse_error_line(with_line(kMinimal, "[edge]\n", "1\n")) == 32);
    CHECK(parse_error_line(with_line(kMinimal, "[edge]\n", "1 x\n")) == 32);
    CHECK(parse_error_line(with_line(kMinimal, "[edge]\n", "[event]\n1 2 3\n")) == 33);
    CHECK(parse_error_line(with_line(kMinimal, "phase0 = 0.5\n", "[bogus]\n")) == 30);
    CHECK(parse_error_line(std::string("x = 1\n") + kMinimal) == 1);

    // Missing key: reported at the section header.
    std::string missing = kMinimal;
    missing.erase(missing.find("alpha = 0.35\n"), 13);
    CHECK(parse_error_line(missing) == 2);
    std::string no_phase = kMinimal;
    no_phase.erase(no_phase.find("phase0 = 0.5\n"), 13);
    CHECK(parse_error_line(no_phase) == 22);

    std::string bad_mode = kMinimal;
    bad_mode.replace(bad_mode.find("consensus_only"), 14, "sometimes");
    CHECK(parse_error_line(bad_mode) == 5);
    std::string inf = kMinimal;
    inf.replace(inf.find("px = 30"), 7, "px = inf");
    CHECK(parse_error_line(inf) == 23);
    std::string gap = kMinimal;
    gap.replace(gap.find("[agent 2]"), 9, "[agent 3]");
    CHECK(parse_error_line(gap) == 22);
}

TEST_CASE("validation names the violated invariant") {
    std::string clash = kMinimal;
    clash.replace(clash.find("omega = -3"), 10, "omega = 10");
    CHECK(validation_message(clash).find("admissibility") != std::string::npos);
    std::string same = kMinimal;
    same.replace(same.find("omega = -3"), 10, "omega = -5");
    CHECK(validation_message(same).find("edge (1, 2)") != std::string::npos);
    std::string irrational = kMinimal;
    irrational.replace(irrational.find("omega = -3"), 10, "omega = -3.3");
    CHECK(validation_message(irrational).find("agent 2") != std::string::npos);
    const std::string late = with_line(kMinimal, "1 2 25\n", "[event]\n3 1 0 1\n");
    CHECK(validation_message(late).find("outside the episode") != std::string::npos);
    std::string lonely = kMinimal;
    lonely.erase(lonely.find("[edge]"));
    CHECK(validation_message(lonely).find("not connected") != std::string::npos);
}

TEST_CASE("presets carry their fixed values") {
    const Scenario f = load_scenario("preset:formation_sec4b");
    CHECK(f.gains.eps1 == 5e-2);
    CHECK(f.gains.eps2 == 7e-7);
    CHECK(f.gains.period == doctest::Approx(2 * M_PI));
    CHECK(f.harmonics() == std::vector<int>{5, -3, 7});
    REQUIRE(f.graph.edges.size() == 3);
    for (const Edge& e : f.graph.edges) CHECK(e.desired_distance == 20.0);
    CHECK(f.agents[0].center == Vec2{100, 50});
    CHECK(f.agents[2].center_velocity == Vec2{2, 3.5});
    CHECK(f.mode == ControlMode::ConsensusAndShape);

    const Scenario r = load_scenario("preset:reconsensus_sec3");
    CHECK(r.harmonics() == std::vector<int>{5, -3, 5});
    CHECK(r.gains.alpha == 0.35);
    CHECK(r.mode == ControlMode::ConsensusOnly);
    CHECK(r.graph.edges.size() == 2);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].round == 20);
    CHECK(r.events[0].agent == 1);
    CHECK(r.agents[1].center_velocity == Vec2{3, -2});
    // r_i(0) = alpha * max neighbor speed.
    CHECK(r.agents[1].radius == doctest::Approx(0.35 * std::hypot(7.0, 4.0)));

    try {
        preset("nope");
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    try {
        load_scenario("/nonexistent/file.scn");
        FAIL("expected Io");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}
