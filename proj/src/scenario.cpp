#include "rangeloc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace rangeloc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto start = s.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) break;
        auto end = s.find_first_of(" \t", start);
        if (end == std::string_view::npos) end = s.size();
        out.push_back(s.substr(start, end - start));
        pos = end;
    }
    return out;
}

double to_double(std::string_view v, int line, std::string_view what) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ParseError(line, fmt::format("{} expects a finite number, got '{}'", what, v));
    }
    return out;
}

template <typename Int>
Int to_int(std::string_view v, int line, std::string_view what) {
    Int out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw ParseError(line, fmt::format("{} expects an integer, got '{}'", what, v));
    return out;
}

bool to_bool(std::string_view v, int line, std::string_view what) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(line, fmt::format("{} expects true or false, got '{}'", what, v));
}

struct KeyValue {
    std::string value;
    int line{0};
};

struct Section {
    int header_line{0};
    std::map<std::string, KeyValue, std::less<>> values;

    void put(std::string_view key, std::string_view value, int line) {
        if (!values.emplace(std::string(key), KeyValue{std::string(value), line}).second) {
            throw ParseError(line, fmt::format("duplicate key '{}'", key));
        }
    }

    const KeyValue& need(std::string_view key) const {
        const auto it = values.find(key);
        if (it == values.end()) throw ParseError(header_line, fmt::format("missing key '{}'", key));
        return it->second;
    }
};

constexpr std::string_view kScenarioKeys[] = {"T",     "windows", "mode", "seed",    "noise_std",
                                              "alpha", "eps1",    "eps2", "omega_sign_known"};
constexpr std::string_view kScenarioOptional[] = {"samples", "commensurability_tol"};
constexpr std::string_view kAgentKeys[] = {"px", "py", "vx", "vy", "omega", "radius0", "phase0"};

template <std::size_t N>
bool contains(const std::string_view (&keys)[N], std::string_view k) {
    return std::find(std::begin(keys), std::end(keys), k) != std::end(keys);
}

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace

Scenario parse_scenario(std::string_view text) {
    enum class Kind { None, Scenario, Agent, Edge, Event };
    Kind kind = Kind::None;
    std::optional<Section> head;
    std::map<int, Section> agent_sections;
    Section* current = nullptr;
    Scenario s;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            const auto parts = fields(line.substr(1, line.size() - 2));
            if (parts.empty()) throw ParseError(line_no, "empty section header");
            if (parts[0] == "scenario" && parts.size() == 1) {
                if (head) throw ParseError(line_no, "duplicate [scenario] section");
                head.emplace();
                head->header_line = line_no;
                current = &*head;
                kind = Kind::Scenario;
            } else if (parts[0] == "agent" && parts.size() == 2) {
                const int id = to_int<int>(parts[1], line_no, "agent number");
                if (id < 1) throw ParseError(line_no, "agent numbers start at 1");
                auto [it, fresh] = agent_sections.try_emplace(id);
                if (!fresh) throw ParseError(line_no, fmt::format("duplicate [agent {}] section", id));
                it->second.header_line = line_no;
                current = &it->second;
                kind = Kind::Agent;
            } else if (parts[0] == "edge" && parts.size() == 1) {
                kind = Kind::Edge;
            } else if (parts[0] == "event" && parts.size() == 1) {
                kind = Kind::Event;
            } else {
                throw ParseError(line_no, fmt::format("unknown section '{}'", line));
            }
            continue;
        }

        switch (kind) {
            case Kind::None:
                throw ParseError(line_no, "content before the first section");
            case Kind::Scenario:
            case Kind::Agent: {
                const auto eq = line.find('=');
                if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
                const auto key = trim(line.substr(0, eq));
                const auto value = trim(line.substr(eq + 1));
                const bool known = kind == Kind::Scenario
                                       ? contains(kScenarioKeys, key) || contains(kScenarioOptional, key)
                                       : contains(kAgentKeys, key);
                if (!known) throw ParseError(line_no, fmt::format("unknown key '{}'", key));
                if (value.empty()) throw ParseError(line_no, fmt::format("key '{}' has no value", key));
                current->put(key, value, line_no);
                break;
            }
            case Kind::Edge: {
                const auto f = fields(line);
                if (f.size() != 2 && f.size() != 3) throw ParseError(line_no, "edge line needs 'i j [dstar]'");
                Edge e;
                e.i = to_int<int>(f[0], line_no, "edge endpoint") - 1;
                e.j = to_int<int>(f[1], line_no, "edge endpoint") - 1;
                if (f.size() == 3) e.desired_distance = to_double(f[2], line_no, "dstar");
                s.graph.edges.push_back(e);
                break;
            }
            case Kind::Event: {
                const auto f = fields(line);
                if (f.size() != 4) throw ParseError(line_no, "event line needs 'round agent dvx dvy'");
                PerturbationEvent e;
                e.round = to_int<int>(f[0], line_no, "event round");
                e.agent = to_int<int>(f[1], line_no, "event agent") - 1;
                e.delta_v = {to_double(f[2], line_no, "dvx"), to_double(f[3], line_no, "dvy")};
                s.events.push_back(e);
                break;
            }
        }
    }

    if (!head) throw ParseError(line_no, "missing [scenario] section");
    auto num = [&](std::string_view key) {
        const auto& kv = head->need(key);
        return to_double(kv.value, kv.line, key);
    };
    s.gains.period = num("T");
    s.gains.alpha = num("alpha");
    s.gains.eps1 = num("eps1");
    s.gains.eps2 = num("eps2");
    s.noise_std = num("noise_std");
    {
        const auto& kv = head->need("windows");
        s.windows = to_int<int>(kv.value, kv.line, "windows");
    }
    {
        const auto& kv = head->need("seed");
        s.seed = to_int<std::uint64_t>(kv.value, kv.line, "seed");
    }
    {
        const auto& kv = head->need("mode");
        if (kv.value == "consensus_only") s.mode = ControlMode::ConsensusOnly;
        else if (kv.value == "consensus_and_shape") s.mode = ControlMode::ConsensusAndShape;
        else throw ParseError(kv.line, fmt::format("mode must be consensus_only or consensus_and_shape, got '{}'", kv.value));
    }
    {
        const auto& kv = head->need("omega_sign_known");
        s.omega_sign_known = to_bool(kv.value, kv.line, "omega_sign_known");
    }
    if (const auto it = head->values.find("samples"); it != head->values.end()) {
        s.sample_count = to_int<int>(it->second.value, it->second.line, "samples");
    }
    if (const auto it = head->values.find("commensurability_tol"); it != head->values.end()) {
        s.commensurability_tolerance = to_double(it->second.value, it->second.line, "commensurability_tol");
    }

    int expected = 1;
    for (const auto& [id, sec] : agent_sections) {
        if (id != expected) throw ParseError(sec.header_line, fmt::format("agent {} is missing before agent {}", expected, id));
        ++expected;
        auto get = [&](std::string_view key) {
            const auto& kv = sec.need(key);
            return to_double(kv.value, kv.line, key);
        };
        AgentState a;
        a.center = {get("px"), get("py")};
        a.center_velocity = {get("vx"), get("vy")};
        a.omega = get("omega");
        a.radius = get("radius0");
        a.phase = get("phase0");
        s.agents.push_back(a);
    }
    s.graph.agent_count = static_cast<int>(s.agents.size());
    s.validate();
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "T = " << number(s.gains.period) << '\n';
    out << "windows = " << s.windows << '\n';
    out << "mode = " << (s.mode == ControlMode::ConsensusOnly ? "consensus_only" : "consensus_and_shape") << '\n';
    out << "seed = " << s.seed << '\n';
    out << "noise_std = " << number(s.noise_std) << '\n';
    out << "alpha = " << number(s.gains.alpha) << '\n';
    out << "eps1 = " << number(s.gains.eps1) << '\n';
    out << "eps2 = " << number(s.gains.eps2) << '\n';
    out << "omega_sign_known = " << (s.omega_sign_known ? "true" : "false") << '\n';
    out << "samples = " << s.sample_count << '\n';
    out << "commensurability_tol = " << number(s.commensurability_tolerance) << '\n';
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const AgentState& a = s.agents[i];
        out << "\n[agent " << i + 1 << "]\n";
        out << "px = " << number(a.center.x) << '\n';
        out << "py = " << number(a.center.y) << '\n';
        out << "vx = " << number(a.center_velocity.x) << '\n';
        out << "vy = " << number(a.center_velocity.y) << '\n';
        out << "omega = " << number(a.omega) << '\n';
        out << "radius0 = " << number(a.radius) << '\n';
        out << "phase0 = " << number(a.phase) << '\n';
    }
    out << "\n[edge]\n";
    for (const Edge& e : s.graph.edges) {
        out << e.i + 1 << ' ' << e.j + 1;
        if (e.desired_distance) out << ' ' << number(*e.desired_distance);
        out << '\n';
    }
    if (!s.events.empty()) {
        out << "\n[event]\n";
        for (const PerturbationEvent& e : s.events) {
            out << e.round << ' ' << e.agent + 1 << ' ' << number(e.delta_v.x) << ' ' << number(e.delta_v.y) << '\n';
        }
    }
    return out.str();
}

std::vector<std::string> preset_names() { return {"reconsensus_sec3", "formation_sec4b"}; }

namespace {

// r_i(0) = alpha * max over neighbors of the true relative speed.
void seed_radii(Scenario& s) {
    for (int i = 0; i < s.graph.agent_count; ++i) {
        std::vector<double> norms;
        for (int j : s.graph.neighbors(i)) {
            norms.push_back((s.agents[static_cast<std::size_t>(j)].center_velocity -
                             s.agents[static_cast<std::size_t>(i)].center_velocity)
                                .norm());
        }
        s.agents[static_cast<std::size_t>(i)].radius = adaptive_radius(norms, s.gains.alpha);
    }
}

AgentState agent(Vec2 p, Vec2 v, double omega) {
    AgentState a;
    a.center = p;
    a.center_velocity = v;
    a.omega = omega;
    return a;
}

}  // namespace

Scenario preset(std::string_view name) {
    Scenario s;
    s.gains.period = 2.0 * M_PI;
    s.gains.alpha = 0.35;
    s.gains.eps1 = 5e-2;
    s.seed = 1;
    if (name == "reconsensus_sec3") {
        s.agents = {agent({70, 30}, {-4, 2}, 5), agent({0, 50}, {3, -2}, -3), agent({0, 0}, {2, 4}, 5)};
        s.graph.agent_count = 3;
        s.graph.edges = {{0, 1, std::nullopt}, {1, 2, std::nullopt}};
        s.gains.eps2 = 0.0;
        s.mode = ControlMode::ConsensusOnly;
        s.windows = 80;
        s.events = {{20, 1, {3.0, -3.0}}};
    } else if (name == "formation_sec4b") {
        s.agents = {agent({100, 50}, {-4, 1.5}, 5), agent({0, 80}, {3, -3.5}, -3), agent({0, 0}, {2, 3.5}, 7)};
        s.graph.agent_count = 3;
        s.graph.edges = {{0, 1, 20.0}, {0, 2, 20.0}, {1, 2, 20.0}};
        s.gains.eps2 = 7e-7;
        s.mode = ControlMode::ConsensusAndShape;
        s.windows = 400;
    } else {
        throw Error(ErrorCode::InvalidArgument, fmt::format("unknown preset '{}'", name));
    }
    seed_radii(s);
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& source) {
    if (std::string_view(source).substr(0, kPresetPrefix.size()) == kPresetPrefix) {
        return preset(std::string_view(source).substr(kPresetPrefix.size()));
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open scenario file '{}'", source));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace rangeloc
