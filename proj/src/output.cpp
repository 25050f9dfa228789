#include "rangeloc/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace rangeloc {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.12g}", v);
}

std::ofstream open_file(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", p.string()));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& p) {
    out.flush();
    if (!out) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", p.string()));
}

constexpr const char* kPlotScript = R"(# gnuplot script: trajectories, disagreement and shape error
set datafile separator ','
set key outside
set terminal pngcairo size 1200,400
set output 'trajectories.png'
set title 'circle-center trajectories'
set xlabel 'x [m]'
set ylabel 'y [m]'
plot for [a=1:AGENTS] 'agents.csv' using ($2==a ? $3 : 1/0):4 every ::1 with lines title sprintf('agent %d', a)
set output 'disagreement.png'
set title 'velocity disagreement'
set xlabel 'round'
set ylabel 'max |v_i - v_j| [m/s]'
set logscale y
plot 'rounds.csv' using 1:2 every ::1 with lines title 'disagreement'
set output 'shape_error.png'
set title 'shape error'
set ylabel 'max |d_ij - d*| [m]'
plot 'rounds.csv' using 1:3 every ::1 with lines title 'shape error'
unset logscale y
set output 'radius.png'
set title 'adaptive radius'
set ylabel 'r [m]'
plot for [a=1:AGENTS] 'agents.csv' using ($2==a ? $1 : 1/0):7 every ::1 with lines title sprintf('agent %d', a)
)";

}  // namespace

std::optional<int> rounds_to_disagreement_below(const TimeSeries& ts, double threshold, int from_round) {
    for (const RoundRow& r : ts.rounds) {
        if (r.round >= from_round && r.disagreement < threshold) return r.round - from_round;
    }
    return std::nullopt;
}

SummaryMetrics summarize(const TimeSeries& ts, double threshold) {
    SummaryMetrics m;
    m.threshold = threshold;
    if (!ts.rounds.empty()) {
        m.final_disagreement = ts.rounds.back().disagreement;
        m.final_shape_error = ts.rounds.back().shape_error;
    }
    m.rounds_to_threshold = rounds_to_disagreement_below(ts, threshold);
    for (const EdgeRow& e : ts.edges) {
        if (std::isfinite(e.d_hat)) m.max_estimate_error = std::max(m.max_estimate_error, std::abs(e.d_hat - e.d_true));
    }
    for (const RoundRow& r : ts.rounds) m.estimate_failures += r.failures;
    m.diverged_at = ts.diverged_at;
    return m;
}

void write_timeseries(const TimeSeries& ts, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    {
        const auto p = dir / "agents.csv";
        auto out = open_file(p);
        out << "round,agent,px,py,vx,vy,radius\n";
        for (const AgentRow& a : ts.agents) {
            out << fmt::format("{},{},{},{},{},{},{}\n", a.round, a.agent + 1, num(a.center.x), num(a.center.y),
                               num(a.velocity.x), num(a.velocity.y), num(a.radius));
        }
        finish(out, p);
    }
    {
        const auto p = dir / "edges.csv";
        auto out = open_file(p);
        out << "round,i,j,d_true,d_hat,vij_true_x,vij_true_y,vij_hat_x,vij_hat_y,residual\n";
        for (const EdgeRow& e : ts.edges) {
            out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", e.round, e.i + 1, e.j + 1, num(e.d_true),
                               num(e.d_hat), num(e.vij_true.x), num(e.vij_true.y), num(e.vij_hat.x),
                               num(e.vij_hat.y), num(e.residual));
        }
        finish(out, p);
    }
    {
        const auto p = dir / "rounds.csv";
        auto out = open_file(p);
        out << "round,disagreement,shape_error,radius_jump,failures\n";
        for (const RoundRow& r : ts.rounds) {
            out << fmt::format("{},{},{},{},{}\n", r.round, num(r.disagreement), num(r.shape_error),
                               num(r.radius_jump), r.failures);
        }
        finish(out, p);
    }
    {
        const auto p = dir / "summary.csv";
        auto out = open_file(p);
        const SummaryMetrics m = summarize(ts);
        auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
        out << "metric,value\n";
        out << "final_disagreement," << num(m.final_disagreement) << '\n';
        out << "final_shape_error," << num(m.final_shape_error) << '\n';
        out << "rounds_to_disagreement_below_" << num(m.threshold) << ',' << opt(m.rounds_to_threshold) << '\n';
        out << "max_estimate_error," << num(m.max_estimate_error) << '\n';
        out << "estimate_failures," << m.estimate_failures << '\n';
        out << "diverged_at," << opt(m.diverged_at) << '\n';
        finish(out, p);
    }
    {
        const auto p = dir / "plot.gp";
        auto out = open_file(p);
        std::string script = kPlotScript;
        const std::string agents = std::to_string(ts.agent_count);
        for (auto at = script.find("AGENTS"); at != std::string::npos; at = script.find("AGENTS", at)) {
            script.replace(at, 6, agents);
        }
        out << script;
        finish(out, p);
    }
}

}  // namespace rangeloc
