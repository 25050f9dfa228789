#pragma once

#include "rangeloc/simulator.hpp"

#include <filesystem>
#include <optional>

namespace rangeloc {

struct SummaryMetrics {
    double final_disagreement{0.0};
    double final_shape_error{0.0};
    double threshold{0.1};
    std::optional<int> rounds_to_threshold;  ///< from round 0
    double max_estimate_error{0.0};          ///< max |d_hat - d_true| over successful estimates
    int estimate_failures{0};
    std::optional<int> diverged_at;
};

/// Rounds from `from_round` until the disagreement first drops below the
/// threshold (0 if it already is); empty if it never does.
std::optional<int> rounds_to_disagreement_below(const TimeSeries& ts, double threshold, int from_round = 0);

SummaryMetrics summarize(const TimeSeries& ts, double threshold = 0.1);

/// Writes agents.csv, edges.csv, rounds.csv, summary.csv and plot.gp into
/// `dir`, creating it if needed. Throws Error(Io).
void write_timeseries(const TimeSeries& ts, const std::filesystem::path& dir);

}  // namespace rangeloc
