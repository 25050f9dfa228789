#pragma once

#include "rangeloc/simulator.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rangeloc {

/// Line-oriented scenario text:
///
///   [scenario]          T, windows, mode, seed, noise_std, alpha, eps1, eps2,
///                       omega_sign_known; optional samples, commensurability_tol
///   [agent N]           px, py, vx, vy, omega, radius0, phase0  (N from 1)
///   [edge]              one "i j [dstar]" per line
///   [event]             one "round agent dvx dvy" per line
///
/// `#` starts a comment. Throws ParseError(line) for syntax, unknown or
/// duplicate keys and missing fields, then ValidationError from
/// Scenario::validate().
Scenario parse_scenario(std::string_view text);

/// Inverse of parse_scenario; doubles are written in shortest round-trip form.
std::string serialize_scenario(const Scenario& s);

inline constexpr std::string_view kPresetPrefix = "preset:";

std::vector<std::string> preset_names();

/// Throws Error(InvalidArgument) for an unknown name (given without prefix).
Scenario preset(std::string_view name);

/// "preset:NAME" or a path to a scenario file.
Scenario load_scenario(const std::string& source);

}  // namespace rangeloc
