#pragma once

#include "spikefed/numerics/parameter_set.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace spikefed::numerics {

/// Text checkpoint:
///
///     spikefed-checkpoint 1
///     fingerprint <16 hex digits>
///     entries <n>
///     tensor <name> <rank> <d0> ... <dk>
///     <values, shortest round-trip decimal, whitespace separated>
///     ...
///
/// Values are written with std::to_chars shortest form, so reloading is
/// bit-exact. The fingerprint is verified against the reloaded layout.
std::string write_checkpoint(const ParameterSet& params);
ParameterSet read_checkpoint(std::string_view text);

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path);
ParameterSet load_checkpoint(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
/// Strict parse of a complete decimal token; throws DataError otherwise.
double parse_double(std::string_view token);

}  // namespace spikefed::numerics
