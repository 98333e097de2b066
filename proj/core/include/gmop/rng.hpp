#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gmop {

using Rng = std::mt19937_64;

/// Independent generator for a named purpose ("network", "weights", "init",
/// "observations") derived from one master seed. The same (seed, label) pair
/// always yields the same stream, regardless of what other streams consume.
Rng substream(std::uint64_t master_seed, std::string_view label);

/// Uniform draw on the open interval (0, 1).
double uniform_open01(Rng& rng);

}  // namespace gmop
