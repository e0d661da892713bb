#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace npglm {

using Rng = std::mt19937_64;

// Child seed from (master seed, purpose label); stable across runs and builds.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view label);
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view label, std::uint64_t index);

}  // namespace npglm
