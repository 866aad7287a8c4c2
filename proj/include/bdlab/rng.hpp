#pragma once

#include <cstdint>

namespace bdlab {

/// Counter-based generator: every (seed, stream, counter) triple maps to a fixed
/// value, so independent streams stay reproducible under any evaluation order.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform in (0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Standard normal by Box-Muller on two counter uniforms.
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

}  // namespace bdlab
