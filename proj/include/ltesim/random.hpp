#pragma once

#include <cstdint>
#include <random>

namespace ltesim {

using Rng = std::mt19937_64;

/// Independent named streams so toggling one stochastic subsystem leaves the others untouched.
enum class RngStream : std::uint32_t {
    placement = 1,
    mobility = 2,
    shadowing = 3,
    fading = 4,
    traffic = 5,
};

inline Rng make_stream(std::uint64_t seed, RngStream stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

}  // namespace ltesim
