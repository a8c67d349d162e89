#pragma once

#include <cstdint>
#include <random>

namespace fpdeconv {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for an independent stream identified by (seed, stream index).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Each replicate of an experiment owns the stream hash(seed, replicate), so a
// replicate's output depends only on (config, seed, replicate index).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace fpdeconv
