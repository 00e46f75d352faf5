#pragma once

#include <cstdint>
#include <random>

namespace persist {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20240607ULL;

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for stream `index` under `master`: two rounds of splitmix64 over the
// pair, so neighbouring indices give unrelated engines. Every Monte Carlo
// trial or replicate draws from its own stream, which keeps results
// independent of how work is split across threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

Engine make_engine(std::uint64_t master, std::uint64_t index);

// Uniform draw on the open interval (0,1) from 53 random bits.
double open_uniform(Engine& engine) noexcept;

}  // namespace persist
