#pragma once

#include <cstdint>
#include <random>

namespace tailrobust {

// One engine type for the whole library. Every sampler takes a seed and
// instantiates its own engine, so no generator state is ever shared.
using Engine = std::mt19937_64;

// Derive an independent 64-bit seed for sub-stream `stream` of `seed`
// (splitmix64 finalizer applied to both words).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Engine make_engine(std::uint64_t seed);

// Uniform on the open interval (0, 1) with 53 bits of resolution.
double uniform_open(Engine& engine);

// Standard exponential.
double standard_exponential(Engine& engine);

}  // namespace tailrobust
