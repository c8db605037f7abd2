#pragma once

#include <cstdint>
#include <random>

namespace hgamp {

/// Seeded random stream. Every stochastic choice in the solver draws from one
/// of these in a fixed call order, so a (instance, params, seed) triple pins
/// the whole run. Raw mt19937_64 output is mapped to ranges here instead of
/// going through std distributions, whose sequences vary across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n > 0.
    int uniform_int(int n) {
        const auto wide = static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n);
        return static_cast<int>(wide >> 64);
    }

    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

} // namespace hgamp
