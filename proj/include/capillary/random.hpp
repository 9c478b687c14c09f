#pragma once

#include <cstdint>
#include <random>

namespace capillary {

// std::uniform_real_distribution is implementation-defined; the explicit
// 53-bit conversion keeps sampled sequences identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 engine_;
};

} // namespace capillary
