#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mvembed::rng {

// Samplers built directly on the mt19937_64 output stream. The standard
// distributions are implementation-defined, so drawing bits ourselves keeps
// every seeded run reproducible across standard libraries.

inline double uniform_unit(std::mt19937_64& eng) {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t bounded(std::mt19937_64& eng, std::uint64_t n) {
    // rejection sampling, no modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

class Gaussian {
public:
    double next(std::mt19937_64& eng) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Box-Muller; u clamped away from 0 so log stays finite
        double u = uniform_unit(eng);
        if (u <= 0.0) u = 0x1.0p-53;
        const double v = uniform_unit(eng);
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 2.0 * M_PI * v;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    bool has_spare_ = false;
    double spare_ = 0.0;
};

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& eng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(eng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace mvembed::rng
