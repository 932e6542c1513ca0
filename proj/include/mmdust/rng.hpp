#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmdust {

// Seedable generator with explicitly-coded transforms (Box-Muller, inverse
// CDF) on top of mt19937_64, so streams are bit-reproducible across
// platforms; std::*_distribution is implementation-defined and is not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

    bool bernoulli(double prob) { return uniform() < prob; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mmdust
