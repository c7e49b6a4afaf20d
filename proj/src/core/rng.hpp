#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "core/types.hpp"

namespace hybridrec {

// Deterministic RNG wrapper. std::mt19937_64 output is pinned by the
// standard, but the std distributions are not, so draws are mapped to
// doubles by hand. Results are therefore identical across toolchains.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return unit_uniform(gen_()); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller, one cached spare.
    double gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]: keeps log() finite
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Uniform integer in [0, n), bias-free via rejection.
    uint64_t bounded(uint64_t n) {
        uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// In-place Fisher-Yates.
template <typename T>
void shuffle_vector(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace hybridrec
