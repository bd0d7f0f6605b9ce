#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sdgkit {

// Deterministic draws built directly on mt19937_64 output. std::uniform_*
// distributions are implementation-defined, which would break the
// byte-for-byte reproducibility the CLI promises, so they are not used.
class prng {
public:
    explicit prng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n > 0. Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace sdgkit
