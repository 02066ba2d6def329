#pragma once

// Tiny seeded generators for property tests. A fixed seed per test keeps failures replayable.

#include <cstdint>
#include <cmath>
#include <random>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
