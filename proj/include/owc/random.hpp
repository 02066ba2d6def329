#pragma once

#include <cstdint>

namespace owc::mc {

/// Counter-addressed random stream. Every (master seed, trial, channel) triple names an
/// independent SplitMix64 sequence, so a trial's draws do not depend on which worker or
/// chunk evaluates it.
class Stream {
public:
    Stream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t channel) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double normal() noexcept;

private:
    std::uint64_t state_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Gamma(shape, scale) variate (Marsaglia–Tsang; boosted for shape < 1).
double gamma_variate(double shape, double scale, Stream& rng);

/// Rayleigh(sigma) variate by inversion.
double rayleigh_variate(double sigma, Stream& rng);

}  // namespace owc::mc
