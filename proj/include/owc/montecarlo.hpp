#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "owc/channel.hpp"
#include "owc/random.hpp"
#include "owc/relay.hpp"

namespace owc::mc {

/// Which end-to-end SNR a trial reports.
///   direct:         one link, γ = γ0 h²
///   relay_true:     γ1γ2 / (γ1 + γ2 + 1)
///   relay_harmonic: γ1γ2 / (γ1 + γ2)
///   relay_min:      min(γ1, γ2)
enum class SimMode { direct, relay_true, relay_harmonic, relay_min };

std::string to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& s);

/// Substream channels of one trial.
enum Channel : std::uint64_t { fog1 = 0, point1 = 1, fog2 = 2, point2 = 3 };

struct SimSpec {
    std::uint64_t trials = 1'000'000;
    std::uint64_t master_seed = 20200601;
    std::uint64_t chunk_size = 65'536;  ///< trials per work unit (rounded up to whole leaf blocks)
    SimMode mode = SimMode::relay_true;
    double gamma_th = 3.981071705534972;  ///< 6 dB
    unsigned threads = 0;                 ///< 0 = hardware concurrency

    void validate() const;
};

struct SimResult {
    std::uint64_t trials_used = 0;
    std::uint64_t outages = 0;
    double outage_hat = 0.0;
    double outage_lo = 0.0;  ///< Wilson 95% interval
    double outage_hi = 0.0;
    double avg_snr_hat = 0.0;
    double avg_snr_se = 0.0;
    double rate_hat = 0.0;  ///< mean of log2(1 + γ)
    double rate_se = 0.0;

    bool operator==(const SimResult&) const = default;
};

/// Trials per leaf block. Partial sums are formed per leaf and folded in leaf order, which makes
/// results independent of chunk size and thread count.
inline constexpr std::uint64_t kLeafTrials = 512;

struct HopSnrs {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

/// Draws both hop SNRs of one trial from its (fog1, point1, fog2, point2) substreams.
HopSnrs draw_hops(const RelayConfig& cfg, const FogParams& fog, std::uint64_t master_seed,
                  std::uint64_t trial);

/// Single-link SNR of one trial (uses the fog1 / point1 substreams).
double draw_direct(const LinkParams& link, const FogParams& fog, const PointingParams& pp,
                   std::uint64_t master_seed, std::uint64_t trial);

/// Combines two hop SNRs per mode. Direct mode is not a combiner and throws.
double combine(SimMode mode, double gamma1, double gamma2);

/// Wilson score interval for `successes` out of `n` at normal quantile zq.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n,
                                          double zq = 1.959963984540054);

/// Relay simulation; spec.mode must be one of the relay modes.
SimResult simulate(const SimSpec& spec, const RelayConfig& cfg, const FogParams& fog);

/// Direct-link simulation; spec.mode must be direct.
SimResult simulate(const SimSpec& spec, const LinkParams& link, const FogParams& fog,
                   const PointingParams& pp);

/// n single-link SNR draws for trials 0..n-1, in trial order.
std::vector<double> sample_snr(const LinkParams& link, const FogParams& fog,
                               const PointingParams& pp, std::uint64_t master_seed,
                               std::uint64_t n);

}  // namespace owc::mc
