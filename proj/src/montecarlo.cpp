#include "owc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "owc/errors.hpp"

namespace owc::mc {

namespace {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Running mean and sum of squared deviations; merged with the pairwise update.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * o.n / total;
        m2 += o.m2 + delta * delta * n * o.n / total;
        n = total;
    }

    double std_error() const {
        if (n < 2.0) return 0.0;
        return std::sqrt(m2 / (n - 1.0) / n);
    }
};

struct Leaf {
    std::uint64_t outages = 0;
    Moments snr;
    Moments rate;
};

SimResult run(const SimSpec& spec, const std::function<double(std::uint64_t)>& trial_snr) {
    spec.validate();
    const std::uint64_t n_leaves = (spec.trials + kLeafTrials - 1) / kLeafTrials;
    const std::uint64_t leaves_per_chunk =
        std::max<std::uint64_t>(1, (spec.chunk_size + kLeafTrials - 1) / kLeafTrials);
    const std::uint64_t n_chunks = (n_leaves + leaves_per_chunk - 1) / leaves_per_chunk;
    std::vector<Leaf> leaves(n_leaves);

    std::atomic<std::uint64_t> next_chunk{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t first_leaf = c * leaves_per_chunk;
            const std::uint64_t last_leaf = std::min(n_leaves, first_leaf + leaves_per_chunk);
            for (std::uint64_t li = first_leaf; li < last_leaf; ++li) {
                Leaf& leaf = leaves[li];
                const std::uint64_t t0 = li * kLeafTrials;
                const std::uint64_t t1 = std::min(spec.trials, t0 + kLeafTrials);
                for (std::uint64_t t = t0; t < t1; ++t) {
                    const double g = trial_snr(t);
                    if (g < spec.gamma_th) ++leaf.outages;
                    leaf.snr.add(g);
                    leaf.rate.add(std::log1p(g) / std::numbers::ln2);
                }
            }
        }
    };

    unsigned n_threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
    n_threads = static_cast<unsigned>(
        std::clamp<std::uint64_t>(n_threads ? n_threads : 1, 1, n_chunks));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    Leaf total;
    for (const Leaf& leaf : leaves) {
        total.outages += leaf.outages;
        total.snr.merge(leaf.snr);
        total.rate.merge(leaf.rate);
    }
    SimResult r;
    r.trials_used = spec.trials;
    r.outages = total.outages;
    r.outage_hat = static_cast<double>(total.outages) / static_cast<double>(spec.trials);
    std::tie(r.outage_lo, r.outage_hi) = wilson_interval(total.outages, spec.trials);
    r.avg_snr_hat = total.snr.mean;
    r.avg_snr_se = total.snr.std_error();
    r.rate_hat = total.rate.mean;
    r.rate_se = total.rate.std_error();
    return r;
}

}  // namespace

Stream::Stream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t channel) noexcept
    : state_(mix64(mix64(mix64(master_seed) ^ trial) + channel)) {}

std::uint64_t Stream::next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Stream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double gamma_variate(double shape, double scale, Stream& rng) {
    if (!(shape > 0.0 && scale > 0.0)) {
        throw DomainError("gamma_variate: shape and scale must be positive");
    }
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) U^{1/a}
        const double u = rng.uniform();
        return gamma_variate(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

double rayleigh_variate(double sigma, Stream& rng) {
    if (!(sigma > 0.0)) throw DomainError("rayleigh_variate: sigma must be positive");
    return sigma * std::sqrt(-2.0 * std::log(rng.uniform()));
}

std::string to_string(SimMode mode) {
    switch (mode) {
        case SimMode::direct: return "direct";
        case SimMode::relay_true: return "relay-true";
        case SimMode::relay_harmonic: return "relay-harmonic";
        case SimMode::relay_min: return "relay-min";
    }
    return "unknown";
}

SimMode sim_mode_from_string(const std::string& s) {
    if (s == "direct") return SimMode::direct;
    if (s == "relay-true" || s == "relay_true") return SimMode::relay_true;
    if (s == "relay-harmonic" || s == "relay_harmonic") return SimMode::relay_harmonic;
    if (s == "relay-min" || s == "relay_min") return SimMode::relay_min;
    throw std::invalid_argument("unknown simulation mode '" + s + "'");
}

void SimSpec::validate() const {
    if (trials == 0) throw DomainError("SimSpec: trials must be positive");
    if (chunk_size == 0) throw DomainError("SimSpec: chunk_size must be positive");
    if (!(gamma_th > 0.0) || !std::isfinite(gamma_th)) {
        throw DomainError("SimSpec: gamma_th must be positive and finite");
    }
}

HopSnrs draw_hops(const RelayConfig& cfg, const FogParams& fog, std::uint64_t master_seed,
                  std::uint64_t trial) {
    Stream f1(master_seed, trial, Channel::fog1);
    Stream p1(master_seed, trial, Channel::point1);
    Stream f2(master_seed, trial, Channel::fog2);
    Stream p2(master_seed, trial, Channel::point2);
    const double h1 = sample_channel_gain(cfg.hop1, fog, cfg.point1, f1, p1).gain();
    const double h2 = sample_channel_gain(cfg.hop2, fog, cfg.point2, f2, p2).gain();
    return {cfg.hop1.gamma0 * h1 * h1, cfg.hop2.gamma0 * h2 * h2};
}

double draw_direct(const LinkParams& link, const FogParams& fog, const PointingParams& pp,
                   std::uint64_t master_seed, std::uint64_t trial) {
    Stream f(master_seed, trial, Channel::fog1);
    Stream p(master_seed, trial, Channel::point1);
    const double h = sample_channel_gain(link, fog, pp, f, p).gain();
    return link.gamma0 * h * h;
}

// Written as lo * (hi / sum): each rounding step is monotone, so true <= harmonic <= min holds
// exactly in floating point, not only in real arithmetic.
double combine(SimMode mode, double g1, double g2) {
    const double lo = std::min(g1, g2);
    const double hi = std::max(g1, g2);
    const double sum = lo + hi;
    switch (mode) {
        case SimMode::relay_true: return lo * (hi / (sum + 1.0));
        case SimMode::relay_harmonic: return lo * (hi / sum);
        case SimMode::relay_min: return lo;
        case SimMode::direct: break;
    }
    throw std::invalid_argument("combine: direct mode has a single hop");
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double zq) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = zq * zq;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = zq * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // The bounds are exactly 0 and 1 at the ends; skip the rounding in centre -/+ half there.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

SimResult simulate(const SimSpec& spec, const RelayConfig& cfg, const FogParams& fog) {
    if (spec.mode == SimMode::direct) {
        throw std::invalid_argument("simulate: direct mode needs a single LinkParams");
    }
    cfg.validate();
    fog.validate();
    return run(spec, [&](std::uint64_t t) {
        const auto h = draw_hops(cfg, fog, spec.master_seed, t);
        return combine(spec.mode, h.gamma1, h.gamma2);
    });
}

SimResult simulate(const SimSpec& spec, const LinkParams& link, const FogParams& fog,
                   const PointingParams& pp) {
    if (spec.mode != SimMode::direct) {
        throw std::invalid_argument("simulate: relay modes need a RelayConfig");
    }
    fog.validate();
    pp.validate();
    return run(spec, [&](std::uint64_t t) {
        return draw_direct(link, fog, pp, spec.master_seed, t);
    });
}

std::vector<double> sample_snr(const LinkParams& link, const FogParams& fog,
                               const PointingParams& pp, std::uint64_t master_seed,
                               std::uint64_t n) {
    std::vector<double> out(n);
    for (std::uint64_t t = 0; t < n; ++t) out[t] = draw_direct(link, fog, pp, master_seed, t);
    return out;
}

}  // namespace owc::mc
