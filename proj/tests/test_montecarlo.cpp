#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "owc/montecarlo.hpp"
#include "owc/random.hpp"
#include "owc/relay.hpp"

using namespace owc;

namespace {

RelayConfig midpoint(double d_km) { return make_relay(d_km, d_km / 2.0, FogParams{}, PointingGeometry{}, SystemParams{}); }

struct Moments {
    double mean, se, var;
};

template <class F>
Moments sample_moments(int n, F draw) {
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw(i);
        s += x;
        s2 += x * x;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    return {mean, std::sqrt(var / n), var};
}

}  // namespace

TEST_CASE("gamma variates") {
    const int n = 1'000'000;
    const auto m = sample_moments(n, [](int i) {
        mc::Stream s(1, i, 0);
        return mc::gamma_variate(2.0, 13.12, s);
    });
    CHECK(std::abs(m.mean - 26.24) <= 3.0 * m.se);
    // variance k β² within 4 standard errors; SE of a sample variance is √((μ4 - σ⁴)/n), μ4 = 3k(k+2)β⁴
    const double var_se = std::sqrt((24.0 - 4.0) * std::pow(13.12, 4) / n);
    CHECK(std::abs(m.var - 2.0 * 13.12 * 13.12) <= 4.0 * var_se);

    // k = 1 is exponential: median β ln 2
    std::vector<double> xs(200'001);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mc::Stream s(2, i, 0);
        xs[i] = mc::gamma_variate(1.0, 3.0, s);
    }
    std::nth_element(xs.begin(), xs.begin() + 100'000, xs.end());
    // median SE = 1 / (2 f(median) √n), f(median) = 1/(2β)
    const double med_se = 3.0 / std::sqrt(double(xs.size()));
    CHECK(std::abs(xs[100'000] - 3.0 * std::log(2.0)) <= 3.0 * med_se);

    const auto small = sample_moments(400'000, [](int i) {
        mc::Stream s(3, i, 0);
        return mc::gamma_variate(0.4, 2.0, s);
    });
    CHECK(std::abs(small.mean - 0.8) <= 4.0 * small.se);
}

TEST_CASE("rayleigh variates") {
    const int n = 1'000'000;
    const auto m = sample_moments(n, [](int i) {
        mc::Stream s(4, i, 1);
        return mc::rayleigh_variate(0.28, s);
    });
    CHECK(std::abs(m.mean - oracle::kRayleighMean028) <= 3.0 * m.se);
    const double var = (2.0 - M_PI / 2.0) * 0.28 * 0.28;
    const double kurtosis = (32.0 - 3.0 * M_PI * M_PI) / std::pow(4.0 - M_PI, 2) + 3.0;
    const double mu4 = kurtosis * var * var;
    CHECK(std::abs(m.var - var) <= 4.0 * std::sqrt((mu4 - var * var) / n));
}

TEST_CASE("streams are addressed by (seed, trial, channel)") {
    mc::Stream a(5, 10, 2), b(5, 10, 2), c(5, 10, 3), d(5, 11, 2);
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("combiner ordering on coupled draws") {
    const auto c = midpoint(1.0);
    for (std::uint64_t t = 0; t < 100'000; ++t) {
        const auto h = mc::draw_hops(c, FogParams{}, 20200601, t);
        const double tr = mc::combine(mc::SimMode::relay_true, h.gamma1, h.gamma2);
        const double hm = mc::combine(mc::SimMode::relay_harmonic, h.gamma1, h.gamma2);
        const double mn = mc::combine(mc::SimMode::relay_min, h.gamma1, h.gamma2);
        REQUIRE(tr <= hm);
        REQUIRE(hm <= mn);
    }
    CHECK_THROWS(mc::combine(mc::SimMode::direct, 1.0, 1.0));
}

TEST_CASE("min-mode outage matches the min-bound CDF") {
    const auto c = midpoint(1.0);
    mc::SimSpec spec;
    spec.mode = mc::SimMode::relay_min;
    const auto r = mc::simulate(spec, c, FogParams{});
    const double half = (r.outage_hi - r.outage_lo) / 2.0;
    CHECK(std::abs(r.outage_hat - e2e_cdf_bound(spec.gamma_th, c)) <= 3.0 * half);
    CHECK(r.trials_used == spec.trials);
    CHECK(r.outage_lo <= r.outage_hat);
    CHECK(r.outage_hat <= r.outage_hi);
    CHECK(r.avg_snr_se > 0.0);
    CHECK(r.rate_se > 0.0);
}

TEST_CASE("mode ordering of outage and reproducibility across chunking") {
    const auto c = midpoint(1.6);
    mc::SimSpec spec;
    spec.trials = 200'000;
    spec.mode = mc::SimMode::relay_true;
    const auto tr = mc::simulate(spec, c, FogParams{});
    spec.mode = mc::SimMode::relay_harmonic;
    const auto hm = mc::simulate(spec, c, FogParams{});
    spec.mode = mc::SimMode::relay_min;
    const auto mn = mc::simulate(spec, c, FogParams{});
    CHECK(tr.outages >= hm.outages);
    CHECK(hm.outages >= mn.outages);

    spec.mode = mc::SimMode::relay_true;
    spec.chunk_size = 1'000;
    spec.threads = 3;
    const auto a = mc::simulate(spec, c, FogParams{});
    spec.chunk_size = 100'000;
    spec.threads = 1;
    const auto b = mc::simulate(spec, c, FogParams{});
    CHECK(a == b);
    CHECK(a == tr);
}

TEST_CASE("interval half-width shrinks like 1/sqrt(n)") {
    const auto c = midpoint(1.0);
    mc::SimSpec spec;
    spec.trials = 200'000;
    const auto a = mc::simulate(spec, c, FogParams{});
    spec.trials = 400'000;
    const auto b = mc::simulate(spec, c, FogParams{});
    const double ratio = (b.outage_hi - b.outage_lo) / (a.outage_hi - a.outage_lo);
    CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) <= 0.2 / std::sqrt(2.0));
}

TEST_CASE("direct simulation and spec validation") {
    const auto link = midpoint(2.0).hop1;  // 1 km link
    mc::SimSpec spec;
    spec.trials = 400'000;
    spec.mode = mc::SimMode::direct;
    const auto r = mc::simulate(spec, link, FogParams{}, pointing_params(1000.0, PointingGeometry{}));
    CHECK(std::abs(r.outage_hat - snr_cdf(spec.gamma_th, link)) <= 1.5 * (r.outage_hi - r.outage_lo));
    spec.mode = mc::SimMode::relay_min;
    CHECK_THROWS(mc::simulate(spec, link, FogParams{}, pointing_params(1000.0, PointingGeometry{})));
    spec.trials = 0;
    CHECK_THROWS(spec.validate());
    CHECK(mc::sim_mode_from_string("relay-harmonic") == mc::SimMode::relay_harmonic);
    CHECK(mc::sim_mode_from_string("relay_true") == mc::SimMode::relay_true);
    CHECK(mc::to_string(mc::SimMode::relay_min) == "relay-min");
    CHECK_THROWS(mc::sim_mode_from_string("bogus"));
}

TEST_CASE("Wilson interval") {
    const auto [lo, hi] = mc::wilson_interval(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi > 0.0);
    CHECK(hi < 0.05);
    const auto [lo2, hi2] = mc::wilson_interval(50, 100);
    CHECK(lo2 == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(hi2 == doctest::Approx(0.5962).epsilon(1e-3));
}
