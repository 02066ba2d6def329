#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "oracles.hpp"
#include "owc/errors.hpp"
#include "owc/quadrature.hpp"
#include "owc/relay.hpp"

using namespace owc;

namespace {

RelayConfig midpoint(double d_km, double pt_dbm = 15.0, double d_r = -1.0) {
    SystemParams sys;
    sys.pt_dbm = pt_dbm;
    return make_relay(d_km, d_r < 0 ? d_km / 2.0 : d_r, FogParams{}, PointingGeometry{}, sys);
}

const double kGth = std::pow(10.0, 0.6);

double rel(double a, double b) { return std::abs(a / b - 1.0); }

quad::QuadResult integrate_below(const std::function<double(double)>& f, double upper) {
    quad::QuadSpec s;
    s.lower = 0.0;
    s.upper = quad::kInfinity;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-16;
    s.endpoint_singularity = quad::Singularity::lower;
    return quad::integrate(
        [&](double v) {
            const double g = upper * std::exp(-v);
            return g > 0 ? f(g) * g : 0.0;
        },
        s);
}

}  // namespace

TEST_CASE("midpoint relay is symmetric") {
    const auto c = midpoint(1.0);
    CHECK(c.symmetric);
    CHECK(c.hop1.z == c.hop2.z);
    CHECK(c.d_km() == doctest::Approx(1.0));
    CHECK_FALSE(midpoint(1.0, 15.0, 0.3).symmetric);
    CHECK_THROWS(midpoint(1.0, 15.0, 1.2));
}

TEST_CASE("harmonic-mean density") {
    const auto c = midpoint(1.0);
    SUBCASE("normalizes") {
        CHECK(std::abs(outage_exact(2.0 * harmonic_cap(c), c, QuadMode::harmonic) - 1.0) <= 1e-5);
        CHECK(std::abs(outage_exact(2.0 * harmonic_cap(midpoint(1.6)), midpoint(1.6), QuadMode::harmonic) - 1.0) <=
              1e-5);
    }
    SUBCASE("symmetric integrand and half-interval doubling") {
        const double g = 1e-3 * harmonic_cap(c);
        gen::Gen gg(41);
        for (int i = 0; i < 20; ++i) {
            const double t = gg.uniform(0.01, 0.49);
            CHECK(harmonic_integrand(t, g, c) == doctest::Approx(harmonic_integrand(1.0 - t, g, c)).epsilon(1e-12));
        }
        quad::QuadSpec s;
        s.lower = g / c.hop1.snr_cap();
        s.upper = 0.5;
        s.rel_tol = 1e-12;
        s.abs_tol = 1e-300;
        s.max_subdivisions = 5000;
        s.endpoint_singularity = quad::Singularity::lower;
        const auto half = quad::integrate([&](double t) { return harmonic_integrand(t, g, c); }, s);
        CHECK(std::abs(2.0 * half.value / e2e_pdf_exact(g, c) - 1.0) <= 1e-9);
    }
    SUBCASE("mean below the min-bound mean") {
        CHECK(avg_snr_exact(c, QuadMode::harmonic) <= avg_snr_exact(c, QuadMode::bound));
    }
    SUBCASE("empty interval") {
        CHECK_THROWS_AS(e2e_pdf_exact(1.01 * harmonic_cap(c), c), DomainError);
        CHECK(e2e_pdf_exact(1.01 * harmonic_cap(c), c, DomainMode::tolerant) == 0.0);
    }
}

TEST_CASE("min-bound CDF and density") {
    const auto c = midpoint(1.0);
    // find F1 = 1/2 by bisection in log γ
    double lo = 1e-12 * c.hop1.snr_cap(), hi = c.hop1.snr_cap();
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (snr_cdf(mid, c.hop1) < 0.5 ? lo : hi) = mid;
    }
    CHECK(e2e_cdf_bound(hi, c) == doctest::Approx(0.75).epsilon(1e-9));

    gen::Gen g(42);
    for (int i = 0; i < 20; ++i) {
        const double x = c.hop1.snr_cap() * g.log_uniform(1e-8, 1.0);
        const double F1 = snr_cdf(x, c.hop1), f1 = snr_pdf(x, c.hop1);
        CHECK(e2e_cdf_bound(x, c) == doctest::Approx(2 * F1 - F1 * F1).epsilon(1e-14));
        CHECK(e2e_pdf_bound(x, c) == doctest::Approx(2 * f1 * (1 - F1)).epsilon(1e-14));
    }
    const auto r = integrate_below([&](double x) { return e2e_pdf_bound(x, c, DomainMode::tolerant); },
                                   c.hop1.snr_cap());
    CHECK(std::abs(r.value - 1.0) <= 1e-6);
}

TEST_CASE("closed-form outage") {
    const auto c = midpoint(1.0);
    CHECK(outage_closed_form(0.5 * c.hop1.snr_cap(), c) == 1.0);  // P' clamps to 1, and 2 - 1 = 1
    CHECK(outage_closed_form(1e-60 * c.hop1.snr_cap(), c) < 1e-12);
    CHECK(outage_closed_form(1e-60 * c.hop1.snr_cap(), c) >= 0.0);
    CHECK_THROWS_AS(outage_closed_form(c.hop1.snr_cap(), c), DomainError);
    CHECK_THROWS_AS(outage_closed_form(0.0, c), DomainError);
    CHECK_THROWS_AS(outage_closed_form(kGth, midpoint(1.0, 15.0, 0.3)), NotSymmetric);
}

TEST_CASE("exact outage ordering and consistency") {
    const auto c = midpoint(1.0);
    double prev_h = 0.0;
    for (double db : {-10.0, 0.0, 6.0, 20.0, 30.0, 40.0}) {
        const double g = std::pow(10.0, db / 10.0);
        const double b = outage_exact(g, c, QuadMode::bound);
        const double h = outage_exact(g, c, QuadMode::harmonic);
        CHECK(std::abs(b - e2e_cdf_bound(g, c)) <= 1e-7);
        CHECK(h >= b);
        CHECK(h >= prev_h);
        CHECK(h <= 1.0);
        CHECK(b >= 0.0);
        prev_h = h;
    }
    double prev = 1.0;
    for (double pt = 0.0; pt <= 30.0; pt += 3.0) {
        const double p = outage_exact(kGth, midpoint(0.8, pt), QuadMode::harmonic);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("diversity order") {
    CHECK(diversity_order(FogParams{}, 0.8) == doctest::Approx(oracle::kDiversityAt08).epsilon(1e-14));
    CHECK(diversity_order(FogParams{}, 0.4) == 2.0 * diversity_order(FogParams{}, 0.8));
}

TEST_CASE("k=2 average SNR is exact for the min bound") {
    for (double d : {0.6, 1.0, 2.0}) {
        for (double pt : {10.0, 20.0, 30.0}) {
            const auto c = midpoint(d, pt);
            CHECK(rel(avg_snr_k2(c), avg_snr_exact(c, QuadMode::bound)) <= 1e-6);
            CHECK(ergodic_rate_k2(c).bits <= ergodic_rate_exact(c, QuadMode::bound));
            CHECK(avg_snr_k2(c) > direct_avg_snr_closed(make_link(d, FogParams{}, pointing_params(d * 1000.0, PointingGeometry{}),
                                                                   [&] { SystemParams s; s.pt_dbm = pt; return s; }())));
        }
    }
    CHECK_THROWS_AS(avg_snr_k2(make_relay(1.0, 0.5, FogParams{1.5, 13.12}, PointingGeometry{}, SystemParams{})),
                    DomainError);
}

TEST_CASE("negative k=2 rate bound is flagged, not clamped") {
    const auto r = ergodic_rate_k2(midpoint(1.6, 15.0));
    CHECK(r.bits < 0.0);
    CHECK(r.bound_invalid);
    CHECK_FALSE(ergodic_rate_k2(midpoint(1.0, 15.0)).bound_invalid);
}

TEST_CASE("general-k average SNR transcription") {
    // A single γ0 factor: scaling γ0 by 100 scales the result by 100.
    const auto a = midpoint(1.0, 15.0), b = midpoint(1.0, 25.0);
    CHECK(avg_snr_closed(b) == doctest::Approx(100.0 * avg_snr_closed(a)).epsilon(1e-12));
    CHECK_THROWS_AS(avg_snr_closed(midpoint(1.0, 15.0, 0.3)), NotSymmetric);
    CHECK_THROWS_AS(avg_snr_closed(make_relay(1.0, 0.5, FogParams{0.4, 13.12}, PointingGeometry{}, SystemParams{})),
                    DomainError);
}

TEST_CASE("m near zero defers to quadrature") {
    const FogParams fog;
    const double z = 4.343 / (fog.beta * 0.5);
    const auto pp = PointingParams::from_direct(0.02, std::sqrt(z), 0.28);
    const auto c = make_relay(0.5, 0.5, fog, pp, pp, SystemParams{});
    REQUIRE(std::abs(c.hop1.m) < kEpsilonM);
    const double v = avg_snr_closed(c);
    CHECK(std::isfinite(v));
    CHECK(rel(v, avg_snr_exact(c, QuadMode::bound)) <= 1e-6);
    CHECK(std::isfinite(ergodic_rate_closed(c).bits));
}

TEST_CASE("integral identities") {
    CHECK(rel(log_power_moment(2.0, 2.0), 2.0) <= 1e-15);
    CHECK(rel(power_incomplete_gamma_moment(1.5, 3.0), oracle::kEq17n3k15) <= 1e-13);
}

TEST_CASE("direct baseline") {
    const auto link = midpoint(2.0).hop1;  // any single link
    const auto full = make_link(1.0, FogParams{}, pointing_params(1000.0, PointingGeometry{}), SystemParams{});
    const double closed = direct_avg_snr_closed(full);
    const double k2 = full.z * full.z * full.A0 * full.A0 * full.rho2 * full.gamma0 /
                      ((2.0 + full.rho2) * std::pow(2.0 + full.z, 2));
    CHECK(rel(closed, k2) <= 1e-14);
    CHECK(rel(closed, direct_avg_snr_exact(full)) <= 1e-6);
    const auto rep = direct_metrics(full, kGth, Method::closed_form);
    CHECK(*rep.outage == snr_cdf(kGth, full));
    const auto capped = direct_metrics(link, 2.0 * link.snr_cap(), Method::closed_form);
    CHECK(*capped.outage == 1.0);
    CHECK_FALSE(capped.note.empty());
}

TEST_CASE("property: hop swap leaves bound metrics unchanged") {
    gen::Gen g(43);
    for (int i = 0; i < 5; ++i) {
        const double dr = g.uniform(0.25, 0.75);
        const auto a = midpoint(1.0, 15.0, dr), b = midpoint(1.0, 15.0, 1.0 - dr);
        for (double db : {0.0, 6.0, 15.0}) {
            const double x = std::pow(10.0, db / 10.0);
            CHECK(e2e_cdf_bound(x, a) == doctest::Approx(e2e_cdf_bound(x, b)).epsilon(1e-12));
            CHECK(outage_exact(x, a, QuadMode::bound) == doctest::Approx(outage_exact(x, b, QuadMode::bound)).epsilon(1e-8));
        }
        CHECK(avg_snr_exact(a, QuadMode::bound) == doctest::Approx(avg_snr_exact(b, QuadMode::bound)).epsilon(1e-8));
    }
}

TEST_CASE("degenerate relay: strong second hop leaves the first") {
    auto gap_at = [](double ratio) {
        auto c = midpoint(1.0);
        c.hop2.gamma0 *= ratio;
        c.symmetric = false;
        double worst = 0.0;
        for (double frac : {1e-6, 1e-3, 0.1, 0.5}) {
            const double x = frac * c.hop1.snr_cap();
            worst = std::max(worst, std::abs(e2e_cdf_bound(x, c) - snr_cdf(x, c.hop1)));
        }
        return worst;
    };
    SUBCASE("gap shrinks as the second hop strengthens") {
        double prev = 1.0;
        for (double ratio : {1e2, 1e4, 1e6, 1e8, 1e12}) {
            const double g = gap_at(ratio);
            CHECK(g < prev);
            prev = g;
        }
        CHECK(prev <= 1e-3);
    }
    SUBCASE("within 1e-3 at a gamma0 ratio of 1e6") {
        CHECK(gap_at(1e6) <= 1e-3);
    }
}
