#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "owc/errors.hpp"
#include "owc/geometry.hpp"
#include "owc/specfun.hpp"

using namespace owc;

TEST_CASE("beam waist is linear in distance") {
    PointingGeometry g;
    CHECK(beam_waist(1000.0, g) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(beam_waist(500.0, g) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(g.rayleigh_distance() == doctest::Approx(oracle::kRayleighDistance).epsilon(1e-13));
    CHECK_THROWS_AS(beam_waist(50.0, g), DomainError);
    CHECK_THROWS_AS(beam_waist(120.0, g), DomainError);
    CHECK_NOTHROW(beam_waist(122.0, g));
}

TEST_CASE("pointing parameters at 500 m") {
    PointingGeometry g;
    const auto pp = pointing_params(500.0, g);
    CHECK(pp.upsilon == doctest::Approx(oracle::kUpsilon500).epsilon(1e-13));
    CHECK(pp.A0 == doctest::Approx(oracle::kA0at500).epsilon(1e-12));
    CHECK(pp.A0 == doctest::Approx(std::pow(specfun::erf(pp.upsilon), 2)).epsilon(1e-15));
    CHECK(pp.w_z == doctest::Approx(1.25).epsilon(1e-15));
    // paper convention: w_zeq = w_z erf(υ) / (2υ e^{-υ²})
    const double wzeq = pp.w_z * specfun::erf(pp.upsilon) / (2.0 * pp.upsilon * std::exp(-pp.upsilon * pp.upsilon));
    CHECK(pp.w_zeq == doctest::Approx(wzeq).epsilon(1e-14));
    CHECK(pp.rho == doctest::Approx(wzeq / (2.0 * 0.28)).epsilon(1e-14));
}

TEST_CASE("doubling jitter halves rho and keeps A0") {
    PointingGeometry g;
    const auto a = pointing_params(700.0, g);
    g.jitter_sigma_s *= 2.0;
    const auto b = pointing_params(700.0, g);
    CHECK(b.rho == a.rho / 2.0);
    CHECK(b.A0 == a.A0);
}

TEST_CASE("literature convention squares the width relation") {
    PointingGeometry g;
    g.convention = WzeqConvention::literature;
    const auto pp = pointing_params(1000.0, g);
    const double v = pp.upsilon;
    const double wzeq2 = pp.w_z * pp.w_z * std::sqrt(M_PI) * specfun::erf(v) / (2.0 * v * std::exp(-v * v));
    CHECK(pp.w_zeq == doctest::Approx(std::sqrt(wzeq2)).epsilon(1e-14));
    g.convention = WzeqConvention::paper;
    CHECK(pointing_params(1000.0, g).A0 == pp.A0);
}

TEST_CASE("property: A0 and upsilon strictly decreasing over 20 distances") {
    PointingGeometry g;
    double prev_a0 = 1.0, prev_u = 1e9;
    for (int i = 0; i < 20; ++i) {
        const double d = 130.0 + 150.0 * i;
        const auto pp = pointing_params(d, g);
        CHECK(pp.A0 < prev_a0);
        CHECK(pp.upsilon < prev_u);
        CHECK(pp.A0 > 0.0);
        CHECK(pp.rho * 2.0 * g.jitter_sigma_s == doctest::Approx(pp.w_zeq).epsilon(1e-15));
        prev_a0 = pp.A0;
        prev_u = pp.upsilon;
    }
}

TEST_CASE("determinism and direct entry") {
    PointingGeometry g;
    const auto a = pointing_params(812.5, g), b = pointing_params(812.5, g);
    CHECK(a.A0 == b.A0);
    CHECK(a.rho == b.rho);
    CHECK(a.w_zeq == b.w_zeq);
    const auto d = PointingParams::from_direct(0.05, 1.2, 0.28);
    CHECK(d.A0 == 0.05);
    CHECK(d.rho == 1.2);
    CHECK(d.w_zeq == doctest::Approx(1.2 * 2 * 0.28));
    CHECK_THROWS(PointingParams::from_direct(1.5, 1.0, 0.28).validate());
    PointingGeometry bad;
    bad.aperture_radius = -1.0;
    CHECK_THROWS(bad.validate());
}
