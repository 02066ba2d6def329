#include "owc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "owc/errors.hpp"
#include "owc/quadrature.hpp"
#include "owc/specfun.hpp"

namespace owc {

namespace {

constexpr double kFogConstant = 4.343;  // 10 / ln 10

// Beyond this |m l| the positive series for m < 0 gives way to the finite series (integer k)
// or quadrature (non-integer k).
constexpr double kSeriesLimit = 600.0;

// e^{-ρ² l} J for m < 0 and non-integer k, when |m l| is too large for the series:
// with y = l - s, e^{-ρ² l} J = e^{-z l} ∫_0^l (l - s)^{k-1} e^{m s} ds.
double kernel_by_quadrature(double l, const LinkParams& link) {
    quad::QuadSpec spec;
    spec.lower = 0.0;
    spec.upper = l;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-300;
    spec.endpoint_singularity = link.k < 1.0 ? quad::Singularity::upper : quad::Singularity::none;
    spec.label = "pointing-fog kernel";
    const double k = link.k;
    const double m = link.m;
    const auto r = quad::integrate(
        [&](double s) { return std::pow(l - s, k - 1.0) * std::exp(m * s); }, spec);
    return std::exp(-link.z * l) * r.value;
}

}  // namespace

void FogParams::validate() const {
    if (!(k > 0.0)) throw DomainError("FogParams: shape k must be positive");
    if (!(beta > 0.0)) throw DomainError("FogParams: scale beta must be positive");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double SystemParams::gamma0() const {
    const double pt = dbm_to_watt(pt_dbm);
    return 2.0 * pt * pt * responsivity * responsivity / noise_var;
}

void SystemParams::validate() const {
    if (!std::isfinite(pt_dbm)) throw DomainError("SystemParams: pt_dbm must be finite");
    if (!(responsivity > 0.0)) throw DomainError("SystemParams: responsivity must be positive");
    if (!(noise_var > 0.0)) throw DomainError("SystemParams: noise variance must be positive");
}

// Difference of logs, so subnormal gamma does not overflow the ratio.
double LinkParams::log_margin(double gamma) const { return 0.5 * (std::log(snr_cap()) - std::log(gamma)); }

LinkParams make_link(double d_km, const FogParams& fog, const PointingParams& pp,
                     const SystemParams& sys) {
    if (!(d_km > 0.0)) throw DomainError("make_link: distance must be positive");
    fog.validate();
    pp.validate();
    sys.validate();
    LinkParams link;
    link.d_km = d_km;
    link.k = fog.k;
    link.z = kFogConstant / (fog.beta * d_km);
    link.rho2 = pp.rho * pp.rho;
    link.A0 = pp.A0;
    link.m = link.z - link.rho2;
    link.gamma0 = sys.gamma0();
    return link;
}

double pointing_fog_kernel(double l, const LinkParams& link) {
    if (!(l > 0.0)) return 0.0;
    const double k = link.k;
    const double m = link.m;
    const double x = m * l;
    if (x > 0.0) {
        // J = l^k x^{-k} γ(k, x)
        return std::exp(k * std::log(l) - link.rho2 * l) * specfun::lower_gamma_scaled(k, x);
    }
    const double y = -x;
    if (y <= kSeriesLimit) {
        const double s = specfun::lower_gamma_scaled(k, x);
        return std::exp(k * std::log(l) - link.rho2 * l + std::log(s));
    }
    if (specfun::is_positive_integer(k)) {
        // J = m^{-k} [Γ(k) - Γ(k, m l)] with Γ(k, x) = e^{-x} (k-1)! Σ_{n<k} x^n/n!, so
        // e^{-ρ² l} J = m^{-k} [Γ(k) e^{-ρ² l} - e^{-z l} (k-1)! Σ (m l)^n/n!].
        const int n_terms = static_cast<int>(k);
        double term = 1.0;
        double poly = 1.0;
        for (int n = 1; n < n_terms; ++n) {
            term *= x / n;
            poly += term;
        }
        const double g = specfun::gamma_fn(k);
        return (g * std::exp(-link.rho2 * l) - g * poly * std::exp(-link.z * l)) / std::pow(m, k);
    }
    return kernel_by_quadrature(l, link);
}

double margin_density(double l, const LinkParams& link) {
    if (!(l > 0.0)) return 0.0;
    return link.rho2 * std::pow(link.z, link.k) * pointing_fog_kernel(l, link) /
           specfun::gamma_fn(link.k);
}

double margin_survival(double l, const LinkParams& link) {
    if (!(l > 0.0)) return 1.0;
    if (std::isinf(l)) return 0.0;
    const double k = link.k;
    const double z = link.z;
    const double g = specfun::gamma_fn(k);
    // z^k/(m^k u^{ρ²}) - z^k u^{-ρ²} Γ(k, m l)/(m^k Γ(k))  =  z^k e^{-ρ² l} J / Γ(k)
    const double pointing_terms = std::pow(z, k) * pointing_fog_kernel(l, link) / g;
    // z^k/(m^k Γ(k)) ((ρ²+m) l)^{-1} (m l)^k (e^{-(ρ²+m) l} + (k-1) E_n(2-k, (ρ²+m) l)),
    // with ρ² + m = z and m^{-k} (m l)^k = l^k.
    const double zl = z * l;
    double fog_terms = std::exp(-zl);
    if (k != 1.0) fog_terms += (k - 1.0) * specfun::exp_integral_en(2.0 - k, zl);
    fog_terms *= std::pow(zl, k - 1.0) / g;
    return std::clamp(pointing_terms + fog_terms, 0.0, 1.0);
}

double snr_pdf(double gamma, const LinkParams& link, DomainMode mode) {
    const double cap = link.snr_cap();
    if (!(gamma > 0.0) || gamma > cap) {
        if (mode == DomainMode::tolerant && (gamma > cap || gamma == 0.0)) return 0.0;
        throw DomainError("snr_pdf: gamma " + std::to_string(gamma) + " outside support (0, " +
                          std::to_string(cap) + "]");
    }
    return margin_density(link.log_margin(gamma), link) / (2.0 * gamma);
}

double snr_cdf(double gamma, const LinkParams& link, DomainMode mode) {
    const double cap = link.snr_cap();
    if (!(gamma > 0.0) || gamma > cap) {
        if (mode == DomainMode::tolerant) {
            if (gamma > cap) return 1.0;
            if (gamma <= 0.0) return 0.0;
        }
        throw DomainError("snr_cdf: gamma " + std::to_string(gamma) + " outside support (0, " +
                          std::to_string(cap) + "]");
    }
    return margin_survival(link.log_margin(gamma), link);
}

double fog_gain(double attenuation_db_per_km, double d_km) {
    return std::pow(10.0, -attenuation_db_per_km * d_km / 10.0);
}

double pointing_gain(double r, double A0, double w_zeq) {
    return A0 * std::exp(-2.0 * r * r / (w_zeq * w_zeq));
}

ChannelDraw sample_channel_gain(const LinkParams& link, const FogParams& fog,
                                const PointingParams& pp, mc::Stream& fog_rng,
                                mc::Stream& pointing_rng) {
    ChannelDraw draw;
    const double x = mc::gamma_variate(fog.k, fog.beta, fog_rng);
    draw.h_f = fog_gain(x, link.d_km);
    const double r = mc::rayleigh_variate(pp.jitter_sigma_s, pointing_rng);
    draw.h_p = pointing_gain(r, link.A0, pp.w_zeq);
    return draw;
}

}  // namespace owc
