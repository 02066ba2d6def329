#pragma once

#include "owc/geometry.hpp"
#include "owc/random.hpp"

namespace owc {

/// Gamma-distributed fog attenuation: shape k, scale β in dB/km.
struct FogParams {
    double k = 2.0;
    double beta = 13.12;

    void validate() const;
};

struct SystemParams {
    double pt_dbm = 15.0;
    double responsivity = 0.41;  ///< A/W
    double noise_var = 1e-14;    ///< A²

    /// Unfaded electrical SNR 2 P_t² R² / σ_w² with P_t [W] = 10^{(dBm - 30)/10}.
    double gamma0() const;
    void validate() const;
};

double dbm_to_watt(double dbm);

/// Per-hop constants of the combined fog / pointing-error SNR law.
///
/// Writing u = A0 / √(γ/γ0) and l = ln u, the SNR is γ = A0² γ0 e^{-2l} where
/// l ~ Gamma(k, rate z) + Exp(rate ρ²). Support of γ is (0, A0² γ0].
struct LinkParams {
    double d_km = 0.0;
    double k = 0.0;       ///< fog shape
    double z = 0.0;       ///< 4.343 / (β d)
    double rho2 = 0.0;    ///< ρ²
    double A0 = 0.0;
    double m = 0.0;       ///< z - ρ², any sign
    double gamma0 = 0.0;

    double snr_cap() const { return A0 * A0 * gamma0; }
    /// l = ln(A0 / √(γ/γ0)); zero at the support cap.
    double log_margin(double gamma) const;
};

LinkParams make_link(double d_km, const FogParams& fog, const PointingParams& pp,
                     const SystemParams& sys);

/// strict: throw DomainError outside (0, A0²γ0]; tolerant: return the limiting value.
enum class DomainMode { strict, tolerant };

/// Single-hop SNR density.
double snr_pdf(double gamma, const LinkParams& link, DomainMode mode = DomainMode::strict);

/// Single-hop SNR CDF, evaluated term by term from the incomplete-gamma / E_n closed form.
double snr_cdf(double gamma, const LinkParams& link, DomainMode mode = DomainMode::strict);

/// Density of the log margin l at l >= 0: ρ² z^k e^{-ρ² l} ∫_0^l y^{k-1} e^{-m y} dy / Γ(k).
/// snr_pdf(γ) = margin_density(l) / (2γ).
double margin_density(double l, const LinkParams& link);

/// P(L >= l), which equals snr_cdf at the matching γ.
double margin_survival(double l, const LinkParams& link);

/// e^{-ρ² l} ∫_0^l y^{k-1} e^{-m y} dy, evaluated without overflow for either sign of m.
double pointing_fog_kernel(double l, const LinkParams& link);

/// h_f = 10^{-X d / 10} for fog attenuation X [dB/km] over d [km].
double fog_gain(double attenuation_db_per_km, double d_km);

/// h_p = A0 exp(-2 r² / w_zeq²) for radial displacement r [m].
double pointing_gain(double r, double A0, double w_zeq);

struct ChannelDraw {
    double h_f = 1.0;
    double h_p = 0.0;
    double gain() const { return h_f * h_p; }
};

/// One realization of h = h_f h_p. Fog and pointing use separate streams.
ChannelDraw sample_channel_gain(const LinkParams& link, const FogParams& fog,
                                const PointingParams& pp, mc::Stream& fog_rng,
                                mc::Stream& pointing_rng);

}  // namespace owc
