#pragma once

#include <optional>
#include <string>

#include "owc/channel.hpp"
#include "owc/geometry.hpp"

namespace owc {

/// Two-hop amplify-and-forward link. hop1 is source→relay, hop2 relay→destination.
struct RelayConfig {
    LinkParams hop1;
    LinkParams hop2;
    PointingParams point1;  ///< pointing parameters behind hop1 (used by the sampler)
    PointingParams point2;
    bool symmetric = false;

    double d_km() const { return hop1.d_km + hop2.d_km; }
    void validate() const;
};

/// Relay placed d_r km from the source on a d km path, pointing derived from beam optics.
RelayConfig make_relay(double d_km, double d_r_km, const FogParams& fog,
                       const PointingGeometry& geom, const SystemParams& sys);

/// Relay with measured per-hop pointing parameters.
RelayConfig make_relay(double d1_km, double d2_km, const FogParams& fog, const PointingParams& pp1,
                       const PointingParams& pp2, const SystemParams& sys);

/// Tolerances for every quadrature-backed metric. The defaults are what the library uses;
/// loosening them is how the validate command runs its negative control.
struct NumericsOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
};

/// How the quadrature oracle combines the two hops.
///   bound:    min(γ1, γ2)
///   harmonic: γ1γ2/(γ1 + γ2), the AF SNR without the +1 in the denominator
enum class QuadMode { bound, harmonic };

/// |z_r - ρ²| below which closed forms that divide by powers of m defer to quadrature.
inline constexpr double kEpsilonM = 1e-6;

/// Largest harmonic-mean SNR, cap1·cap2 / (cap1 + cap2).
double harmonic_cap(const RelayConfig& cfg);

/// The integrand of the harmonic-mean density in its original t variable,
/// γ f1(γ/t) f2(γ/(1-t)) / (t²(1-t)²); zero where either hop is outside its support.
double harmonic_integrand(double t, double gamma, const RelayConfig& cfg);

/// Density of γ1γ2/(γ1 + γ2). Integrated over t ∈ (γ/cap1, 1 - γ/cap2) in log-margin
/// coordinates, split at t = ½. Strict mode throws DomainError when that interval is empty.
double e2e_pdf_exact(double gamma, const RelayConfig& cfg, DomainMode mode = DomainMode::strict,
                     const NumericsOptions& num = {});

/// CDF and density of min(γ1, γ2): F1 + F2 - F1F2 and f1 + f2 - f1F2 - f2F1.
double e2e_cdf_bound(double gamma, const RelayConfig& cfg, DomainMode mode = DomainMode::strict);
double e2e_pdf_bound(double gamma, const RelayConfig& cfg, DomainMode mode = DomainMode::strict);

/// Closed-form outage 2P' - P'² with P' from the incomplete-gamma approximation of the hop CDF.
/// Requires a symmetric relay and γ_th inside (0, A0²γ0). P' is clamped to [0, 1].
double outage_closed_form(double gamma_th, const RelayConfig& cfg);

/// Outage from quadrature of the chosen end-to-end density over (0, γ_th).
double outage_exact(double gamma_th, const RelayConfig& cfg, QuadMode mode,
                    const NumericsOptions& num = {});

/// 2.1715 / (β d_r), i.e. z_r / 2.
double diversity_order(const FogParams& fog, double d_r_km);

struct RateEstimate {
    double bits = 0.0;
    bool bound_invalid = false;  ///< set when a lower bound on the rate came out negative
};

/// Average SNR and rate approximations for a general fog shape k (symmetric relay).
double avg_snr_closed(const RelayConfig& cfg, const NumericsOptions& num = {});
RateEstimate ergodic_rate_closed(const RelayConfig& cfg, const NumericsOptions& num = {});

/// Average SNR and rate lower bound for k = 2 (symmetric relay).
double avg_snr_k2(const RelayConfig& cfg);
RateEstimate ergodic_rate_k2(const RelayConfig& cfg);

/// Quadrature of E[γ] and E[log2(1 + γ)] under the chosen combiner.
double avg_snr_exact(const RelayConfig& cfg, QuadMode mode, const NumericsOptions& num = {});
double ergodic_rate_exact(const RelayConfig& cfg, QuadMode mode, const NumericsOptions& num = {});

/// Closed-form identities used by the average-SNR derivation.
///   ∫_1^∞ (ln u)^p u^{-n} du         = Γ(p+1) / (n-1)^{p+1}
///   ∫_1^∞ u^{-n} Γ(k, n ln u) du     = (1 - n^k (2n-1)^{-k}) Γ(k) / (n-1)
double log_power_moment(double p, double n);
double power_incomplete_gamma_moment(double k, double n);

/// Single-link baseline.
/// avg_snr: A0²γ0 (z/(z+2))^k ρ²/(ρ²+2), which for k = 2 is z²A0²ρ²γ0 / ((2+ρ²)(2+z)²).
/// rate: E[log2 γ], a lower bound on E[log2(1+γ)].
double direct_avg_snr_closed(const LinkParams& link);
RateEstimate direct_rate_closed(const LinkParams& link);
double direct_avg_snr_exact(const LinkParams& link, const NumericsOptions& num = {});
double direct_rate_exact(const LinkParams& link, const NumericsOptions& num = {});

enum class Method { closed_form, quadrature, monte_carlo };
std::string to_string(Method m);

struct MetricReport {
    Method method = Method::closed_form;
    std::optional<double> outage;
    std::optional<double> avg_snr;
    std::optional<double> ergodic_rate;
    /// Half-width (Monte Carlo) or error estimate (quadrature) per metric.
    std::optional<double> outage_lo;
    std::optional<double> outage_hi;
    std::optional<double> avg_snr_uncertainty;
    std::optional<double> rate_uncertainty;
    bool bound_invalid = false;
    std::string note;

    std::optional<double> avg_snr_db() const;
};

/// Direct-link numbers for relay comparisons. The closed-form outage is the hop CDF itself;
/// a threshold at or above the support cap reports outage 1 with a note.
MetricReport direct_metrics(const LinkParams& link, double gamma_th, Method method,
                            const NumericsOptions& num = {});

}  // namespace owc
