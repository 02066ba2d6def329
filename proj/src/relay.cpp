#include "owc/relay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "owc/errors.hpp"
#include "owc/quadrature.hpp"
#include "owc/specfun.hpp"

namespace owc {

double harmonic_cap(const RelayConfig& cfg);

namespace {

constexpr double kLn2 = std::numbers::ln2;

quad::QuadSpec spec_for(double lo, double hi, quad::Singularity s, const std::string& label,
                        const NumericsOptions& num) {
    quad::QuadSpec spec;
    spec.lower = lo;
    spec.upper = hi;
    spec.rel_tol = num.rel_tol;
    spec.abs_tol = num.abs_tol;
    spec.max_subdivisions = num.max_subdivisions;
    spec.endpoint_singularity = s;
    spec.label = label;
    return spec;
}

// The inner harmonic-density integral runs tighter than the outer one so that its own error
// does not dominate the outer estimate.
NumericsOptions inner_options(const NumericsOptions& num) {
    NumericsOptions inner = num;
    inner.rel_tol = std::max(num.rel_tol * 1e-2, 1e-13);
    inner.abs_tol = 1e-300;
    return inner;
}

// ∫_0^U w(γ) f(γ) dγ with γ = U e^{-v}, v ∈ (0, ∞).
double integrate_below(double upper, const std::function<double(double)>& weighted_density,
                       bool upper_is_cap, const std::string& label, const NumericsOptions& num) {
    const auto spec = spec_for(0.0, quad::kInfinity,
                               upper_is_cap ? quad::Singularity::lower : quad::Singularity::none,
                               label, num);
    const auto r = quad::integrate(
        [&](double v) {
            const double g = upper * std::exp(-v);
            if (g <= 0.0) return 0.0;
            return weighted_density(g) * g;
        },
        spec);
    return r.value;
}

double min_cap(const RelayConfig& cfg) {
    return std::min(cfg.hop1.snr_cap(), cfg.hop2.snr_cap());
}

void require_symmetric(const RelayConfig& cfg, const char* what) {
    if (!cfg.symmetric) {
        throw NotSymmetric(std::string(what) +
                           ": closed form covers only a relay at the midpoint; use quadrature or "
                           "Monte Carlo for asymmetric placements");
    }
}

bool same_link(const LinkParams& a, const LinkParams& b) {
    return a.d_km == b.d_km && a.k == b.k && a.z == b.z && a.rho2 == b.rho2 && a.A0 == b.A0 &&
           a.m == b.m && a.gamma0 == b.gamma0;
}

RelayConfig assemble(double d1_km, double d2_km, const FogParams& fog, const PointingParams& pp1,
                     const PointingParams& pp2, const SystemParams& sys) {
    RelayConfig cfg;
    cfg.hop1 = make_link(d1_km, fog, pp1, sys);
    cfg.point1 = pp1;
    const bool mid = std::abs(d1_km - d2_km) <= 1e-12 * (d1_km + d2_km);
    if (mid && pp1.A0 == pp2.A0 && pp1.rho == pp2.rho) {
        cfg.hop2 = cfg.hop1;
        cfg.point2 = pp1;
        cfg.symmetric = true;
    } else {
        cfg.hop2 = make_link(d2_km, fog, pp2, sys);
        cfg.point2 = pp2;
        cfg.symmetric = false;
    }
    return cfg;
}

void require_k_domain(const LinkParams& h, const char* what) {
    if (h.m < 0.0 && !specfun::is_positive_integer(h.k)) {
        throw DomainError(std::string(what) +
                          ": closed form takes a negative base to a non-integer power when "
                          "z_r < rho^2 and k is not an integer");
    }
}

// Harmonic-mean density at γ = cap e^{-v}, cap = c1 c2/(c1 + c2).
//
// With t = (γ/c1) e^{2 l1} on the hop-1 side of t = ½ and 1 - t = (γ/c2) e^{2 l2} on the hop-2
// side, the t-integrand becomes f_L1(l1) f_L2(l2) / (2γ(1-t)) dl1 (and its mirror image). The
// partner margin is l2 = ½ log1p((1+r) expm1(v) - r expm1(2 l1)) with r = c2/c1, which stays
// accurate as γ approaches the cap and both margins shrink to zero.
double harmonic_density_below_cap(double v, const RelayConfig& cfg, const NumericsOptions& num) {
    if (!(v > 0.0)) return 0.0;
    const double c1 = cfg.hop1.snr_cap();
    const double c2 = cfg.hop2.snr_cap();
    const double r = c2 / c1;
    const double gamma = harmonic_cap(cfg) * std::exp(-v);
    const double ev = std::expm1(v);
    const double log_t1 = std::log(r / (1.0 + r)) - v;    // ln(γ/c1); t = e^{2 l1 + log_t1}
    const double log_s2 = std::log(1.0 / (1.0 + r)) - v;  // ln(γ/c2); 1 - t = e^{2 l2 + log_s2}
    const auto inner = inner_options(num);
    const auto& h1 = cfg.hop1;
    const auto& h2 = cfg.hop2;

    double total = 0.0;
    const double l1_end = std::min(0.5 * (v + std::log((1.0 + r) / (2.0 * r))),
                                   0.5 * std::log1p((1.0 + r) / r * ev));
    if (l1_end > 0.0) {
        const auto spec =
            spec_for(0.0, l1_end, quad::Singularity::lower, "harmonic density (hop 1 side)", inner);
        total += quad::integrate(
                     [&](double l1) {
                         const double l2 =
                             0.5 * std::log1p((1.0 + r) * ev - r * std::expm1(2.0 * l1));
                         if (!(l2 > 0.0)) return 0.0;
                         // t <= ½ on this side, so 1 - t carries no cancellation.
                         const double t = std::exp(2.0 * l1 + log_t1);
                         return margin_density(l1, h1) * margin_density(l2, h2) /
                                (2.0 * gamma * (1.0 - t));
                     },
                     spec)
                     .value;
    }
    const double l2_end = std::min(0.5 * (v + std::log((1.0 + r) / 2.0)),
                                   0.5 * std::log1p((1.0 + r) * ev));
    if (l2_end > 0.0) {
        const double ri = 1.0 / r;
        const auto spec =
            spec_for(0.0, l2_end, quad::Singularity::lower, "harmonic density (hop 2 side)", inner);
        total += quad::integrate(
                     [&](double l2) {
                         const double l1 =
                             0.5 * std::log1p((1.0 + ri) * ev - ri * std::expm1(2.0 * l2));
                         if (!(l1 > 0.0)) return 0.0;
                         const double s = std::exp(2.0 * l2 + log_s2);
                         return margin_density(l1, h1) * margin_density(l2, h2) /
                                (2.0 * gamma * (1.0 - s));
                     },
                     spec)
                     .value;
    }
    return total;
}

// ∫_0^U w(γ) f(γ) dγ for the harmonic-mean density, carried out in v = ln(cap/γ).
double integrate_harmonic(const RelayConfig& cfg, double upper,
                          const std::function<double(double)>& weight, const std::string& label,
                          const NumericsOptions& num) {
    const double cap = harmonic_cap(cfg);
    const double v0 = upper >= cap ? 0.0 : std::log(cap / upper);
    const auto spec =
        spec_for(0.0, quad::kInfinity,
                 v0 == 0.0 ? quad::Singularity::lower : quad::Singularity::none, label, num);
    const auto r = quad::integrate(
        [&](double v) {
            const double g = cap * std::exp(-(v0 + v));
            if (g <= 0.0) return 0.0;
            return weight(g) * harmonic_density_below_cap(v0 + v, cfg, num) * g;
        },
        spec);
    return r.value;
}

}  // namespace

void RelayConfig::validate() const {
    if (!(hop1.d_km > 0.0 && hop2.d_km > 0.0)) {
        throw DomainError("RelayConfig: hop distances must be positive");
    }
    if (symmetric && !same_link(hop1, hop2)) {
        throw DomainError("RelayConfig: marked symmetric but hop parameters differ");
    }
}

RelayConfig make_relay(double d_km, double d_r_km, const FogParams& fog,
                       const PointingGeometry& geom, const SystemParams& sys) {
    if (!(d_km > 0.0)) throw DomainError("make_relay: total distance d must be positive");
    if (!(d_r_km > 0.0 && d_r_km < d_km)) {
        throw DomainError("make_relay: relay distance d_r must satisfy 0 < d_r < d (got d_r = " +
                          std::to_string(d_r_km) + " km, d = " + std::to_string(d_km) + " km)");
    }
    const double d2 = d_km - d_r_km;
    const auto pp1 = pointing_params(d_r_km * 1000.0, geom);
    const auto pp2 = pointing_params(d2 * 1000.0, geom);
    return assemble(d_r_km, d2, fog, pp1, pp2, sys);
}

RelayConfig make_relay(double d1_km, double d2_km, const FogParams& fog, const PointingParams& pp1,
                       const PointingParams& pp2, const SystemParams& sys) {
    return assemble(d1_km, d2_km, fog, pp1, pp2, sys);
}

double harmonic_cap(const RelayConfig& cfg) {
    const double c1 = cfg.hop1.snr_cap();
    const double c2 = cfg.hop2.snr_cap();
    return c1 * c2 / (c1 + c2);
}

double harmonic_integrand(double t, double gamma, const RelayConfig& cfg) {
    if (!(t > 0.0 && t < 1.0)) return 0.0;
    const double f1 = snr_pdf(gamma / t, cfg.hop1, DomainMode::tolerant);
    const double f2 = snr_pdf(gamma / (1.0 - t), cfg.hop2, DomainMode::tolerant);
    const double w = t * (1.0 - t);
    return gamma * f1 * f2 / (w * w);
}

double e2e_pdf_exact(double gamma, const RelayConfig& cfg, DomainMode mode,
                     const NumericsOptions& num) {
    const double cap = harmonic_cap(cfg);
    if (!(gamma > 0.0 && gamma < cap)) {
        if (mode == DomainMode::tolerant) return 0.0;
        throw DomainError("e2e_pdf_exact: t_min >= t_max, gamma " + std::to_string(gamma) +
                          " is outside the harmonic-mean support (0, " + std::to_string(cap) + ")");
    }
    return harmonic_density_below_cap(std::log(cap / gamma), cfg, num);
}

double e2e_cdf_bound(double gamma, const RelayConfig& cfg, DomainMode mode) {
    if (!(gamma > 0.0) && mode == DomainMode::strict) {
        throw DomainError("e2e_cdf_bound: gamma must be positive");
    }
    const double F1 = snr_cdf(gamma, cfg.hop1, mode);
    const double F2 = snr_cdf(gamma, cfg.hop2, mode);
    return F1 + F2 - F1 * F2;
}

double e2e_pdf_bound(double gamma, const RelayConfig& cfg, DomainMode mode) {
    const double f1 = snr_pdf(gamma, cfg.hop1, mode);
    const double f2 = snr_pdf(gamma, cfg.hop2, mode);
    const double F1 = snr_cdf(gamma, cfg.hop1, mode);
    const double F2 = snr_cdf(gamma, cfg.hop2, mode);
    return f1 + f2 - f1 * F2 - f2 * F1;
}

double outage_closed_form(double gamma_th, const RelayConfig& cfg) {
    require_symmetric(cfg, "outage_closed_form");
    const auto& h = cfg.hop1;
    const double cap = h.snr_cap();
    if (!(gamma_th > 0.0 && gamma_th < cap)) {
        throw DomainError("outage_closed_form: gamma_th must lie in (0, A0^2 gamma0) = (0, " +
                          std::to_string(cap) + ")");
    }
    if (std::abs(h.m) < kEpsilonM) return outage_exact(gamma_th, cfg, QuadMode::bound);
    require_k_domain(h, "outage_closed_form");

    const double k = h.k;
    const double z = h.z;
    const double g = specfun::gamma_fn(k);
    const double U = cap / gamma_th;
    const double L = 0.5 * std::log(U);  // ln(A0 √γ0 / √γ_th)
    const double u_rho = std::pow(U, -h.rho2 / 2.0);
    const double u_z = std::pow(U, -z / 2.0);

    double p = std::pow(z / h.m, k) * u_rho;
    p -= std::pow(z, k) / (g * h.m) * std::pow(L, k - 1.0) * u_z;
    p += std::pow(z * L, k - 1.0) * u_z / g;
    p += (k - 1.0) / g * std::pow(z * L, k - 2.0) * u_z;

    p = std::clamp(p, 0.0, 1.0);
    return 2.0 * p - p * p;
}

double outage_exact(double gamma_th, const RelayConfig& cfg, QuadMode mode,
                    const NumericsOptions& num) {
    if (!(gamma_th > 0.0)) throw DomainError("outage_exact: gamma_th must be positive");
    if (mode == QuadMode::bound) {
        const double cap = min_cap(cfg);
        const double upper = std::min(gamma_th, cap);
        const double p = integrate_below(
            upper, [&](double g) { return e2e_pdf_bound(g, cfg, DomainMode::tolerant); },
            upper == cap, "bound outage", num);
        return std::clamp(p, 0.0, 1.0);
    }
    const double cap = harmonic_cap(cfg);
    const double upper = std::min(gamma_th, cap);
    const double p = integrate_harmonic(
        cfg, upper, [](double) { return 1.0; }, "harmonic outage", num);
    return std::clamp(p, 0.0, 1.0);
}

double diversity_order(const FogParams& fog, double d_r_km) {
    fog.validate();
    if (!(d_r_km > 0.0)) throw DomainError("diversity_order: d_r must be positive");
    return 2.1715 / (fog.beta * d_r_km);
}

double avg_snr_closed(const RelayConfig& cfg, const NumericsOptions& num) {
    require_symmetric(cfg, "avg_snr_closed");
    const auto& h = cfg.hop1;
    const double k = h.k;
    if (!(k > 0.5)) {
        throw DomainError("avg_snr_closed: needs k > 1/2 (Gamma(k - 1/2) has a pole)");
    }
    if (std::abs(h.m) < kEpsilonM) return avg_snr_exact(cfg, QuadMode::bound, num);
    require_k_domain(h, "avg_snr_closed");

    const double z = h.z;
    const double r2 = h.rho2;
    const double m = h.m;
    const double g = specfun::gamma_fn(k);
    const double zk = std::pow(z, k);
    const double mk = std::pow(m, k);

    const double first =
        (1.0 - 2.0 * std::pow((2.0 + m + 2.0 * r2) / m, -k)) * zk / (1.0 + r2);
    const double frac =
        (-2.0 - 3.0 * r2 + 2.0 * (1.0 + r2) * std::pow((2.0 + m + r2) / m, -k) +
         2.0 * (1.0 + r2) * std::pow((2.0 + r2 + z) / z, 1.0 - k)) /
        (2.0 + 3.0 * r2 + r2 * r2);
    const double second = mk * (-2.0 * std::pow(z, k - 1.0) * std::pow(2.0 + r2 + z, -k) + frac);
    const double tail = std::pow(z, k - 2.0) * std::pow(1.0 + z, 1.0 - 2.0 * k) *
                        (m + 2.0 * m * z - z * z) * specfun::gamma_fn(k - 0.5) /
                        (m * m * std::sqrt(std::numbers::pi) * g);
    const double bracket = (first + second) / (mk * mk) + tail;
    return h.A0 * h.A0 * r2 * zk * h.gamma0 * bracket;
}

RateEstimate ergodic_rate_closed(const RelayConfig& cfg, const NumericsOptions& num) {
    require_symmetric(cfg, "ergodic_rate_closed");
    const auto& h = cfg.hop1;
    const double k = h.k;
    if (!(k > 0.5)) {
        throw DomainError("ergodic_rate_closed: needs k > 1/2 (Gamma(k - 1/2) has a pole)");
    }
    if (std::abs(h.m) < kEpsilonM) {
        const double bits = ergodic_rate_exact(cfg, QuadMode::bound, num);
        return {bits, false};
    }
    require_k_domain(h, "ergodic_rate_closed");

    const double z = h.z;
    const double r2 = h.rho2;
    const double r4 = r2 * r2;
    const double m = h.m;
    const double g = specfun::gamma_fn(k);
    const double zk = std::pow(z, k);
    const double mk = std::pow(m, k);
    const double lA = std::log(h.A0);
    const double lg = std::log(h.gamma0);

    double t = 2.0 * (-1.0 + r2 * lA) / r4;
    t += 2.0 * std::pow(z, k - 1.0) * std::pow(r2 + z, -1.0 - k) * (k - (r2 + z) * lA);
    t -= 2.0 / r4 *
         (-1.0 + r2 * lA +
          std::pow((m + r2) / m, -1.0 - k) * (m + (1.0 + k) * r2 - r2 * (m + r2) * lA) / m);
    t += zk / (mk * r4) *
         (-1.0 + 2.0 * r2 * lA +
          std::pow(1.0 + 2.0 * r2 / m, -k) *
              (m + 2.0 * (1.0 + k) * r2 - 2.0 * r2 * (m + 2.0 * r2) * lA) / (m + 2.0 * r2));
    t += 2.0 / r4 *
         (1.0 - r2 * lA + std::pow((z + r2) / z, -k) * (-z - k * r2 + r2 * (z + r2) * lA) / z);
    t += lg / r2;
    t += (-1.0 + std::pow((m + r2) / m, -k)) * lg / r2;
    t += (1.0 - std::pow(1.0 + 2.0 * r2 / m, -k)) * zk * lg / (mk * r2);
    t -= std::pow(z, k - 1.0) * std::pow(r2 + z, -k) * lg;
    t -= (1.0 - std::pow((z + r2) / z, 1.0 - k)) * lg / r2;

    double nats = 2.0 / mk * r2 * zk * t;
    nats -= zk * zk / (mk * mk) * (-1.0 + r2 * (2.0 * lA + lg)) / (r2 * g);
    nats -= r2 * specfun::gamma_fn(k - 0.5) *
            ((-3.0 + 4.0 * k) * m + z - 2.0 * k * z + z * (-2.0 * m + z) * (2.0 * lA + lg)) /
            (m * m * std::sqrt(std::numbers::pi) * z * g);
    const double bits = nats / kLn2;
    return {bits, bits < 0.0};
}

double avg_snr_k2(const RelayConfig& cfg) {
    require_symmetric(cfg, "avg_snr_k2");
    const auto& h = cfg.hop1;
    if (h.k != 2.0) throw DomainError("avg_snr_k2: requires fog shape k = 2");
    const double z = h.z;
    const double r2 = h.rho2;
    const double z1 = 1.0 + z;
    const double num = 2.0 * z1 * z1 * z1 + r2 * r2 * (1.0 + 2.0 * z) + r2 * (3.0 + 4.0 * z * (2.0 + z));
    const double den = 4.0 * (1.0 + r2) * z1 * z1 * z1 * (2.0 + r2 + z) * (2.0 + r2 + z);
    const double first = 1.0 / ((2.0 + r2) * (2.0 + z) * (2.0 + z));
    return 2.0 * h.A0 * h.A0 * r2 * z * z * h.gamma0 * (first - num / den);
}

RateEstimate ergodic_rate_k2(const RelayConfig& cfg) {
    require_symmetric(cfg, "ergodic_rate_k2");
    const auto& h = cfg.hop1;
    if (h.k != 2.0) throw DomainError("ergodic_rate_k2: requires fog shape k = 2");
    const double z = h.z;
    const double r2 = h.rho2;
    const double lA = std::log(h.A0);
    const double lg = std::log(h.gamma0);
    // The printed coefficient 0.36 is 1/(4 ln 2) rounded; the unrounded value makes the bound
    // equal E[log2 min(γ1, γ2)] exactly.
    const double c = 1.0 / (4.0 * kLn2);
    const double lead = (r2 * z * (2.0 * lA + lg) - 2.0 * (2.0 * r2 + z)) / (r2 * z * kLn2);
    const double corr = r2 / ((r2 + z) * (r2 + z)) - 2.0 / r2 - 5.0 / z - 3.0 / (r2 + z) +
                        4.0 * lA + 2.0 * lg;
    const double bits = 2.0 * (lead - c * corr);
    return {bits, bits < 0.0};
}

double avg_snr_exact(const RelayConfig& cfg, QuadMode mode, const NumericsOptions& num) {
    if (mode == QuadMode::bound) {
        return integrate_below(
            min_cap(cfg),
            [&](double g) { return g * e2e_pdf_bound(g, cfg, DomainMode::tolerant); }, true,
            "bound average SNR", num);
    }
    return integrate_harmonic(
        cfg, harmonic_cap(cfg), [](double g) { return g; }, "harmonic average SNR", num);
}

double ergodic_rate_exact(const RelayConfig& cfg, QuadMode mode, const NumericsOptions& num) {
    if (mode == QuadMode::bound) {
        return integrate_below(
            min_cap(cfg),
            [&](double g) {
                return std::log1p(g) / kLn2 * e2e_pdf_bound(g, cfg, DomainMode::tolerant);
            },
            true, "bound ergodic rate", num);
    }
    return integrate_harmonic(
        cfg, harmonic_cap(cfg), [](double g) { return std::log1p(g) / kLn2; },
        "harmonic ergodic rate", num);
}

double log_power_moment(double p, double n) {
    if (!(p > -1.0 && n > 1.0)) throw DomainError("log_power_moment: needs p > -1 and n > 1");
    return specfun::gamma_fn(p + 1.0) / std::pow(n - 1.0, p + 1.0);
}

double power_incomplete_gamma_moment(double k, double n) {
    if (!(k > 0.0 && n > 1.0)) {
        throw DomainError("power_incomplete_gamma_moment: needs k > 0 and n > 1");
    }
    return (1.0 - std::pow(n, k) * std::pow(2.0 * n - 1.0, -k)) * specfun::gamma_fn(k) / (n - 1.0);
}

double direct_avg_snr_closed(const LinkParams& link) {
    const double z = link.z;
    const double r2 = link.rho2;
    return link.snr_cap() * std::pow(z / (z + 2.0), link.k) * r2 / (r2 + 2.0);
}

RateEstimate direct_rate_closed(const LinkParams& link) {
    // E[ln γ] = ln(A0² γ0) - 2 (k/z + 1/ρ²)
    const double nats = std::log(link.snr_cap()) - 2.0 * (link.k / link.z + 1.0 / link.rho2);
    const double bits = nats / kLn2;
    return {bits, bits < 0.0};
}

double direct_avg_snr_exact(const LinkParams& link, const NumericsOptions& num) {
    return integrate_below(
        link.snr_cap(), [&](double g) { return g * snr_pdf(g, link, DomainMode::tolerant); }, true,
        "direct average SNR", num);
}

double direct_rate_exact(const LinkParams& link, const NumericsOptions& num) {
    return integrate_below(
        link.snr_cap(),
        [&](double g) { return std::log1p(g) / kLn2 * snr_pdf(g, link, DomainMode::tolerant); },
        true, "direct ergodic rate", num);
}

std::string to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed_form";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

std::optional<double> MetricReport::avg_snr_db() const {
    if (!avg_snr || !(*avg_snr > 0.0)) return std::nullopt;
    return 10.0 * std::log10(*avg_snr);
}

MetricReport direct_metrics(const LinkParams& link, double gamma_th, Method method,
                            const NumericsOptions& num) {
    if (!(gamma_th > 0.0)) throw DomainError("direct_metrics: gamma_th must be positive");
    MetricReport rep;
    rep.method = method;
    const double cap = link.snr_cap();
    if (gamma_th >= cap) rep.note = "gamma_th at or above support cap A0^2 gamma0; outage is 1";
    switch (method) {
        case Method::closed_form: {
            rep.outage = snr_cdf(gamma_th, link, DomainMode::tolerant);
            rep.avg_snr = direct_avg_snr_closed(link);
            const auto r = direct_rate_closed(link);
            rep.ergodic_rate = r.bits;
            rep.bound_invalid = r.bound_invalid;
            break;
        }
        case Method::quadrature: {
            const double upper = std::min(gamma_th, cap);
            rep.outage = std::clamp(
                integrate_below(upper,
                                [&](double g) { return snr_pdf(g, link, DomainMode::tolerant); },
                                upper == cap, "direct outage", num),
                0.0, 1.0);
            rep.avg_snr = direct_avg_snr_exact(link, num);
            rep.ergodic_rate = direct_rate_exact(link, num);
            break;
        }
        case Method::monte_carlo:
            throw std::invalid_argument("direct_metrics: Monte Carlo estimates come from mc::simulate");
    }
    return rep;
}

}  // namespace owc
