#pragma once

namespace owc {

/// How the equivalent beam width w_zeq is derived from w_z and υ.
///   paper:      w_zeq = w_z erf(υ) / (2υ e^{-υ²})
///   literature: w_zeq² = w_z² √π erf(υ) / (2υ e^{-υ²})
enum class WzeqConvention { paper, literature };

/// Gaussian-beam transmitter/receiver geometry. Lengths in meters.
struct PointingGeometry {
    double aperture_radius = 0.1;
    double waist_w0 = 5e-3;
    double wavelength = 650e-9;
    double jitter_sigma_s = 0.28;
    double beam_waist_at_ref = 2.5;
    double ref_distance = 1000.0;
    WzeqConvention convention = WzeqConvention::paper;

    /// π w0² / λ, the end of the near-field region.
    double rayleigh_distance() const;
    void validate() const;
};

/// Pointing-error parameters for one link.
struct PointingParams {
    double A0 = 0.0;      ///< collected fraction at zero misalignment, erf(υ)²
    double rho = 0.0;     ///< w_zeq / (2 σ_s)
    double w_z = 0.0;     ///< beam waist at the receiver [m]; 0 when entered directly
    double w_zeq = 0.0;   ///< equivalent beam width [m]
    double upsilon = 0.0; ///< √(π/2) a / w_z; 0 when entered directly
    double jitter_sigma_s = 0.0;

    /// Parameters supplied as measured (ρ, A0) instead of derived from beam optics.
    static PointingParams from_direct(double A0, double rho, double jitter_sigma_s);
    void validate() const;
};

/// Linear far-field beam waist w_z = (w_ref / d_ref) d. Throws DomainError inside the
/// Rayleigh distance, where the linear model does not hold.
double beam_waist(double d_m, const PointingGeometry& geom);

PointingParams pointing_params(double d_m, const PointingGeometry& geom);

}  // namespace owc
