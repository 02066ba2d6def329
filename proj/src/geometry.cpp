#include "owc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "owc/errors.hpp"
#include "owc/specfun.hpp"

namespace owc {

double PointingGeometry::rayleigh_distance() const {
    return std::numbers::pi * waist_w0 * waist_w0 / wavelength;
}

void PointingGeometry::validate() const {
    if (!(aperture_radius > 0.0 && waist_w0 > 0.0 && wavelength > 0.0 && jitter_sigma_s > 0.0 &&
          beam_waist_at_ref > 0.0 && ref_distance > 0.0)) {
        throw DomainError("PointingGeometry: all lengths must be strictly positive");
    }
    if (!(ref_distance > rayleigh_distance())) {
        throw DomainError("PointingGeometry: reference distance must exceed the Rayleigh distance (" +
                          std::to_string(rayleigh_distance()) + " m)");
    }
}

PointingParams PointingParams::from_direct(double A0, double rho, double jitter_sigma_s) {
    PointingParams pp;
    pp.A0 = A0;
    pp.rho = rho;
    pp.jitter_sigma_s = jitter_sigma_s;
    pp.w_zeq = 2.0 * rho * jitter_sigma_s;
    pp.validate();
    return pp;
}

void PointingParams::validate() const {
    if (!(A0 > 0.0 && A0 < 1.0)) throw DomainError("PointingParams: A0 must lie in (0, 1)");
    if (!(rho > 0.0)) throw DomainError("PointingParams: rho must be positive");
    if (!(jitter_sigma_s > 0.0)) throw DomainError("PointingParams: jitter sigma must be positive");
}

double beam_waist(double d_m, const PointingGeometry& geom) {
    geom.validate();
    const double zr = geom.rayleigh_distance();
    if (!(d_m > zr)) {
        throw DomainError("beam_waist: distance " + std::to_string(d_m) +
                          " m is inside the Rayleigh distance " + std::to_string(zr) + " m");
    }
    return geom.beam_waist_at_ref / geom.ref_distance * d_m;
}

PointingParams pointing_params(double d_m, const PointingGeometry& geom) {
    PointingParams pp;
    pp.w_z = beam_waist(d_m, geom);
    pp.upsilon = std::sqrt(std::numbers::pi / 2.0) * geom.aperture_radius / pp.w_z;
    const double e = specfun::erf(pp.upsilon);
    pp.A0 = e * e;
    const double ratio = e / (2.0 * pp.upsilon * std::exp(-pp.upsilon * pp.upsilon));
    switch (geom.convention) {
        case WzeqConvention::paper:
            pp.w_zeq = pp.w_z * ratio;
            break;
        case WzeqConvention::literature:
            pp.w_zeq = pp.w_z * std::sqrt(std::sqrt(std::numbers::pi) * ratio);
            break;
    }
    pp.jitter_sigma_s = geom.jitter_sigma_s;
    pp.rho = pp.w_zeq / (2.0 * geom.jitter_sigma_s);
    return pp;
}

}  // namespace owc
