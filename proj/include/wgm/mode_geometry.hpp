#pragma once

#include <string>
#include <vector>

#include "wgm/physics.hpp"

namespace wgm {

/// Fundamental whispering-gallery mode of a microsphere.
///
/// The field outside the sphere is modelled as a separable product of an
/// evanescent radial decay and a Gaussian polar profile,
///
///   f(r, theta) = exp(-(r - R)/d) * exp(-theta^2 / (2 sigma_theta^2)),
///
/// normalized so that f = 1 on the equator at the surface. The traveling
/// wave is azimuthally uniform; standing-wave structure is handled by
/// standing_wave_weight().
struct WgmMode {
    double sphere_radius;      ///< R, m
    double wavelength;         ///< vacuum wavelength, m
    int azimuthal_order;       ///< m
    double sphere_index;       ///< n_s
    double intrinsic_q;        ///< Q0
    double mode_volume;        ///< V_m, m^3
    double polar_width;        ///< sigma_theta, rad (1/e amplitude half-width)
    double evanescent_decay;   ///< d, m (amplitude decay length outside the surface)

    /// Builds a mode with d = lambda / (4 pi sqrt(n_s^2 - 1)).
    static WgmMode with_default_decay(double sphere_radius, double wavelength, int azimuthal_order,
                                      double sphere_index, double intrinsic_q, double mode_volume,
                                      double polar_width);

    OpticalContext optical_context() const { return OpticalContext(wavelength); }
    double angular_frequency() const;
    /// gamma0 = omega_c / (2 Q0), the unperturbed half-linewidth.
    double gamma0() const;

    /// Throws std::domain_error if any field is non-positive.
    void validate() const;

    /// Soft consistency checks (e.g. m vs 2 pi R n_s / lambda within 20%).
    std::vector<std::string> consistency_warnings() const;
};

double default_evanescent_decay(double wavelength, double sphere_index);

struct Position {
    double r;      ///< radial distance from sphere centre, m
    double theta;  ///< polar offset from the equator, rad
    double phi;    ///< azimuth, rad, wrapped to [0, 2 pi)

    static Position at(double r, double theta, double phi);
    /// Position a given gap outside the sphere surface.
    static Position at_gap(const WgmMode& mode, double gap, double theta, double phi);
};

/// Normalized mode amplitude f in [0, 1]. Requires r >= R.
double mode_amplitude(const WgmMode& mode, const Position& pos);

/// cos^2(m phi + psi); the orthogonal eigenmode carries sin^2(m phi + psi).
double standing_wave_weight(const WgmMode& mode, double phi, double psi);

struct EquatorialPeriod {
    double angular;  ///< pi / m, rad
    double arc;      ///< pi R / m, m
};

EquatorialPeriod equatorial_period(const WgmMode& mode);

/// alpha_bulk * exp(-gap / overlap_length). The overlap length defaults to
/// the mode's evanescent decay when not positive.
double effective_polarizability(const ScattererSpec& tip, const WgmMode& mode, double gap,
                                double overlap_length = 0.0);

}  // namespace wgm
