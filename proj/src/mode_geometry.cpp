#include "wgm/mode_geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wgm/units.hpp"

namespace wgm {

double default_evanescent_decay(double wavelength, double sphere_index) {
    if (!(sphere_index > 1.0)) throw std::domain_error("sphere index must be > 1");
    return wavelength / (4.0 * kPi * std::sqrt(sphere_index * sphere_index - 1.0));
}

WgmMode WgmMode::with_default_decay(double sphere_radius, double wavelength, int azimuthal_order,
                                    double sphere_index, double intrinsic_q, double mode_volume,
                                    double polar_width) {
    WgmMode mode{sphere_radius, wavelength, azimuthal_order, sphere_index, intrinsic_q,
                 mode_volume,   polar_width, default_evanescent_decay(wavelength, sphere_index)};
    mode.validate();
    return mode;
}

double WgmMode::angular_frequency() const { return kTwoPi * kSpeedOfLight / wavelength; }

double WgmMode::gamma0() const { return angular_frequency() / (2.0 * intrinsic_q); }

void WgmMode::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(sphere_radius)) throw std::domain_error("sphere radius must be > 0");
    if (!positive(wavelength)) throw std::domain_error("wavelength must be > 0");
    if (azimuthal_order <= 0) throw std::domain_error("azimuthal order must be > 0");
    if (!positive(sphere_index)) throw std::domain_error("sphere index must be > 0");
    if (!positive(intrinsic_q)) throw std::domain_error("intrinsic Q must be > 0");
    if (!positive(mode_volume)) throw std::domain_error("mode volume must be > 0");
    if (!positive(polar_width)) throw std::domain_error("polar width must be > 0");
    if (!positive(evanescent_decay)) throw std::domain_error("evanescent decay must be > 0");
}

std::vector<std::string> WgmMode::consistency_warnings() const {
    std::vector<std::string> warnings;
    const double expected_m = kTwoPi * sphere_radius * sphere_index / wavelength;
    if (std::abs(azimuthal_order - expected_m) > 0.2 * expected_m) {
        std::ostringstream os;
        os << "azimuthal order " << azimuthal_order << " differs from 2 pi R n_s / lambda = "
           << expected_m << " by more than 20%";
        warnings.push_back(os.str());
    }
    return warnings;
}

Position Position::at(double r, double theta, double phi) {
    if (!(r >= 0.0)) throw std::domain_error("radial coordinate must be >= 0");
    double wrapped = std::fmod(phi, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return {r, theta, wrapped};
}

Position Position::at_gap(const WgmMode& mode, double gap, double theta, double phi) {
    return at(mode.sphere_radius + gap, theta, phi);
}

double mode_amplitude(const WgmMode& mode, const Position& pos) {
    if (pos.r < mode.sphere_radius) {
        throw std::domain_error("mode amplitude is only defined outside the sphere (r >= R)");
    }
    const double radial = std::exp(-(pos.r - mode.sphere_radius) / mode.evanescent_decay);
    const double s = pos.theta / mode.polar_width;
    return radial * std::exp(-0.5 * s * s);
}

double standing_wave_weight(const WgmMode& mode, double phi, double psi) {
    const double c = std::cos(mode.azimuthal_order * phi + psi);
    return c * c;
}

EquatorialPeriod equatorial_period(const WgmMode& mode) {
    const double angular = kPi / mode.azimuthal_order;
    return {angular, angular * mode.sphere_radius};
}

double effective_polarizability(const ScattererSpec& tip, const WgmMode& mode, double gap,
                                double overlap_length) {
    if (!(gap >= 0.0)) throw std::domain_error("tip gap must be >= 0");
    const double length = overlap_length > 0.0 ? overlap_length : mode.evanescent_decay;
    return tip.polarizability() * std::exp(-gap / length);
}

}  // namespace wgm
