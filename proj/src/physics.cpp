#include "wgm/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "wgm/units.hpp"

namespace wgm {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw std::domain_error(message);
}

}  // namespace

ScattererSpec ScattererSpec::from_radius(double radius_m, double refractive_index) {
    require(std::isfinite(radius_m) && radius_m >= 0.0, "scatterer radius must be >= 0");
    require(std::isfinite(refractive_index) && refractive_index >= 1.0,
            "scatterer refractive index must be >= 1");
    ScattererSpec spec;
    spec.radius_ = radius_m;
    spec.index_ = refractive_index;
    return spec;
}

ScattererSpec ScattererSpec::from_polarizability(double alpha_m3) {
    require(std::isfinite(alpha_m3) && alpha_m3 >= 0.0, "polarizability must be >= 0");
    ScattererSpec spec;
    spec.alpha_ = alpha_m3;
    return spec;
}

double ScattererSpec::polarizability() const {
    if (alpha_) return *alpha_;
    const double a = *radius_;
    return 4.0 * kPi * a * a * a * clausius_mossotti(*index_);
}

OpticalContext::OpticalContext(double vacuum_wavelength_m)
    : wavelength_(vacuum_wavelength_m),
      omega_(kTwoPi * kSpeedOfLight / vacuum_wavelength_m),
      k_(kTwoPi / vacuum_wavelength_m) {
    require(std::isfinite(vacuum_wavelength_m) && vacuum_wavelength_m > 0.0,
            "wavelength must be > 0");
}

double clausius_mossotti(double refractive_index) {
    const double n2 = refractive_index * refractive_index;
    return (n2 - 1.0) / (n2 + 2.0);
}

double polarizability(const ScattererSpec& spec) { return spec.polarizability(); }

double radius_from_polarizability(double alpha_m3, double refractive_index) {
    require(alpha_m3 >= 0.0, "polarizability must be >= 0");
    require(refractive_index > 1.0, "radius inversion needs refractive index > 1");
    return std::cbrt(alpha_m3 / (4.0 * kPi * clausius_mossotti(refractive_index)));
}

double rayleigh_cross_section(const ScattererSpec& spec, const OpticalContext& ctx) {
    if (spec.radius()) {
        // 8 pi k^4 a^6 / 3 |(n^2-1)/(n^2+2)|^2
        const double k = ctx.wavenumber();
        const double a = *spec.radius();
        const double cm = clausius_mossotti(*spec.refractive_index());
        const double k2a2 = k * k * a * a;
        return 8.0 * kPi * k2a2 * k2a2 * a * a / 3.0 * cm * cm;
    }
    const double alpha = spec.polarizability();
    const double k2 = ctx.wavenumber() * ctx.wavenumber();
    return alpha * alpha * k2 * k2 / (6.0 * kPi);
}

double free_space_scattering_rate(const ScattererSpec& spec, const OpticalContext& ctx,
                                  double mode_volume_m3) {
    require(mode_volume_m3 > 0.0, "mode volume must be > 0");
    const double alpha = spec.polarizability();
    const double w = ctx.angular_frequency();
    const double c = kSpeedOfLight;
    return alpha * alpha * (w * w) * (w * w) / (6.0 * kPi * c * c * c * mode_volume_m3);
}

double purcell_factor(double quality_factor, const OpticalContext& ctx, double mode_volume_m3) {
    require(quality_factor > 0.0, "quality factor must be > 0");
    require(mode_volume_m3 > 0.0, "mode volume must be > 0");
    const double lam = ctx.wavelength();
    return 3.0 * quality_factor * lam * lam * lam / (4.0 * kPi * kPi * mode_volume_m3);
}

double backscatter_budget(double solid_angle_fraction, double purcell) {
    require(solid_angle_fraction >= 0.0 && solid_angle_fraction <= 1.0,
            "solid-angle fraction must lie in [0, 1]");
    return solid_angle_fraction * purcell;
}

CouplingRates coupling_rates(double alpha_eff_m3, double f_sq, const OpticalContext& ctx,
                             double mode_volume_m3) {
    require(mode_volume_m3 > 0.0, "mode volume must be > 0");
    require(f_sq >= 0.0 && f_sq <= 1.0, "normalized mode intensity must lie in [0, 1]");
    require(alpha_eff_m3 >= 0.0, "polarizability must be >= 0");
    const double w = ctx.angular_frequency();
    const double c = kSpeedOfLight;
    const double two_g = -alpha_eff_m3 * f_sq * w / mode_volume_m3;
    const double gamma = alpha_eff_m3 * alpha_eff_m3 * f_sq * (w * w) * (w * w) /
                         (6.0 * kPi * c * c * c * mode_volume_m3);
    return {two_g, gamma};
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Unresolved: return "UNRESOLVED";
        case Regime::ResolvedSplitting: return "RESOLVED_SPLITTING";
        case Regime::ScattererBroadeningDominated: return "SCATTERER_BROADENING_DOMINATED";
    }
    return "UNKNOWN";
}

Regime classify_regime(double two_g, double gamma, double gamma0) {
    const double split = std::abs(two_g);
    const double broad = std::abs(gamma);
    if (broad > 0.0 && broad >= split) return Regime::ScattererBroadeningDominated;
    if (split > std::abs(gamma0) + 0.5 * broad) return Regime::ResolvedSplitting;
    return Regime::Unresolved;
}

}  // namespace wgm
