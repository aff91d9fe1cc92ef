#pragma once

#include <optional>
#include <string_view>

namespace wgm {

/// A polarizable subwavelength particle, described either by its radius and
/// refractive index or directly by its polarizability volume (SI, m^3).
class ScattererSpec {
public:
    static ScattererSpec from_radius(double radius_m, double refractive_index);
    static ScattererSpec from_polarizability(double alpha_m3);

    /// Radius in metres; empty when the spec was given as a polarizability.
    std::optional<double> radius() const { return radius_; }
    std::optional<double> refractive_index() const { return index_; }
    std::optional<double> given_polarizability() const { return alpha_; }

    /// alpha = 4 pi a^3 (n^2 - 1)/(n^2 + 2), or the stored value verbatim.
    double polarizability() const;

private:
    ScattererSpec() = default;
    std::optional<double> radius_;
    std::optional<double> index_;
    std::optional<double> alpha_;
};

/// Vacuum wavelength plus the derived angular frequency and wavenumber.
class OpticalContext {
public:
    explicit OpticalContext(double vacuum_wavelength_m);

    double wavelength() const { return wavelength_; }
    double angular_frequency() const { return omega_; }
    double wavenumber() const { return k_; }

private:
    double wavelength_;
    double omega_;
    double k_;
};

/// (n^2 - 1)/(n^2 + 2)
double clausius_mossotti(double refractive_index);

double polarizability(const ScattererSpec& spec);

/// Radius of a sphere of index n with polarizability alpha; inverse of
/// polarizability(). Requires n > 1.
double radius_from_polarizability(double alpha_m3, double refractive_index);

/// Rayleigh cross-section alpha^2 k^4 / 6 pi (m^2).
double rayleigh_cross_section(const ScattererSpec& spec, const OpticalContext& ctx);

/// Free-space Rayleigh scattering rate out of a photon mode of volume V_k,
/// alpha^2 omega^4 / (6 pi c^3 V_k), in rad/s. Satisfies Gamma_R V_k / c ==
/// rayleigh_cross_section.
double free_space_scattering_rate(const ScattererSpec& spec, const OpticalContext& ctx,
                                  double mode_volume_m3);

/// F = 3 Q lambda^3 / (4 pi^2 V_m)
double purcell_factor(double quality_factor, const OpticalContext& ctx, double mode_volume_m3);

/// Fraction eta F of scattered light captured by the counterpropagating mode.
double backscatter_budget(double solid_angle_fraction, double purcell);

struct CouplingRates {
    double two_g;  ///< splitting 2g, rad/s, <= 0 (red shift)
    double gamma;  ///< added amplitude decay rate of the symmetric mode, rad/s
};

/// Single-scatterer splitting and broadening for a scatterer of polarizability
/// alpha_eff at normalized mode intensity f_sq.
CouplingRates coupling_rates(double alpha_eff_m3, double f_sq, const OpticalContext& ctx,
                             double mode_volume_m3);

enum class Regime { Unresolved, ResolvedSplitting, ScattererBroadeningDominated };

std::string_view to_string(Regime regime);

/// Broadening-dominated when Gamma > 0 and Gamma >= |2g|; resolved when
/// |2g| > gamma0 + Gamma/2 (splitting beats the mean half-linewidth of the
/// two eigenmodes); unresolved otherwise.
Regime classify_regime(double two_g, double gamma, double gamma0);

}  // namespace wgm
