#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgm/analysis.hpp"
#include "wgm/config.hpp"
#include "wgm/coupled_mode.hpp"

namespace wgm {

/// Intrinsic scatterers of a configuration: explicit placements followed by
/// the seeded ensemble, if any.
std::vector<ScattererPlacement> intrinsic_placements(const ExperimentConfig& cfg);

/// Tip at the given coordinates. The tip samples the angular mode profile
/// scaled by field_overlap; its gap dependence enters through alpha_eff.
ScattererPlacement tip_placement(const ExperimentConfig& cfg, double gap_nm, double theta_rad,
                                 double phi_rad);

/// Samples of one detector channel; pd1 is reported as the dip depth 1 - pd1.
std::vector<double> channel_signal(const Spectrum& spectrum, Channel channel);

/// Detuning grid of a spectrum in MHz.
std::vector<double> detuning_mhz(const Spectrum& spectrum);

struct SpectrumRun {
    Spectrum spectrum;
    std::array<Eigenmode, 2> modes;
    std::optional<DoubletFit> fit;
    std::string fit_error;
};

/// One spectrum of the configured resonator, intrinsic scatterers, and the
/// tip at its fixed coordinates (if configured), fitted on the output channel.
SpectrumRun run_spectrum(const ExperimentConfig& cfg);

struct ScanRow {
    double position = 0.0;  ///< rad (phi, theta) or nm of gap (radial)
    bool fit_ok = false;
    std::string fit_error;
    bool degenerate = false;
    double splitting_mhz = 0.0;
    double peak1 = 0.0, peak2 = 0.0;
    double fwhm1_mhz = 0.0, fwhm2_mhz = 0.0;
    double broadening_mhz = 0.0;  ///< fitted added half-linewidth, (max fwhm - min fwhm) / 2
    double model_splitting_mhz = 0.0;
    double model_broadening_mhz = 0.0;  ///< largest eigenmode half-linewidth minus gamma0
    double tip_two_g_mhz = 0.0;
    double tip_gamma_mhz = 0.0;
    Regime regime = Regime::Unresolved;
};

struct ScanResult {
    ScanAxis axis = ScanAxis::Phi;
    std::vector<ScanRow> rows;
    std::vector<Spectrum> spectra;
    double intrinsic_splitting_mhz = 0.0;  ///< model splitting without the tip
};

/// Runs the configured tip scan. Points are evaluated in parallel; rows come
/// back in scan order and do not depend on the thread count. A failed fit is
/// recorded in its row and the scan continues.
ScanResult run_scan(const ExperimentConfig& cfg);

struct EquatorialScan {
    ScanResult scan;
    std::optional<SinusoidFit> sinusoid;
    std::string sinusoid_error;
    double expected_period = 0.0;  ///< pi / m, rad
    double peak_correlation = 0.0;
};

struct PolarScan {
    ScanResult scan;
    std::optional<LinearProfileFit> profile;  ///< splitting = offset + scale exp(-theta^2 / sigma^2)
};

struct RadialScan {
    ScanResult scan;
    std::optional<QuadraticFit> quadratic;  ///< B = c0 + c1 S + c2 S^2, rad/s
    std::string quadratic_error;
    double expected_k = 0.0;  ///< V_m omega^2 / (6 pi c^3 f^2), s/rad
    std::vector<double> tip_splitting;  ///< S, rad/s
    std::vector<double> tip_broadening;  ///< B, rad/s
};

struct WeakToStrong {
    ScanResult scan;
    std::optional<ScatterInference> inference;
    std::string inference_error;
    double configured_alpha = 0.0;  ///< tip alpha_eff of the final frame, m^3
};

EquatorialScan run_equatorial_scan(const ExperimentConfig& cfg);
PolarScan run_polar_scan(const ExperimentConfig& cfg);
RadialScan run_radial_scan(const ExperimentConfig& cfg);
/// Requires a theta scan and no intrinsic scatterers.
WeakToStrong run_weak_to_strong(const ExperimentConfig& cfg);

}  // namespace wgm
