#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wgm/mode_geometry.hpp"

namespace wgm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration values are held in the units that appear in the JSON key
// names (nm, um, um^3, MHz, rad) so that a parse/emit round trip is exact.
// Conversion to SI happens in the accessors.

struct ResonatorConfig {
    double sphere_radius_um = 15.0;
    double wavelength_nm = 670.0;
    int azimuthal_order = 204;
    double sphere_index = 1.45;
    double intrinsic_q = 1e8;
    double mode_volume_um3 = 130.0;
    double polar_width_rad = 0.07;
    std::optional<double> evanescent_decay_nm;  ///< default lambda / (4 pi sqrt(n^2 - 1))

    WgmMode mode() const;
};

/// Polarizable particle given by either a polarizability or a radius/index pair.
struct ParticleConfig {
    std::optional<double> polarizability_um3;
    std::optional<double> radius_nm;
    std::optional<double> refractive_index;

    ScattererSpec spec() const;
};

struct IntrinsicScatterer {
    ParticleConfig particle;
    double gap_nm = 0.0;
    double theta_rad = 0.0;
    double phi_rad = 0.0;
};

/// Seeded ensemble of surface inhomogeneities: polarizabilities log-uniform
/// in [min, max], azimuths uniform, polar offsets Gaussian with the mode's
/// polar width, all at the surface.
struct ScattererEnsemble {
    int count = 50;
    double polarizability_min_um3 = 1e-7;
    double polarizability_max_um3 = 1e-5;
};

enum class ScanAxis { Phi, Theta, Radial };

std::string_view to_string(ScanAxis axis);

/// Scan trajectory. Start/stop are in rad for phi and theta and in nm of gap
/// for radial scans.
struct TipScan {
    ScanAxis axis = ScanAxis::Phi;
    double start = 0.0;
    double stop = 0.0;
    int steps = 2;

    std::vector<double> positions() const;
};

struct TipConfig {
    ParticleConfig particle;
    /// Decay length of alpha_eff(gap); empty selects the mode's evanescent decay.
    std::optional<double> overlap_length_nm;
    /// Constant fraction of the mode intensity seen by the tip, in (0, 1].
    double field_overlap = 1.0;
    double gap_nm = 0.0;
    double theta_rad = 0.0;
    double phi_rad = 0.0;
    std::optional<TipScan> scan;
};

struct LaserConfig {
    double center_mhz = 0.0;
    double span_mhz = 100.0;
    int points = 1601;

    /// Detuning grid in rad/s.
    std::vector<double> grid() const;
};

enum class Channel { Pd1, Pd2, Pd3 };

std::string_view to_string(Channel channel);
Channel parse_channel(std::string_view name);

struct OutputConfig {
    std::string directory = "out";
    Channel channel = Channel::Pd2;
    bool write_spectra = false;
};

struct ExperimentConfig {
    ResonatorConfig resonator;
    std::vector<IntrinsicScatterer> intrinsic;
    std::optional<ScattererEnsemble> ensemble;
    std::optional<TipConfig> tip;
    LaserConfig laser;
    OutputConfig output;
    double noise_relative_sigma = 0.0;  ///< Gaussian sigma relative to the channel maximum
    double outcoupling_fraction = 0.5;
    std::uint64_t seed = 0;
};

/// Parses and validates a JSON configuration. Unknown keys are errors;
/// missing optional blocks take the defaults above. Only the resonator block
/// is required.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form with every default spelled out.
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical JSON form.
std::uint64_t run_hash(const ExperimentConfig& config);

}  // namespace wgm
