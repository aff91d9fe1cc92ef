#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "wgm/mode_geometry.hpp"

namespace wgm {

using cplx = std::complex<double>;
/// Amplitude pair (E_c, E_cc) of the clockwise and counterclockwise modes.
using AmplitudePair = std::array<cplx, 2>;

/// A scatterer of effective polarizability alpha (m^3) sampling the mode at
/// normalized intensity f_sq, sitting at azimuth phi.
struct ScattererPlacement {
    double alpha;
    double f_sq;
    double phi;

    /// Samples f^2 from the mode profile at pos.
    static ScattererPlacement at(const WgmMode& mode, double alpha, const Position& pos);
};

/// Per-scatterer rates: v = i g - Gamma/2 with (2g, Gamma) from coupling_rates.
struct ScattererCoupling {
    double two_g;
    double gamma;
    double phi;

    cplx v() const { return {-0.5 * gamma, 0.5 * two_g}; }
};

ScattererCoupling scatterer_coupling(const WgmMode& mode, const ScattererPlacement& placement);

/// 2x2 generator of the driven cw/ccw amplitude pair in the frame rotating at
/// the bare cavity frequency:
///
///   M = -gamma0 I + sum_j v_j [[1, e^{+i 2 m phi_j}], [e^{-i 2 m phi_j}, 1]].
///
/// Immutable once built; safe to share between threads.
struct Generator {
    cplx m11, m12, m21, m22;
    double gamma0 = 0.0;
    double kappa0 = 1.0;  ///< drive rate into the cw mode
    int azimuthal_order = 1;
};

Generator build_generator(const WgmMode& mode, std::span<const ScattererPlacement> scatterers,
                          double kappa0 = 1.0);
Generator build_generator_from_couplings(const WgmMode& mode,
                                         std::span<const ScattererCoupling> couplings,
                                         double kappa0 = 1.0);

struct Eigenmode {
    cplx eigenvalue;
    double frequency_shift;  ///< Im(lambda), rad/s; red shift negative
    double half_linewidth;   ///< -Re(lambda), rad/s
    AmplitudePair vector;    ///< (a, b), |a|^2 + |b|^2 = 1
    double standing_wave_phase;  ///< psi: intensity along the equator is cos^2(m phi + psi)
};

/// Both eigenmodes, ordered by frequency_shift (then half_linewidth).
std::array<Eigenmode, 2> eigenmodes(const Generator& gen);

/// |Im(lambda_+ - lambda_-)| in rad/s.
double observed_splitting(const Generator& gen);

/// Local standing-wave intensity |E_c e^{-i m phi} + E_cc e^{+i m phi}|^2.
double local_intensity(const AmplitudePair& amplitudes, int azimuthal_order, double phi);

/// Solves (i Delta I - M) E = (kappa0, 0).
AmplitudePair steady_state(const Generator& gen, double detuning);

struct TipProbe {
    double gamma;  ///< scattering rate of the tip out of the mode, rad/s
    double phi;
};

struct SpectrumOptions {
    double outcoupling_fraction = 0.5;  ///< beta in the PD1 dip model, (0, 1]
};

/// Detector traces over a detuning grid (rad/s). Units of pd2 and pd3 are
/// arbitrary; pd1 is a transmission with baseline 1.
struct Spectrum {
    std::vector<double> detuning;
    std::vector<double> pd1;
    std::vector<double> pd2;
    std::vector<double> pd3;
};

Spectrum spectrum(const Generator& gen, std::span<const double> detuning_grid,
                  const std::optional<TipProbe>& tip = std::nullopt,
                  const SpectrumOptions& options = {});

struct Trajectory {
    std::vector<double> times;
    std::vector<AmplitudePair> amplitudes;
};

/// Fixed-step RK4 integration of dE/dt = (M - i Delta) E + (kappa, 0), the
/// equations of motion in the frame rotating with a drive detuned by Delta.
/// Throws std::domain_error unless step < 0.1 / max|eig(M - i Delta)|.
Trajectory time_evolution(const Generator& gen, double detuning, double kappa,
                          const AmplitudePair& initial, double t_final, double step,
                          std::size_t record_every = 1);

}  // namespace wgm
