#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgm {

/// Thrown when an iterative fit fails to converge; carries the last iterate.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, std::vector<double> last_params, double residual_rms)
        : std::runtime_error(what),
          last_params_(std::move(last_params)),
          residual_rms_(residual_rms) {}

    const std::vector<double>& last_params() const { return last_params_; }
    double residual_rms() const { return residual_rms_; }

private:
    std::vector<double> last_params_;
    double residual_rms_;
};

/// Two Lorentzians on a linear baseline,
///
///   y(x) = sum_k A_k / (1 + 4 (x - c_k)^2 / w_k^2) + b0 + b1 x,
///
/// with x in MHz. Lines are ordered so that center1 <= center2.
struct DoubletFit {
    double center1 = 0.0, center2 = 0.0;
    double fwhm1 = 0.0, fwhm2 = 0.0;
    double amplitude1 = 0.0, amplitude2 = 0.0;
    double baseline_offset = 0.0, baseline_slope = 0.0;
    double residual_rms = 0.0;
    /// Standard errors in the order (c1, c2, w1, w2, A1, A2, b0, b1); for a
    /// degenerate fit the shared line's errors are repeated.
    std::vector<double> standard_errors;
    /// Only one line was resolved; center1 == center2 and the amplitude is
    /// split evenly between the two lines.
    bool degenerate = false;
    int iterations = 0;

    double splitting() const { return center2 - center1; }
    double evaluate(double x) const;
};

/// Initial guess for a doublet fit.
struct DoubletSeed {
    double center1, center2;
    double fwhm1, fwhm2;
};

/// Least-squares doublet fit of a single detector trace (x in MHz). Requires
/// at least 16 samples. Seeds from the two most prominent maxima unless a
/// seed is given; data with a single resolvable line yields a degenerate fit.
DoubletFit fit_doublet(std::span<const double> x_mhz, std::span<const double> y,
                       const std::optional<DoubletSeed>& seed = std::nullopt);

struct ScatterInference {
    double polarizability;  ///< m^3
    double radius;          ///< m
};

/// Scatterer size from the splitting/broadening ratio |2g|/Gamma =
/// 3 lambda^3 / (4 pi^2 alpha). Both rates in the same units (MHz);
/// the broadening is the added half-linewidth.
ScatterInference infer_scatterer_radius(double splitting_mhz, double broadening_mhz,
                                        double wavelength_m, double refractive_index = 1.45);

struct SinusoidFit {
    double mean = 0.0;
    double amplitude = 0.0;  ///< >= 0
    double period = 0.0;
    double phase = 0.0;      ///< y = mean + amplitude * sin(2 pi x / period + phase)
    double residual_rms = 0.0;
};

SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y);

struct QuadraticFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double se0 = 0.0, se1 = 0.0, se2 = 0.0;
    double residual_rms = 0.0;
};

/// Ordinary least squares of y = c0 + c1 x + c2 x^2. Needs >= 4 points and a
/// full-rank design.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

struct LinearProfileFit {
    double offset = 0.0;
    double scale = 0.0;
    double residual_rms = 0.0;
};

/// Least squares of y = offset + scale * basis(x) for a fixed basis function
/// sampled at each x (e.g. a Gaussian polar mode profile).
LinearProfileFit fit_profile(std::span<const double> basis, std::span<const double> y);

/// Sample Pearson correlation.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace wgm
