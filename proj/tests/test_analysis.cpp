#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "wgm/analysis.hpp"
#include "wgm/coupled_mode.hpp"
#include "wgm/rng.hpp"
#include "wgm/units.hpp"

using namespace wgm;

namespace {

const double kMHz = mhz_to_rad_per_s(1.0);

WgmMode mode_with_fwhm(double fwhm_mhz) {
    const double q = (kSpeedOfLight / 670e-9) / (fwhm_mhz * 1e6);
    return WgmMode::with_default_decay(15e-6, 670e-9, 204, 1.45, q, 130e-18, 0.07);
}

std::vector<double> grid_mhz(double lo, double hi, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
    return x;
}

std::vector<double> engine_pd2(const Generator& gen, const std::vector<double>& x_mhz) {
    std::vector<double> grid;
    for (double x : x_mhz) grid.push_back(x * kMHz);
    return spectrum(gen, grid).pd2;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("doublet round trip on an engine spectrum") {
    // Lossless scatterer: orthogonal standing waves, pd2 is exactly two Lorentzians.
    const auto mode = mode_with_fwhm(4.2);
    const std::array<ScattererCoupling, 1> one{{{-29.0 * kMHz, 0.0, 0.7}}};
    const auto gen = build_generator_from_couplings(mode, one);
    const auto x = grid_mhz(-50.0, 40.0, 901);
    const auto y = engine_pd2(gen, x);
    const auto fit = fit_doublet(x, y);
    CHECK_FALSE(fit.degenerate);
    CHECK(rel(fit.center1, -29.0) < 1e-6);
    CHECK(std::abs(fit.center2) < 1e-6);
    CHECK(rel(fit.fwhm1, 4.2) < 1e-6);
    CHECK(rel(fit.fwhm2, 4.2) < 1e-6);
    CHECK(rel(fit.splitting(), 29.0) < 1e-6);
    // Each standing wave carries half the drive: equal heights 1/(2 gamma0^2).
    const double g0 = mode.gamma0();
    CHECK(rel(fit.amplitude1, 0.5 / (g0 * g0)) < 1e-6);
    CHECK(rel(fit.amplitude2, 0.5 / (g0 * g0)) < 1e-6);
    CHECK(fit.standard_errors.size() == 8);
}

TEST_CASE("doublet round trip with unequal lines and a sloped baseline") {
    DoubletFit truth;
    truth.center1 = -6.0;
    truth.center2 = 7.5;
    truth.fwhm1 = 3.0;
    truth.fwhm2 = 9.0;
    truth.amplitude1 = 2.0;
    truth.amplitude2 = 0.8;
    truth.baseline_offset = 0.1;
    truth.baseline_slope = 0.002;
    const auto x = grid_mhz(-60.0, 60.0, 1201);
    std::vector<double> y;
    for (double xi : x) y.push_back(truth.evaluate(xi));
    const auto fit = fit_doublet(x, y);
    CHECK(rel(fit.center1, truth.center1) < 1e-6);
    CHECK(rel(fit.center2, truth.center2) < 1e-6);
    CHECK(rel(fit.fwhm1, truth.fwhm1) < 1e-6);
    CHECK(rel(fit.fwhm2, truth.fwhm2) < 1e-6);
    CHECK(rel(fit.amplitude1, truth.amplitude1) < 1e-6);
    CHECK(rel(fit.amplitude2, truth.amplitude2) < 1e-6);
    CHECK(rel(fit.baseline_offset, truth.baseline_offset) < 1e-5);
    CHECK(rel(fit.baseline_slope, truth.baseline_slope) < 1e-5);
    CHECK(fit.residual_rms < 1e-9);

    // An explicit seed reaches the same optimum.
    const auto seeded = fit_doublet(x, y, DoubletSeed{-5.0, 8.0, 2.0, 6.0});
    CHECK(rel(seeded.splitting(), truth.center2 - truth.center1) < 1e-6);
}

TEST_CASE("doublet fit under 1% noise") {
    const auto mode = mode_with_fwhm(4.2);
    const std::array<ScattererCoupling, 1> one{{{-29.0 * kMHz, 0.0, 0.0}}};
    const auto gen = build_generator_from_couplings(mode, one);
    const auto x = grid_mhz(-50.0, 40.0, 901);
    const auto clean = engine_pd2(gen, x);
    const double peak = *std::max_element(clean.begin(), clean.end());
    int within = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(derive_seed(2024, static_cast<std::uint64_t>(trial)));
        std::vector<double> noisy(clean);
        for (double& v : noisy) v += 0.01 * peak * rng.normal();
        const auto fit = fit_doublet(x, noisy);
        if (std::abs(fit.splitting() - 29.0) < 0.5) ++within;
    }
    CHECK(within == 100);
}

TEST_CASE("single line gives a degenerate doublet") {
    const auto mode = mode_with_fwhm(3.0);
    const auto gen = build_generator(mode, {});
    const auto x = grid_mhz(-30.0, 30.0, 601);
    const auto fit = fit_doublet(x, engine_pd2(gen, x));
    CHECK(fit.degenerate);
    CHECK(fit.center1 == fit.center2);
    CHECK(fit.splitting() == 0.0);
    const double expected = rad_per_s_to_mhz(2.0 * mode.gamma0());
    CHECK(fit.fwhm1 == doctest::Approx(expected).epsilon(0.01));
    CHECK(fit.amplitude1 == doctest::Approx(fit.amplitude2));
}

TEST_CASE("doublet fit input errors") {
    const auto x = grid_mhz(-1.0, 1.0, 10);
    const std::vector<double> y(10, 1.0);
    CHECK_THROWS_AS(fit_doublet(x, y), std::invalid_argument);
    const auto x20 = grid_mhz(-1.0, 1.0, 20);
    CHECK_THROWS_AS(fit_doublet(x20, y), std::invalid_argument);
    const std::vector<double> zeros(20, 0.0);
    CHECK_THROWS_AS(fit_doublet(x20, zeros), FitError);
    std::vector<double> bad(20, 1.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(fit_doublet(x20, bad), std::invalid_argument);
}

TEST_CASE("scatterer radius from splitting and broadening") {
    const auto r = infer_scatterer_radius(13.0, 6.0, 670e-9, 1.45);
    CHECK(r.radius / kNanometre == doctest::Approx(146.1789).epsilon(1e-5));
    CHECK(std::abs(r.radius / kNanometre - 140.0) < 14.0);
    CHECK(r.polarizability == doctest::Approx(1.0548575707784e-20).epsilon(1e-10));
    for (double s : {1e-3, 0.5, 7.0, 1e4}) {
        CHECK(infer_scatterer_radius(13.0 * s, 6.0 * s, 670e-9).radius ==
              doctest::Approx(r.radius).epsilon(1e-13));
    }
    CHECK(infer_scatterer_radius(13.0, 1e-12, 670e-9).radius < 1e-4 * r.radius);
    CHECK_THROWS_AS(infer_scatterer_radius(0.0, 6.0, 670e-9), std::domain_error);
    CHECK_THROWS_AS(infer_scatterer_radius(13.0, -1.0, 670e-9), std::domain_error);
    CHECK_THROWS_AS(infer_scatterer_radius(13.0, 6.0, 0.0), std::domain_error);
}

TEST_CASE("sinusoid fit") {
    const double period = kPi / 204.0;
    auto series = [&](double mean, double amp, double phase, double offset) {
        std::vector<double> x, y;
        for (int i = 0; i < 101; ++i) {
            x.push_back(offset + 2.5 * period * i / 100.0);
            y.push_back(mean + amp * std::sin(kTwoPi * x.back() / period + phase));
        }
        return std::pair{x, y};
    };
    const auto [x, y] = series(24.0, 3.0, 0.4, 0.0);
    const auto fit = fit_sinusoid(x, y);
    CHECK(fit.mean == doctest::Approx(24.0).epsilon(1e-9));
    CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.period == doctest::Approx(period).epsilon(1e-9));
    CHECK(std::remainder(fit.phase - 0.4, kTwoPi) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(fit.residual_rms < 1e-9);

    // Period invariant under abscissa offset and mean shift.
    const auto [x2, y2] = series(-5.0, 3.0, 0.4, 1.234);
    CHECK(fit_sinusoid(x2, y2).period == doctest::Approx(period).epsilon(1e-9));

    const auto [x3, y3] = series(24.0, 0.0, 0.0, 0.0);
    const auto flat = fit_sinusoid(x3, y3);
    CHECK(flat.amplitude < 1e-9);
    CHECK(flat.mean == doctest::Approx(24.0));

    CHECK_THROWS_AS(fit_sinusoid(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}),
                    std::invalid_argument);
}

TEST_CASE("quadratic fit") {
    std::vector<double> s, b;
    for (int i = 0; i < 12; ++i) {
        s.push_back(1e7 * (1.0 + i));
        b.push_back(3e-9 * s.back() * s.back());
    }
    const auto fit = fit_quadratic(s, b);
    CHECK(fit.c2 == doctest::Approx(3e-9).epsilon(1e-10));
    CHECK(std::abs(fit.c0) < 1e-6 * b.back());
    CHECK(std::abs(fit.c1) * s.back() < 1e-6 * b.back());

    const std::vector<double> zeros(s.size(), 0.0);
    const auto zero = fit_quadratic(s, zeros);
    CHECK(zero.c0 == 0.0);
    CHECK(zero.c1 == 0.0);
    CHECK(zero.c2 == 0.0);

    // One decade of S with 1% noise.
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 0.01);
    int good = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 30; ++i) {
            x.push_back(1.0 + 9.0 * i / 29.0);
            y.push_back(0.5 * x.back() * x.back() * (1.0 + noise(gen)));
        }
        if (std::abs(fit_quadratic(x, y).c2 / 0.5 - 1.0) < 0.05) ++good;
    }
    CHECK(good == 50);

    CHECK_THROWS_AS(fit_quadratic(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_quadratic(std::vector<double>{2, 2, 2, 2}, std::vector<double>{1, 2, 3, 4}),
                    std::domain_error);
}

TEST_CASE("profile fit and correlation") {
    std::vector<double> basis, y;
    for (int i = 0; i < 20; ++i) {
        const double th = -0.2 + 0.02 * i;
        basis.push_back(std::exp(-th * th / (0.07 * 0.07)));
        y.push_back(24.0 - 2.5 * basis.back());
    }
    const auto p = fit_profile(basis, y);
    CHECK(p.offset == doctest::Approx(24.0));
    CHECK(p.scale == doctest::Approx(-2.5));

    const std::vector<double> a{1, 2, 3, 4}, b{8, 6, 4, 2};
    CHECK(pearson_correlation(a, b) == doctest::Approx(-1.0));
    CHECK(pearson_correlation(a, a) == doctest::Approx(1.0));
    CHECK(std::isnan(pearson_correlation(a, std::vector<double>{1, 1, 1, 1})));
}
