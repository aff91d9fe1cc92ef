#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "wgm/physics.hpp"
#include "wgm/units.hpp"

using namespace wgm;

namespace {

constexpr double kAlpha100nm = 3.3770685197637997e-21;  // m^3, a = 100 nm, n = 1.45
const OpticalContext kRed(670e-9);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("optical context derived quantities") {
    CHECK(kRed.angular_frequency() * kRed.wavelength() ==
          doctest::Approx(kTwoPi * kSpeedOfLight).epsilon(1e-15));
    CHECK(kRed.wavenumber() == doctest::Approx(9.3779e6).epsilon(1e-4));
    CHECK_THROWS_AS(OpticalContext(0.0), std::domain_error);
    CHECK(mhz_to_rad_per_s(1.0) == doctest::Approx(kTwoPi * 1e6));
}

TEST_CASE("polarizability") {
    CHECK(polarizability(ScattererSpec::from_radius(0.0, 1.45)) == 0.0);
    CHECK(polarizability(ScattererSpec::from_radius(100e-9, 1.0)) == 0.0);
    // Hand evaluation: 4 pi (0.1 um)^3 * 1.1025 / 4.1025 = 3.377e-3 um^3.
    const double alpha = polarizability(ScattererSpec::from_radius(100e-9, 1.45));
    CHECK(rel(alpha, kAlpha100nm) < 1e-12);
    CHECK(alpha / kCubicMicrometre == doctest::Approx(3.377e-3).epsilon(1e-3));
    CHECK(polarizability(ScattererSpec::from_polarizability(1.5e-20)) == 1.5e-20);

    CHECK_THROWS_AS(ScattererSpec::from_radius(-1e-9, 1.45), std::domain_error);
    CHECK_THROWS_AS(ScattererSpec::from_radius(1e-9, -1.0), std::domain_error);
    CHECK_THROWS_AS(ScattererSpec::from_radius(1e-9, 0.5), std::domain_error);
    CHECK_THROWS_AS(ScattererSpec::from_polarizability(-1.0), std::domain_error);
}

TEST_CASE("radius round trip through polarizability") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> log_radius(std::log(1e-9), std::log(1e-6));
    std::uniform_real_distribution<double> index(1.0 + 1e-6, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double a = std::exp(log_radius(gen));
        const double n = index(gen);
        const double alpha = polarizability(ScattererSpec::from_radius(a, n));
        CHECK(rel(radius_from_polarizability(alpha, n), a) < 1e-10);
    }
}

TEST_CASE("rayleigh cross-section") {
    CHECK(rayleigh_cross_section(ScattererSpec::from_radius(0.0, 1.45), kRed) == 0.0);
    const auto spec = ScattererSpec::from_radius(100e-9, 1.45);
    const double sigma = rayleigh_cross_section(spec, kRed);
    CHECK(rel(sigma, 4.679493888592005e-15) < 1e-12);
    // Radius form and polarizability form agree.
    const double from_alpha =
        rayleigh_cross_section(ScattererSpec::from_polarizability(spec.polarizability()), kRed);
    CHECK(rel(from_alpha, sigma) < 1e-12);
    // a^6 scaling.
    const double doubled = rayleigh_cross_section(ScattererSpec::from_radius(200e-9, 1.45), kRed);
    CHECK(doubled / sigma == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("free-space scattering rate") {
    const double vk = 130e-18;
    CHECK(free_space_scattering_rate(ScattererSpec::from_polarizability(0.0), kRed, vk) == 0.0);
    const auto spec = ScattererSpec::from_radius(100e-9, 1.45);
    const double rate = free_space_scattering_rate(spec, kRed, vk);
    CHECK(rel(rate, 1.0791361346592113e10) < 1e-12);
    CHECK(rate == doctest::Approx(1.08e10).epsilon(5e-3));
    CHECK_THROWS_AS(free_space_scattering_rate(spec, kRed, 0.0), std::domain_error);
    CHECK_THROWS_AS(free_space_scattering_rate(spec, kRed, -1.0), std::domain_error);
}

TEST_CASE("energy balance between rate and cross-section") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = 1e-9 + 500e-9 * u(gen);
        const double n = 1.0 + 2.0 * u(gen);
        const OpticalContext ctx(300e-9 + 1200e-9 * u(gen));
        const double vk = std::exp(std::log(1e-18) + 10.0 * u(gen));
        const auto spec = ScattererSpec::from_radius(a, n);
        const double lhs = free_space_scattering_rate(spec, ctx, vk) * vk / kSpeedOfLight;
        const double rhs = rayleigh_cross_section(spec, ctx);
        if (rhs == 0.0) continue;
        CHECK(rel(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("cross-section monotonicity") {
    double prev = 0.0;
    for (double a = 5e-9; a < 500e-9; a *= 1.3) {
        const double s = rayleigh_cross_section(ScattererSpec::from_radius(a, 1.45), kRed);
        CHECK(s > prev);
        prev = s;
    }
    prev = 0.0;
    for (double n = 1.01; n < 3.0; n += 0.1) {
        const double s = rayleigh_cross_section(ScattererSpec::from_radius(100e-9, n), kRed);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("purcell factor") {
    const double f = purcell_factor(1e8, kRed, 130e-18);
    CHECK(rel(f, 17580.959512973335) < 1e-12);
    CHECK(f > 1e4);
    CHECK(f < 1e5);
    CHECK(purcell_factor(2e8, kRed, 130e-18) == doctest::Approx(2.0 * f).epsilon(1e-14));
    CHECK(purcell_factor(1e8, kRed, 260e-18) < f);
    CHECK_THROWS_AS(purcell_factor(0.0, kRed, 130e-18), std::domain_error);
    CHECK_THROWS_AS(purcell_factor(1e8, kRed, 0.0), std::domain_error);
}

TEST_CASE("backscatter budget") {
    CHECK(backscatter_budget(1e-4, 1.76e4) == doctest::Approx(1.76).epsilon(1e-12));
    CHECK(backscatter_budget(0.0, 1.76e4) == 0.0);
    CHECK(backscatter_budget(0.3, 1.0) == 0.3);
    CHECK_THROWS_AS(backscatter_budget(-0.1, 10.0), std::domain_error);
    CHECK_THROWS_AS(backscatter_budget(1.1, 10.0), std::domain_error);
}

TEST_CASE("coupling rates") {
    const double vm = 130e-18;
    const auto zero = coupling_rates(0.0, 0.5, kRed, vm);
    CHECK(zero.two_g == 0.0);
    CHECK(zero.gamma == 0.0);

    const auto r = coupling_rates(kAlpha100nm, 0.3, kRed, vm);
    CHECK(r.two_g < 0.0);
    CHECK(r.gamma > 0.0);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 1e-24 + 1e-19 * u(gen);
        const double fsq = 1e-6 + (1.0 - 1e-6) * u(gen);
        const double v = std::exp(std::log(1e-18) + 8.0 * u(gen));
        const auto rates = coupling_rates(alpha, fsq, kRed, v);
        const double lam3 = std::pow(kRed.wavelength(), 3);
        const double identity = std::abs(rates.two_g) / rates.gamma *
                                (4.0 * kPi * kPi * alpha / (3.0 * lam3));
        CHECK(identity == doctest::Approx(1.0).epsilon(1e-12));
    }

    // alpha inferred from a 13 MHz / 6 MHz doublet reproduces the ratio.
    const auto fig4 = coupling_rates(1.0548575707784e-20, 1e-3, kRed, vm);
    CHECK(std::abs(fig4.two_g) / fig4.gamma == doctest::Approx(13.0 / 6.0).epsilon(1e-10));

    CHECK_THROWS_AS(coupling_rates(1e-21, 1.5, kRed, vm), std::domain_error);
    CHECK_THROWS_AS(coupling_rates(1e-21, -0.1, kRed, vm), std::domain_error);
    CHECK_THROWS_AS(coupling_rates(-1e-21, 0.5, kRed, vm), std::domain_error);
    CHECK_THROWS_AS(coupling_rates(1e-21, 0.5, kRed, 0.0), std::domain_error);
}

TEST_CASE("regime classification") {
    const double mhz = mhz_to_rad_per_s(1.0);
    CHECK(classify_regime(13 * mhz, 6 * mhz, 2.5 * mhz) == Regime::ResolvedSplitting);
    CHECK(classify_regime(0.0, 1 * mhz, 2.5 * mhz) == Regime::ScattererBroadeningDominated);
    CHECK(classify_regime(1 * mhz, 0.0, 10 * mhz) == Regime::Unresolved);
    CHECK(classify_regime(0.0, 0.0, 1.0) == Regime::Unresolved);
    CHECK(classify_regime(-13 * mhz, 6 * mhz, 2.5 * mhz) == Regime::ResolvedSplitting);
    CHECK(to_string(Regime::ResolvedSplitting) == "RESOLVED_SPLITTING");

    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double g = u(gen), b = u(gen), g0 = u(gen);
        const Regime base = classify_regime(g, b, g0);
        for (double scale : {1e-6, 0.37, 2.0, 1e6}) {
            CHECK(classify_regime(scale * g, scale * b, scale * g0) == base);
        }
    }
}
