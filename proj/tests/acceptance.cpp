// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wgm/analysis.hpp"
#include "wgm/coupled_mode.hpp"
#include "wgm/csv.hpp"
#include "wgm/experiments.hpp"
#include "wgm/physics.hpp"
#include "wgm/units.hpp"

using namespace wgm;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig config(const std::string& name) {
    return load_config(std::string(WGM_CONFIG_DIR) + "/" + name + ".json");
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

Outcome energy_balance() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = 1e-9 + 499e-9 * u(gen);
        const double n = 1.0 + 1e-3 + 2.5 * u(gen);
        const OpticalContext ctx(300e-9 + 1700e-9 * u(gen));
        const double vk = std::exp(std::log(1e-18) + std::log(1e6) * u(gen));
        const auto spec = ScattererSpec::from_radius(a, n);
        const double lhs = free_space_scattering_rate(spec, ctx, vk) * vk / kSpeedOfLight;
        const double rhs = rayleigh_cross_section(spec, ctx);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    const double t = elapsed_since(t0);
    return {worst < 1e-12 && t < 1.0, fmt("max rel error %.2e, %.3f s", worst, t)};
}

Outcome purcell() {
    const double f = purcell_factor(1e8, OpticalContext(670e-9), 130e-18);
    const bool in_band = f >= 1.5e4 && f <= 2.0e4;
    const bool pinned = std::abs(f / 1.76e4 - 1.0) < 5e-3;
    return {in_band && pinned, fmt("F = %.6g", f)};
}

Outcome single_scatterer_equivalence() {
    const auto mode = WgmMode::with_default_decay(15e-6, 670e-9, 204, 1.45, 1e8, 130e-18, 0.07);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double alpha = 1e-24 + 1e-20 * u(gen);
        const auto pos = Position::at_gap(mode, 100e-9 * u(gen), 0.1 * (u(gen) - 0.5), kTwoPi * u(gen));
        const std::array<ScattererPlacement, 1> one{ScattererPlacement::at(mode, alpha, pos)};
        const auto c = scatterer_coupling(mode, one[0]);
        const auto modes = eigenmodes(build_generator(mode, one));
        const auto& sym = modes[0].half_linewidth > modes[1].half_linewidth ? modes[0] : modes[1];
        const auto& anti = &sym == &modes[0] ? modes[1] : modes[0];
        const double scale = std::abs(c.two_g) + c.gamma;
        worst = std::max({worst, std::abs(anti.frequency_shift) / scale,
                          std::abs(anti.half_linewidth - mode.gamma0()) / scale,
                          std::abs(sym.frequency_shift - c.two_g) / std::abs(c.two_g),
                          std::abs(sym.half_linewidth - mode.gamma0() - c.gamma) / c.gamma});
    }
    return {worst < 1e-12, fmt("max rel deviation %.2e over 1000 scatterers", worst)};
}

Outcome steady_state_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mode = WgmMode::with_default_decay(15e-6, 670e-9, 204, 1.45, 1e8, 130e-18, 0.07);
    const double mhz = mhz_to_rad_per_s(1.0);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(u(gen) * 20);
        std::vector<ScattererCoupling> cs;
        for (int j = 0; j < n; ++j) cs.push_back({-5.0 * mhz * u(gen), 1.0 * mhz * u(gen), kTwoPi * u(gen)});
        const auto gen_m = build_generator_from_couplings(mode, cs);
        const auto modes = eigenmodes(gen_m);
        const double delta = modes[0].frequency_shift +
                             (modes[1].frequency_shift - modes[0].frequency_shift + 4.0 * mhz) * u(gen) - 2.0 * mhz;
        const double slowest = std::min(modes[0].half_linewidth, modes[1].half_linewidth);
        double radius = 0.0;
        for (const auto& em : modes) radius = std::max(radius, std::abs(em.eigenvalue - cplx(0.0, delta)));
        const double t_final = 25.0 / slowest;
        const double step = t_final / std::ceil(t_final * radius / 0.05);
        const auto traj = time_evolution(gen_m, delta, gen_m.kappa0, {0.0, 0.0}, t_final, step,
                                         static_cast<std::size_t>(-1));
        const auto target = steady_state(gen_m, delta);
        const auto& e = traj.amplitudes.back();
        const double err = std::hypot(std::abs(e[0] - target[0]), std::abs(e[1] - target[1]));
        worst = std::max(worst, err / std::hypot(std::abs(target[0]), std::abs(target[1])));
    }
    const double t = elapsed_since(t0);
    return {worst < 1e-6 && t < 10.0, fmt("max rel error %.2e, %.3f s", worst, t)};
}

Outcome fig1b() {
    const auto cfg = config("fig1b_doublet");
    const auto run = run_spectrum(cfg);
    if (!run.fit) return {false, "fit failed: " + run.fit_error};
    const double nu = kSpeedOfLight / (cfg.resonator.wavelength_nm * kNanometre);
    const double q1 = nu / (run.fit->fwhm1 * 1e6), q2 = nu / (run.fit->fwhm2 * 1e6);
    const bool ok = std::abs(run.fit->splitting() - 29.0) <= 0.1 && std::abs(q1 / 8e7 - 1.0) < 0.05 &&
                    std::abs(q2 / 8e7 - 1.0) < 0.05;
    return {ok, fmt("splitting %.4f MHz, Q %.4g / %.4g", run.fit->splitting(), q1, q2)};
}

Outcome fig2() {
    const auto cfg = config("fig2_equator");
    const auto eq = run_equatorial_scan(cfg);
    if (!eq.sinusoid) return {false, "sinusoid fit failed: " + eq.sinusoid_error};
    double lo = 1e300, hi = -1e300, tip_v = 0.0;
    for (const auto& row : eq.scan.rows) {
        if (!row.fit_ok) return {false, "row fit failed: " + row.fit_error};
        lo = std::min(lo, row.splitting_mhz);
        hi = std::max(hi, row.splitting_mhz);
        tip_v = std::max(tip_v, std::hypot(row.tip_two_g_mhz, row.tip_gamma_mhz));
    }
    const double base = eq.scan.intrinsic_splitting_mhz;
    const double period_error = std::abs(eq.sinusoid->period / eq.expected_period - 1.0);
    const bool ok = eq.peak_correlation < -0.9 && period_error < 0.01 && tip_v < base &&
                    lo < base && hi > base && std::abs(base - 24.0) < 1e-6;
    return {ok, fmt("pearson %.4f, period error %.2e, splitting range [%.3f, ", eq.peak_correlation,
                    period_error, lo) +
                    fmt("%.3f] MHz about %.3f", hi, base)};
}

Outcome fig3() {
    const auto cfg = config("fig3_radial");
    const auto radial = run_radial_scan(cfg);
    if (!radial.quadratic) return {false, "quadratic fit failed: " + radial.quadratic_error};
    if (radial.tip_splitting.size() != radial.scan.rows.size()) return {false, "unresolved rows in scan"};
    const auto& q = *radial.quadratic;
    double s_max = 0.0, b_max = 0.0;
    for (std::size_t i = 0; i < radial.tip_splitting.size(); ++i) {
        s_max = std::max(s_max, radial.tip_splitting[i]);
        b_max = std::max(b_max, radial.tip_broadening[i]);
    }
    // Noiseless data leave standard errors near round-off, hence a tiny floor.
    const bool c0_zero = std::abs(q.c0) <= 3.0 * q.se0 + 1e-9 * b_max;
    const bool c1_zero = std::abs(q.c1) <= 3.0 * q.se1 + 1e-9 * b_max / s_max;
    const double c2_error = std::abs(q.c2 / radial.expected_k - 1.0);
    return {c2_error < 0.01 && c0_zero && c1_zero,
            fmt("c2/K - 1 = %.2e, c0 = %.3g rad/s (se %.3g), ", c2_error, q.c0, q.se0) +
                fmt("c1 = %.3g (se %.3g)", q.c1, q.se1)};
}

Outcome fig4() {
    const auto closed = infer_scatterer_radius(13.0, 6.0, 670e-9, 1.45);
    const double a_nm = closed.radius / kNanometre;
    const auto w = run_weak_to_strong(config("fig4_weak_to_strong"));
    if (!w.inference) return {false, "inference failed: " + w.inference_error};
    const double alpha_error = std::abs(w.inference->polarizability / w.configured_alpha - 1.0);
    const bool ok = std::abs(a_nm - 146.0) <= 1.0 && std::abs(a_nm / 140.0 - 1.0) <= 0.1 && alpha_error < 0.02;
    return {ok, fmt("closed form a = %.2f nm, pipeline a = %.2f nm, alpha error %.2e", a_nm,
                    w.inference->radius / kNanometre, alpha_error)};
}

Outcome fit_robustness() {
    auto cfg = config("fig1b_doublet");
    cfg.noise_relative_sigma = 0.01;
    int within = 0;
    for (int trial = 0; trial < 100; ++trial) {
        cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
        try {
            const auto run = run_spectrum(cfg);
            if (run.fit && std::abs(run.fit->splitting() - 29.0) < 0.5) ++within;
        } catch (const std::exception&) {
        }
    }
    return {within >= 95, fmt("%.0f of 100 trials within 0.5 MHz", within)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "wgm_acceptance_determinism";
    std::filesystem::remove_all(dir);
    const auto cfg = config("ensemble_noise");
    for (const char* run : {"a", "b"}) {
        const auto scan = run_scan(cfg);
        emit_csv(scan, dir / run / "scan.csv");
        emit_spectrum(scan.spectra.front(), dir / run / "spectrum.csv");
    }
    bool same = true;
    std::size_t bytes = 0;
    for (const char* file : {"scan.csv", "spectrum.csv"}) {
        const auto a = read_file(dir / "a" / file);
        const auto b = read_file(dir / "b" / file);
        same = same && !a.empty() && a == b;
        bytes += a.size();
    }
    std::filesystem::remove_all(dir);
    return {same, fmt("%.0f bytes compared", static_cast<double>(bytes))};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"energy balance Gamma_R V / c = sigma_R", energy_balance},
        {"Purcell factor Q=1e8, 670 nm, 130 um^3", purcell},
        {"single-scatterer eigenmodes", single_scatterer_equivalence},
        {"steady state vs RK4 long-time limit", steady_state_oracle},
        {"29 MHz doublet at Q=8e7", fig1b},
        {"equatorial scan phenomenology", fig2},
        {"radial scan quadratic law", fig3},
        {"weak-to-strong radius inference", fig4},
        {"doublet fit robustness under 1% noise", fit_robustness},
        {"byte-identical outputs for identical config and seed", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::printf("[%s] %2zu. %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    out.detail.c_str());
    }
    std::printf("%d of %zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
