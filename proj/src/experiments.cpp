#include "wgm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wgm/rng.hpp"
#include "wgm/units.hpp"

namespace wgm {

namespace {

constexpr std::uint64_t kEnsembleStream = 0xE5E3B1E0ull;

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

void add_noise(Spectrum& s, double relative_sigma, std::uint64_t seed) {
    if (relative_sigma <= 0.0) return;
    Rng rng(seed);
    for (auto* channel : {&s.pd1, &s.pd2, &s.pd3}) {
        double scale = 0.0;
        if (channel == &s.pd1) {
            for (double v : *channel) scale = std::max(scale, std::abs(1.0 - v));
        } else {
            for (double v : *channel) scale = std::max(scale, std::abs(v));
        }
        const double sigma = relative_sigma * scale;
        for (double& v : *channel) v += sigma * rng.normal();
    }
}

struct PointOutcome {
    Spectrum spectrum;
    ScanRow row;
};

PointOutcome simulate_point(const ExperimentConfig& cfg, const WgmMode& mode,
                            const std::vector<ScattererPlacement>& intrinsic,
                            const std::optional<ScattererPlacement>& tip,
                            const std::vector<double>& grid, std::uint64_t noise_seed) {
    std::vector<ScattererPlacement> all = intrinsic;
    std::optional<TipProbe> probe;
    PointOutcome out;
    if (tip) {
        all.push_back(*tip);
        const auto tc = scatterer_coupling(mode, *tip);
        probe = TipProbe{tc.gamma, tip->phi};
        out.row.tip_two_g_mhz = rad_per_s_to_mhz(tc.two_g);
        out.row.tip_gamma_mhz = rad_per_s_to_mhz(tc.gamma);
    }
    const Generator gen = build_generator(mode, all);
    out.spectrum = spectrum(gen, grid, probe, {cfg.outcoupling_fraction});
    add_noise(out.spectrum, cfg.noise_relative_sigma, noise_seed);

    const auto modes = eigenmodes(gen);
    out.row.model_splitting_mhz = rad_per_s_to_mhz(observed_splitting(gen));
    out.row.model_broadening_mhz =
        rad_per_s_to_mhz(std::max(modes[0].half_linewidth, modes[1].half_linewidth) - gen.gamma0);

    const auto x = detuning_mhz(out.spectrum);
    const auto y = channel_signal(out.spectrum, cfg.output.channel);
    try {
        const DoubletFit fit = fit_doublet(x, y);
        auto& r = out.row;
        r.fit_ok = true;
        r.degenerate = fit.degenerate;
        r.splitting_mhz = fit.splitting();
        r.peak1 = fit.amplitude1;
        r.peak2 = fit.amplitude2;
        r.fwhm1_mhz = fit.fwhm1;
        r.fwhm2_mhz = fit.fwhm2;
        r.broadening_mhz = 0.5 * std::abs(fit.fwhm2 - fit.fwhm1);
        r.regime = classify_regime(r.splitting_mhz, r.broadening_mhz,
                                   rad_per_s_to_mhz(mode.gamma0()));
    } catch (const std::exception& e) {
        out.row.fit_ok = false;
        out.row.fit_error = e.what();
    }
    return out;
}

const TipScan& require_scan(const ExperimentConfig& cfg, std::optional<ScanAxis> axis) {
    if (!cfg.tip || !cfg.tip->scan) throw ConfigError("tip.scan: this run needs a tip scan");
    if (axis && cfg.tip->scan->axis != *axis) {
        throw ConfigError("tip.scan.axis: this run needs axis '" + std::string(to_string(*axis)) +
                          "'");
    }
    return *cfg.tip->scan;
}

}  // namespace

std::vector<ScattererPlacement> intrinsic_placements(const ExperimentConfig& cfg) {
    const WgmMode mode = cfg.resonator.mode();
    std::vector<ScattererPlacement> out;
    for (const auto& s : cfg.intrinsic) {
        const auto pos = Position::at_gap(mode, s.gap_nm * kNanometre, s.theta_rad, s.phi_rad);
        out.push_back(ScattererPlacement::at(mode, s.particle.spec().polarizability(), pos));
    }
    if (cfg.ensemble) {
        Rng rng(derive_seed(cfg.seed, kEnsembleStream));
        const double lo = std::log(cfg.ensemble->polarizability_min_um3);
        const double hi = std::log(cfg.ensemble->polarizability_max_um3);
        for (int i = 0; i < cfg.ensemble->count; ++i) {
            const double alpha = std::exp(rng.uniform(lo, hi)) * kCubicMicrometre;
            const double phi = rng.uniform(0.0, kTwoPi);
            const double theta = mode.polar_width * rng.normal();
            out.push_back(ScattererPlacement::at(mode, alpha, Position::at_gap(mode, 0.0, theta, phi)));
        }
    }
    return out;
}

ScattererPlacement tip_placement(const ExperimentConfig& cfg, double gap_nm, double theta_rad,
                                 double phi_rad) {
    if (!cfg.tip) throw ConfigError("tip: no tip configured");
    const WgmMode mode = cfg.resonator.mode();
    const auto& tip = *cfg.tip;
    const double overlap = tip.overlap_length_nm ? *tip.overlap_length_nm * kNanometre : 0.0;
    const double alpha =
        effective_polarizability(tip.particle.spec(), mode, gap_nm * kNanometre, overlap);
    // Angular profile only: the radial dependence lives in alpha_eff(gap).
    const double f = mode_amplitude(mode, Position::at(mode.sphere_radius, theta_rad, phi_rad));
    return {alpha, tip.field_overlap * f * f, Position::at(0.0, 0.0, phi_rad).phi};
}

std::vector<double> channel_signal(const Spectrum& spectrum, Channel channel) {
    switch (channel) {
        case Channel::Pd1: {
            std::vector<double> dip(spectrum.pd1.size());
            std::transform(spectrum.pd1.begin(), spectrum.pd1.end(), dip.begin(),
                           [](double v) { return 1.0 - v; });
            return dip;
        }
        case Channel::Pd2: return spectrum.pd2;
        case Channel::Pd3: return spectrum.pd3;
    }
    return spectrum.pd2;
}

std::vector<double> detuning_mhz(const Spectrum& spectrum) {
    std::vector<double> out(spectrum.detuning.size());
    std::transform(spectrum.detuning.begin(), spectrum.detuning.end(), out.begin(),
                   rad_per_s_to_mhz);
    return out;
}

SpectrumRun run_spectrum(const ExperimentConfig& cfg) {
    const WgmMode mode = cfg.resonator.mode();
    const auto intrinsic = intrinsic_placements(cfg);
    std::optional<ScattererPlacement> tip;
    if (cfg.tip) tip = tip_placement(cfg, cfg.tip->gap_nm, cfg.tip->theta_rad, cfg.tip->phi_rad);
    auto point = simulate_point(cfg, mode, intrinsic, tip, cfg.laser.grid(), derive_seed(cfg.seed, 1));

    std::vector<ScattererPlacement> all = intrinsic;
    if (tip) all.push_back(*tip);
    SpectrumRun run{std::move(point.spectrum), eigenmodes(build_generator(mode, all)), {}, {}};
    if (point.row.fit_ok) {
        const auto x = detuning_mhz(run.spectrum);
        run.fit = fit_doublet(x, channel_signal(run.spectrum, cfg.output.channel));
    } else {
        run.fit_error = point.row.fit_error;
    }
    return run;
}

ScanResult run_scan(const ExperimentConfig& cfg) {
    const TipScan& scan = require_scan(cfg, std::nullopt);
    const WgmMode mode = cfg.resonator.mode();
    const auto intrinsic = intrinsic_placements(cfg);
    const auto grid = cfg.laser.grid();
    const auto positions = scan.positions();

    ScanResult result;
    result.axis = scan.axis;
    result.intrinsic_splitting_mhz = rad_per_s_to_mhz(observed_splitting(build_generator(mode, intrinsic)));
    result.rows.resize(positions.size());
    result.spectra.resize(positions.size());

    const auto& tip = *cfg.tip;
    parallel_for(positions.size(), [&](std::size_t i) {
        double gap = tip.gap_nm, theta = tip.theta_rad, phi = tip.phi_rad;
        switch (scan.axis) {
            case ScanAxis::Phi: phi = positions[i]; break;
            case ScanAxis::Theta: theta = positions[i]; break;
            case ScanAxis::Radial: gap = positions[i]; break;
        }
        auto point = simulate_point(cfg, mode, intrinsic, tip_placement(cfg, gap, theta, phi), grid,
                                    derive_seed(cfg.seed, i + 1));
        point.row.position = positions[i];
        result.rows[i] = std::move(point.row);
        result.spectra[i] = std::move(point.spectrum);
    });
    return result;
}

EquatorialScan run_equatorial_scan(const ExperimentConfig& cfg) {
    require_scan(cfg, ScanAxis::Phi);
    EquatorialScan out;
    out.scan = run_scan(cfg);
    out.expected_period = equatorial_period(cfg.resonator.mode()).angular;

    std::vector<double> phi, split, h1, h2;
    for (const auto& row : out.scan.rows) {
        if (!row.fit_ok) continue;
        phi.push_back(row.position);
        split.push_back(row.splitting_mhz);
        h1.push_back(row.peak1);
        h2.push_back(row.peak2);
    }
    try {
        out.sinusoid = fit_sinusoid(phi, split);
    } catch (const std::exception& e) {
        out.sinusoid_error = e.what();
    }
    out.peak_correlation = h1.size() >= 2 ? pearson_correlation(h1, h2) : std::nan("");
    return out;
}

PolarScan run_polar_scan(const ExperimentConfig& cfg) {
    require_scan(cfg, ScanAxis::Theta);
    PolarScan out;
    out.scan = run_scan(cfg);
    const double sigma = cfg.resonator.polar_width_rad;
    std::vector<double> basis, split;
    for (const auto& row : out.scan.rows) {
        if (!row.fit_ok) continue;
        const double s = row.position / sigma;
        basis.push_back(std::exp(-s * s));
        split.push_back(row.splitting_mhz);
    }
    if (basis.size() >= 3) {
        try {
            out.profile = fit_profile(basis, split);
        } catch (const std::exception&) {
            out.profile.reset();
        }
    }
    return out;
}

RadialScan run_radial_scan(const ExperimentConfig& cfg) {
    require_scan(cfg, ScanAxis::Radial);
    RadialScan out;
    out.scan = run_scan(cfg);

    const WgmMode mode = cfg.resonator.mode();
    const auto tip = tip_placement(cfg, 0.0, cfg.tip->theta_rad, cfg.tip->phi_rad);
    const double w = mode.angular_frequency();
    const double c = kSpeedOfLight;
    out.expected_k = mode.mode_volume * w * w / (6.0 * kPi * c * c * c * tip.f_sq);

    for (const auto& row : out.scan.rows) {
        if (!row.fit_ok || row.degenerate) continue;
        out.tip_splitting.push_back(
            mhz_to_rad_per_s(std::abs(row.splitting_mhz - out.scan.intrinsic_splitting_mhz)));
        out.tip_broadening.push_back(mhz_to_rad_per_s(row.broadening_mhz));
    }
    try {
        out.quadratic = fit_quadratic(out.tip_splitting, out.tip_broadening);
    } catch (const std::exception& e) {
        out.quadratic_error = e.what();
    }
    return out;
}

WeakToStrong run_weak_to_strong(const ExperimentConfig& cfg) {
    const TipScan& scan = require_scan(cfg, ScanAxis::Theta);
    if (!cfg.intrinsic.empty() || (cfg.ensemble && cfg.ensemble->count > 0)) {
        throw ConfigError("weak-to-strong: needs a resonator without intrinsic scatterers");
    }
    WeakToStrong out;
    out.scan = run_scan(cfg);
    out.configured_alpha = tip_placement(cfg, cfg.tip->gap_nm, scan.stop, cfg.tip->phi_rad).alpha;

    const auto& last = out.scan.rows.back();
    if (!last.fit_ok) {
        out.inference_error = "final frame fit failed: " + last.fit_error;
        return out;
    }
    try {
        const double index = cfg.tip->particle.refractive_index.value_or(1.45);
        out.inference = infer_scatterer_radius(last.splitting_mhz, last.broadening_mhz,
                                               cfg.resonator.wavelength_nm * kNanometre, index);
    } catch (const std::exception& e) {
        out.inference_error = e.what();
    }
    return out;
}

}  // namespace wgm
