// wgmsim: command-line driver for the experiment harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wgm/analysis.hpp"
#include "wgm/config.hpp"
#include "wgm/csv.hpp"
#include "wgm/experiments.hpp"
#include "wgm/physics.hpp"
#include "wgm/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wgm;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string channel;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config, "Experiment configuration (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--out", o.out, "Output directory (overrides output.directory)");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd->add_option("--channel", o.channel, "Detector channel to fit")
        ->check(CLI::IsMember({"pd1", "pd2", "pd3"}));
    cmd->add_flag("--quiet", o.quiet, "Suppress the summary on stdout");
}

ExperimentConfig resolve_config(const CommonOptions& o) {
    ExperimentConfig cfg = load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.channel.empty()) cfg.output.channel = parse_channel(o.channel);
    if (!o.out.empty()) cfg.output.directory = o.out;
    return cfg;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Non-finite numbers become null so the summary stays valid JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const DoubletFit& f) {
    json se = json::array();
    for (double v : f.standard_errors) se.push_back(num(v));
    return {{"center1_mhz", num(f.center1)},   {"center2_mhz", num(f.center2)},
            {"fwhm1_mhz", num(f.fwhm1)},       {"fwhm2_mhz", num(f.fwhm2)},
            {"amplitude1", num(f.amplitude1)}, {"amplitude2", num(f.amplitude2)},
            {"baseline_offset", num(f.baseline_offset)},
            {"baseline_slope", num(f.baseline_slope)},
            {"splitting_mhz", num(f.splitting())},
            {"residual_rms", num(f.residual_rms)},
            {"standard_errors", se},
            {"degenerate", f.degenerate},
            {"iterations", f.iterations}};
}

json modes_json(const std::array<Eigenmode, 2>& modes) {
    json out = json::array();
    for (const auto& m : modes) {
        out.push_back({{"frequency_shift_mhz", rad_per_s_to_mhz(m.frequency_shift)},
                       {"fwhm_mhz", rad_per_s_to_mhz(2.0 * m.half_linewidth)},
                       {"standing_wave_phase_rad", m.standing_wave_phase}});
    }
    return out;
}

json scan_summary(const ScanResult& scan) {
    int failed = 0;
    for (const auto& r : scan.rows) failed += r.fit_ok ? 0 : 1;
    return {{"axis", std::string(to_string(scan.axis))},
            {"rows", scan.rows.size()},
            {"failed_fits", failed},
            {"intrinsic_splitting_mhz", scan.intrinsic_splitting_mhz}};
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void finish(const CommonOptions& o, const fs::path& dir, json summary) {
    if (!dir.empty()) write_text(dir / "summary.json", summary.dump(2) + "\n");
    if (!o.quiet) std::cout << summary.dump(2) << "\n";
}

struct Prepared {
    ExperimentConfig cfg;
    fs::path dir;
    json summary;
};

Prepared prepare(const CommonOptions& o, const char* command) {
    Prepared p{resolve_config(o), {}, {}};
    p.dir = p.cfg.output.directory;
    write_text(p.dir / "config.json", config_to_json(p.cfg) + "\n");
    p.summary = {{"command", command},
                 {"run_hash", hex(run_hash(p.cfg))},
                 {"seed", p.cfg.seed},
                 {"channel", std::string(to_string(p.cfg.output.channel))}};
    return p;
}

void emit_scan(const Prepared& p, const ScanResult& scan) {
    emit_csv(scan, p.dir / "scan.csv");
    if (p.cfg.output.write_spectra) {
        for (std::size_t i = 0; i < scan.spectra.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "spectrum_%04zu.csv", i);
            emit_spectrum(scan.spectra[i], p.dir / "spectra" / name);
        }
    }
}

void cmd_spectrum(const CommonOptions& o) {
    auto p = prepare(o, "spectrum");
    const auto run = run_spectrum(p.cfg);
    emit_spectrum(run.spectrum, p.dir / "spectrum.csv");
    p.summary["eigenmodes"] = modes_json(run.modes);
    if (run.fit) {
        p.summary["fit"] = fit_json(*run.fit);
    } else {
        p.summary["fit_error"] = run.fit_error;
    }
    finish(o, p.dir, p.summary);
}

void cmd_scan_equator(const CommonOptions& o) {
    auto p = prepare(o, "scan-equator");
    const auto eq = run_equatorial_scan(p.cfg);
    emit_scan(p, eq.scan);
    p.summary["scan"] = scan_summary(eq.scan);
    p.summary["expected_period_rad"] = eq.expected_period;
    p.summary["peak_correlation"] = num(eq.peak_correlation);
    if (eq.sinusoid) {
        p.summary["sinusoid"] = {{"mean_mhz", eq.sinusoid->mean},
                                 {"amplitude_mhz", eq.sinusoid->amplitude},
                                 {"period_rad", eq.sinusoid->period},
                                 {"phase_rad", eq.sinusoid->phase},
                                 {"residual_rms_mhz", eq.sinusoid->residual_rms}};
    } else {
        p.summary["sinusoid_error"] = eq.sinusoid_error;
    }
    finish(o, p.dir, p.summary);
}

void cmd_scan_theta(const CommonOptions& o) {
    auto p = prepare(o, "scan-theta");
    const auto polar = run_polar_scan(p.cfg);
    emit_scan(p, polar.scan);
    p.summary["scan"] = scan_summary(polar.scan);
    if (polar.profile) {
        p.summary["profile"] = {{"offset_mhz", polar.profile->offset},
                                {"scale_mhz", polar.profile->scale},
                                {"residual_rms_mhz", polar.profile->residual_rms}};
    }
    finish(o, p.dir, p.summary);
}

void cmd_scan_radial(const CommonOptions& o) {
    auto p = prepare(o, "scan-radial");
    const auto radial = run_radial_scan(p.cfg);
    emit_scan(p, radial.scan);
    p.summary["scan"] = scan_summary(radial.scan);
    p.summary["expected_k_s_per_rad"] = radial.expected_k;
    if (radial.quadratic) {
        const auto& q = *radial.quadratic;
        p.summary["quadratic"] = {{"c0_rad_per_s", q.c0}, {"c1", q.c1},      {"c2_s_per_rad", q.c2},
                                  {"se0", num(q.se0)},    {"se1", num(q.se1)}, {"se2", num(q.se2)},
                                  {"residual_rms_rad_per_s", q.residual_rms}};
    } else {
        p.summary["quadratic_error"] = radial.quadratic_error;
    }
    finish(o, p.dir, p.summary);
}

void cmd_weak_to_strong(const CommonOptions& o) {
    auto p = prepare(o, "weak-to-strong");
    const auto w = run_weak_to_strong(p.cfg);
    emit_scan(p, w.scan);
    p.summary["scan"] = scan_summary(w.scan);
    p.summary["configured_polarizability_um3"] = w.configured_alpha / kCubicMicrometre;
    if (w.inference) {
        p.summary["inferred_polarizability_um3"] = w.inference->polarizability / kCubicMicrometre;
        p.summary["inferred_radius_nm"] = w.inference->radius / kNanometre;
    } else {
        p.summary["inference_error"] = w.inference_error;
    }
    finish(o, p.dir, p.summary);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    return out;
}

void cmd_fit(const CommonOptions& o, const std::string& input) {
    std::ifstream in(input);
    if (!in) throw UsageError("cannot open input '" + input + "'");
    const Channel channel = o.channel.empty() ? Channel::Pd2 : parse_channel(o.channel);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("input '" + input + "' is empty");
    const auto header = split_csv_line(line);
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw UsageError("input has no column '" + std::string(name) + "'");
    };
    const std::size_t xc = column("detuning_mhz");
    const std::size_t yc = column(to_string(channel));
    std::vector<double> x, y;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= std::max(xc, yc)) {
            throw UsageError("input row " + std::to_string(row) + " is short");
        }
        try {
            x.push_back(std::stod(cells[xc]));
            const double v = std::stod(cells[yc]);
            y.push_back(channel == Channel::Pd1 ? 1.0 - v : v);
        } catch (const std::logic_error&) {
            throw UsageError("input row " + std::to_string(row) + " is not numeric");
        }
    }
    const auto fit = fit_doublet(x, y);
    json summary{{"command", "fit"},
                 {"input", input},
                 {"channel", std::string(to_string(channel))},
                 {"fit", fit_json(fit)}};
    finish(o, o.out.empty() ? fs::path{} : fs::path(o.out), summary);
}

void cmd_infer_radius(const CommonOptions& o, double s, double b, double wavelength_nm,
                      double index) {
    const auto r = infer_scatterer_radius(s, b, wavelength_nm * kNanometre, index);
    json summary{{"command", "infer-radius"},
                 {"splitting_mhz", s},
                 {"broadening_mhz", b},
                 {"wavelength_nm", wavelength_nm},
                 {"refractive_index", index},
                 {"polarizability_um3", r.polarizability / kCubicMicrometre},
                 {"radius_nm", r.radius / kNanometre}};
    finish(o, o.out.empty() ? fs::path{} : fs::path(o.out), summary);
}

void cmd_purcell(const CommonOptions& o, std::optional<double> q, std::optional<double> wavelength_nm,
                 std::optional<double> volume_um3) {
    if (!o.config.empty()) {
        const auto cfg = resolve_config(o);
        q = q.value_or(cfg.resonator.intrinsic_q);
        wavelength_nm = wavelength_nm.value_or(cfg.resonator.wavelength_nm);
        volume_um3 = volume_um3.value_or(cfg.resonator.mode_volume_um3);
    }
    if (!q || !wavelength_nm || !volume_um3) {
        throw UsageError("purcell needs --q, --wavelength-nm and --mode-volume-um3 or a --config");
    }
    const double f = purcell_factor(*q, OpticalContext(*wavelength_nm * kNanometre),
                                    *volume_um3 * kCubicMicrometre);
    json summary{{"command", "purcell"},
                 {"intrinsic_q", *q},
                 {"wavelength_nm", *wavelength_nm},
                 {"mode_volume_um3", *volume_um3},
                 {"purcell_factor", f}};
    finish(o, o.out.empty() ? fs::path{} : fs::path(o.out), summary);
}

int report_error(const char* kind, const std::string& message, int code) {
    const json line{{"error", {{"type", kind}, {"message", message}}}};
    std::cerr << line.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Whispering-gallery mode backscattering simulator"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* spectrum = app.add_subcommand("spectrum", "Spectrum and doublet fit of one configuration");
    auto* equator = app.add_subcommand("scan-equator", "Tip scan along the equator (phi)");
    auto* theta = app.add_subcommand("scan-theta", "Tip scan across the mode (theta)");
    auto* radial = app.add_subcommand("scan-radial", "Tip approach scan (gap)");
    auto* w2s = app.add_subcommand("weak-to-strong", "Theta approach and scatterer size inference");
    for (auto* cmd : {spectrum, equator, theta, radial, w2s}) add_common(cmd, opts, true);

    auto* fit = app.add_subcommand("fit", "Doublet fit of a spectrum CSV");
    std::string input;
    fit->add_option("--input", input, "Spectrum CSV with a detuning_mhz column")->required();
    add_common(fit, opts, false);

    auto* infer = app.add_subcommand("infer-radius", "Scatterer radius from splitting and broadening");
    double s = 0.0, b = 0.0, wavelength = 670.0, index = 1.45;
    infer->add_option("--splitting-mhz", s, "Splitting |2g| in MHz")->required();
    infer->add_option("--broadening-mhz", b, "Added half-linewidth in MHz")->required();
    infer->add_option("--wavelength-nm", wavelength, "Vacuum wavelength in nm")->capture_default_str();
    infer->add_option("--index", index, "Scatterer refractive index")->capture_default_str();
    add_common(infer, opts, false);

    auto* purcell = app.add_subcommand("purcell", "Purcell factor of a mode");
    std::optional<double> q, purcell_wavelength, volume;
    purcell->add_option("--q", q, "Intrinsic quality factor");
    purcell->add_option("--wavelength-nm", purcell_wavelength, "Vacuum wavelength in nm");
    purcell->add_option("--mode-volume-um3", volume, "Mode volume in um^3");
    add_common(purcell, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), 2);
    }

    try {
        if (spectrum->parsed()) cmd_spectrum(opts);
        if (equator->parsed()) cmd_scan_equator(opts);
        if (theta->parsed()) cmd_scan_theta(opts);
        if (radial->parsed()) cmd_scan_radial(opts);
        if (w2s->parsed()) cmd_weak_to_strong(opts);
        if (fit->parsed()) cmd_fit(opts, input);
        if (infer->parsed()) cmd_infer_radius(opts, s, b, wavelength, index);
        if (purcell->parsed()) cmd_purcell(opts, q, purcell_wavelength, volume);
    } catch (const ConfigError& e) {
        return report_error("config", e.what(), 2);
    } catch (const UsageError& e) {
        return report_error("usage", e.what(), 2);
    } catch (const FitError& e) {
        return report_error("fit", e.what(), 3);
    } catch (const std::domain_error& e) {
        return report_error("domain", e.what(), 2);
    } catch (const std::exception& e) {
        return report_error("runtime", e.what(), 1);
    }
    return 0;
}
