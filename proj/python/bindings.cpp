#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wgm/analysis.hpp"
#include "wgm/config.hpp"
#include "wgm/coupled_mode.hpp"
#include "wgm/experiments.hpp"
#include "wgm/physics.hpp"
#include "wgm/units.hpp"

namespace py = pybind11;
using namespace wgm;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

py::dict spectrum_dict(const Spectrum& s) {
    py::dict d;
    std::vector<double> mhz(s.detuning.size());
    for (std::size_t i = 0; i < mhz.size(); ++i) mhz[i] = rad_per_s_to_mhz(s.detuning[i]);
    d["detuning_mhz"] = to_array(mhz);
    d["pd1"] = to_array(s.pd1);
    d["pd2"] = to_array(s.pd2);
    d["pd3"] = to_array(s.pd3);
    return d;
}

py::dict row_dict(const ScanRow& r) {
    py::dict d;
    d["position"] = r.position;
    d["fit_ok"] = r.fit_ok;
    d["fit_error"] = r.fit_error;
    d["degenerate"] = r.degenerate;
    d["splitting_mhz"] = r.splitting_mhz;
    d["peak1"] = r.peak1;
    d["peak2"] = r.peak2;
    d["fwhm1_mhz"] = r.fwhm1_mhz;
    d["fwhm2_mhz"] = r.fwhm2_mhz;
    d["broadening_mhz"] = r.broadening_mhz;
    d["model_splitting_mhz"] = r.model_splitting_mhz;
    d["model_broadening_mhz"] = r.model_broadening_mhz;
    d["tip_two_g_mhz"] = r.tip_two_g_mhz;
    d["tip_gamma_mhz"] = r.tip_gamma_mhz;
    d["regime"] = std::string(to_string(r.regime));
    return d;
}

py::dict scan_dict(const ScanResult& scan) {
    py::dict d;
    d["axis"] = std::string(to_string(scan.axis));
    d["intrinsic_splitting_mhz"] = scan.intrinsic_splitting_mhz;
    py::list rows, spectra;
    for (const auto& r : scan.rows) rows.append(row_dict(r));
    for (const auto& s : scan.spectra) spectra.append(spectrum_dict(s));
    d["rows"] = rows;
    d["spectra"] = spectra;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled-mode simulator for backscattering in whispering-gallery resonators";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);

    // physics
    m.def("polarizability", [](double radius_m, double index) {
        return polarizability(ScattererSpec::from_radius(radius_m, index));
    }, py::arg("radius_m"), py::arg("refractive_index"), "Polarizability in m^3.");
    m.def("rayleigh_cross_section", [](double polarizability_m3, double wavelength_m) {
        return rayleigh_cross_section(ScattererSpec::from_polarizability(polarizability_m3),
                                      OpticalContext(wavelength_m));
    }, py::arg("polarizability_m3"), py::arg("wavelength_m"), "Cross-section in m^2.");
    m.def("free_space_scattering_rate",
          [](double polarizability_m3, double wavelength_m, double mode_volume_m3) {
              return free_space_scattering_rate(ScattererSpec::from_polarizability(polarizability_m3),
                                                OpticalContext(wavelength_m), mode_volume_m3);
          },
          py::arg("polarizability_m3"), py::arg("wavelength_m"), py::arg("mode_volume_m3"),
          "Free-space scattering rate in rad/s.");
    m.def("purcell_factor", [](double q, double wavelength_m, double mode_volume_m3) {
        return purcell_factor(q, OpticalContext(wavelength_m), mode_volume_m3);
    }, py::arg("q"), py::arg("wavelength_m"), py::arg("mode_volume_m3"));
    m.def("coupling_rates",
          [](double alpha_m3, double f_sq, double wavelength_m, double mode_volume_m3) {
              const auto r = coupling_rates(alpha_m3, f_sq, OpticalContext(wavelength_m), mode_volume_m3);
              return py::make_tuple(r.two_g, r.gamma);
          },
          py::arg("polarizability_m3"), py::arg("f_sq"), py::arg("wavelength_m"),
          py::arg("mode_volume_m3"), "(2g, Gamma) in rad/s.");
    m.def("classify_regime", [](double two_g, double gamma, double gamma0) {
        return std::string(to_string(classify_regime(two_g, gamma, gamma0)));
    }, py::arg("two_g"), py::arg("gamma"), py::arg("gamma0"));
    m.def("mhz_to_rad_per_s", &mhz_to_rad_per_s);
    m.def("rad_per_s_to_mhz", &rad_per_s_to_mhz);

    // mode geometry
    py::class_<WgmMode>(m, "WgmMode")
        .def(py::init([](double sphere_radius_m, double wavelength_m, int azimuthal_order,
                         double sphere_index, double intrinsic_q, double mode_volume_m3,
                         double polar_width_rad, std::optional<double> evanescent_decay_m) {
                 auto mode = WgmMode::with_default_decay(sphere_radius_m, wavelength_m, azimuthal_order,
                                                         sphere_index, intrinsic_q, mode_volume_m3,
                                                         polar_width_rad);
                 if (evanescent_decay_m) mode.evanescent_decay = *evanescent_decay_m;
                 mode.validate();
                 return mode;
             }),
             py::arg("sphere_radius_m"), py::arg("wavelength_m"), py::arg("azimuthal_order"),
             py::arg("sphere_index"), py::arg("intrinsic_q"), py::arg("mode_volume_m3"),
             py::arg("polar_width_rad"), py::arg("evanescent_decay_m") = py::none())
        .def_readonly("sphere_radius", &WgmMode::sphere_radius)
        .def_readonly("wavelength", &WgmMode::wavelength)
        .def_readonly("azimuthal_order", &WgmMode::azimuthal_order)
        .def_readonly("intrinsic_q", &WgmMode::intrinsic_q)
        .def_readonly("mode_volume", &WgmMode::mode_volume)
        .def_readonly("polar_width", &WgmMode::polar_width)
        .def_readonly("evanescent_decay", &WgmMode::evanescent_decay)
        .def("gamma0", &WgmMode::gamma0)
        .def("angular_frequency", &WgmMode::angular_frequency)
        .def("equatorial_period", [](const WgmMode& mode) {
            const auto p = equatorial_period(mode);
            return py::make_tuple(p.angular, p.arc);
        });

    // coupled-mode engine
    py::class_<Generator>(m, "Generator")
        .def_property_readonly("matrix", [](const Generator& g) {
            return py::make_tuple(py::make_tuple(g.m11, g.m12), py::make_tuple(g.m21, g.m22));
        })
        .def_readonly("gamma0", &Generator::gamma0)
        .def("eigenmodes", [](const Generator& g) {
            py::list out;
            for (const auto& em : eigenmodes(g)) {
                py::dict d;
                d["eigenvalue"] = em.eigenvalue;
                d["frequency_shift"] = em.frequency_shift;
                d["half_linewidth"] = em.half_linewidth;
                d["vector"] = py::make_tuple(em.vector[0], em.vector[1]);
                d["standing_wave_phase"] = em.standing_wave_phase;
                out.append(d);
            }
            return out;
        })
        .def("observed_splitting", [](const Generator& g) { return observed_splitting(g); })
        .def("steady_state", [](const Generator& g, double detuning) {
            const auto e = steady_state(g, detuning);
            return py::make_tuple(e[0], e[1]);
        }, py::arg("detuning"))
        .def("spectrum",
             [](const Generator& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& grid,
                std::optional<std::pair<double, double>> tip, double outcoupling_fraction) {
                 std::optional<TipProbe> probe;
                 if (tip) probe = TipProbe{tip->first, tip->second};
                 return spectrum_dict(spectrum(g, to_vector(grid), probe, {outcoupling_fraction}));
             },
             py::arg("detuning_grid"), py::arg("tip") = py::none(),
             py::arg("outcoupling_fraction") = 0.5,
             "Detector traces over a detuning grid in rad/s; tip is (gamma, phi).");

    m.def("build_generator",
          [](const WgmMode& mode, const std::vector<std::tuple<double, double, double>>& couplings,
             double kappa0) {
              std::vector<ScattererCoupling> cs;
              for (const auto& [two_g, gamma, phi] : couplings) cs.push_back({two_g, gamma, phi});
              return build_generator_from_couplings(mode, cs, kappa0);
          },
          py::arg("mode"), py::arg("couplings"), py::arg("kappa0") = 1.0,
          "Generator from (2g, Gamma, phi) triples in rad/s and rad.");

    // analysis
    py::class_<DoubletFit>(m, "DoubletFit")
        .def_readonly("center1", &DoubletFit::center1)
        .def_readonly("center2", &DoubletFit::center2)
        .def_readonly("fwhm1", &DoubletFit::fwhm1)
        .def_readonly("fwhm2", &DoubletFit::fwhm2)
        .def_readonly("amplitude1", &DoubletFit::amplitude1)
        .def_readonly("amplitude2", &DoubletFit::amplitude2)
        .def_readonly("baseline_offset", &DoubletFit::baseline_offset)
        .def_readonly("baseline_slope", &DoubletFit::baseline_slope)
        .def_readonly("residual_rms", &DoubletFit::residual_rms)
        .def_readonly("standard_errors", &DoubletFit::standard_errors)
        .def_readonly("degenerate", &DoubletFit::degenerate)
        .def_readonly("iterations", &DoubletFit::iterations)
        .def_property_readonly("splitting", &DoubletFit::splitting)
        .def("evaluate", &DoubletFit::evaluate);

    m.def("fit_doublet",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x_mhz,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
              return fit_doublet(to_vector(x_mhz), to_vector(y));
          },
          py::arg("x_mhz"), py::arg("y"));
    m.def("infer_scatterer_radius",
          [](double s, double b, double wavelength_m, double index) {
              const auto r = infer_scatterer_radius(s, b, wavelength_m, index);
              return py::make_tuple(r.polarizability, r.radius);
          },
          py::arg("splitting_mhz"), py::arg("broadening_mhz"), py::arg("wavelength_m"),
          py::arg("refractive_index") = 1.45, "(polarizability m^3, radius m).");
    m.def("fit_sinusoid",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
              const auto f = fit_sinusoid(to_vector(x), to_vector(y));
              py::dict d;
              d["mean"] = f.mean;
              d["amplitude"] = f.amplitude;
              d["period"] = f.period;
              d["phase"] = f.phase;
              d["residual_rms"] = f.residual_rms;
              return d;
          });
    m.def("fit_quadratic",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
              const auto f = fit_quadratic(to_vector(x), to_vector(y));
              return py::make_tuple(py::make_tuple(f.c0, f.c1, f.c2), py::make_tuple(f.se0, f.se1, f.se2));
          },
          "((c0, c1, c2), (se0, se1, se2)).");

    // harness
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c); })
        .def("run_hash", [](const ExperimentConfig& c) { return run_hash(c); })
        .def("mode", [](const ExperimentConfig& c) { return c.resonator.mode(); });
    m.def("parse_config", [](const std::string& text) { return parse_config(text); });
    m.def("load_config", [](const std::string& path) { return load_config(path); });

    m.def("run_spectrum", [](const ExperimentConfig& cfg) {
        SpectrumRun run;
        {
            py::gil_scoped_release release;
            run = run_spectrum(cfg);
        }
        py::dict d = spectrum_dict(run.spectrum);
        d["fit"] = run.fit ? py::cast(*run.fit) : py::none();
        d["fit_error"] = run.fit_error;
        return d;
    });
    m.def("run_scan", [](const ExperimentConfig& cfg) {
        ScanResult scan;
        {
            py::gil_scoped_release release;
            scan = run_scan(cfg);
        }
        return scan_dict(scan);
    });
    m.def("run_weak_to_strong", [](const ExperimentConfig& cfg) {
        WeakToStrong w;
        {
            py::gil_scoped_release release;
            w = run_weak_to_strong(cfg);
        }
        py::dict d = scan_dict(w.scan);
        d["configured_polarizability"] = w.configured_alpha;
        if (w.inference) {
            d["inferred_polarizability"] = w.inference->polarizability;
            d["inferred_radius"] = w.inference->radius;
        } else {
            d["inference_error"] = w.inference_error;
        }
        return d;
    });
}
