"""Coupled-mode simulation of backscattering in whispering-gallery resonators."""

from ._core import (
    ConfigError,
    DoubletFit,
    ExperimentConfig,
    FitError,
    Generator,
    WgmMode,
    build_generator,
    classify_regime,
    coupling_rates,
    fit_doublet,
    fit_quadratic,
    fit_sinusoid,
    free_space_scattering_rate,
    infer_scatterer_radius,
    load_config,
    mhz_to_rad_per_s,
    parse_config,
    polarizability,
    purcell_factor,
    rad_per_s_to_mhz,
    rayleigh_cross_section,
    run_scan,
    run_spectrum,
    run_weak_to_strong,
)

__all__ = [
    "ConfigError",
    "DoubletFit",
    "ExperimentConfig",
    "FitError",
    "Generator",
    "WgmMode",
    "build_generator",
    "classify_regime",
    "coupling_rates",
    "fit_doublet",
    "fit_quadratic",
    "fit_sinusoid",
    "free_space_scattering_rate",
    "infer_scatterer_radius",
    "load_config",
    "mhz_to_rad_per_s",
    "parse_config",
    "polarizability",
    "purcell_factor",
    "rad_per_s_to_mhz",
    "rayleigh_cross_section",
    "run_scan",
    "run_spectrum",
    "run_weak_to_strong",
]
