"""Synthetic joint spectra, h-chart detection and spectral monodromy (C++ core)."""

from ._specmono import (
    ActionChart,
    ConfigError,
    DetectError,
    DomainError,
    Error,
    Model,
    ModelError,
    MonodromyError,
    action_coords,
    action_coords_at,
    champagne_model,
    classical_monodromy,
    diophantine_margin,
    fit_hchart,
    flat_model,
    gl2z_conjugate,
    is_diophantine,
    normal_form,
    run_config,
    synth_spectrum,
    time_average,
    torus_average,
)

__all__ = [
    "ActionChart",
    "ConfigError",
    "DetectError",
    "DomainError",
    "Error",
    "Model",
    "ModelError",
    "MonodromyError",
    "action_coords",
    "action_coords_at",
    "champagne_model",
    "classical_monodromy",
    "diophantine_margin",
    "fit_hchart",
    "flat_model",
    "gl2z_conjugate",
    "is_diophantine",
    "normal_form",
    "run_config",
    "synth_spectrum",
    "time_average",
    "torus_average",
]
