"""Envelope equations for dispersive wave packets and a pseudo-spectral full-field reference."""

from .dispersion import (
    DISPERSIONS,
    DispersionRelation,
    dispersion_eval,
    fourth_order,
    klein_gordon,
    phase_matching_scan,
)
from .fields import (
    EnvelopeField,
    Grid1D,
    Grid2D,
    Trajectory,
    WaveField,
    gaussian_envelope,
    spectral_interpolate,
    upper_band_fraction,
)
from .models import (
    EnvelopePDEModel,
    Harmonic,
    coupled_fourth_order_model,
    fourth_order_model,
    klein_gordon_model,
)
from .reconstruct import (
    envelope_error,
    envelope_rate,
    reconstruct_complex,
    reconstruct_field,
    write_metadata_json,
    write_snapshot_csv,
)
from .reference import dealias_mask, linear_energy, max_stable_dt, spectral_reference_solve
from .splitstep import coupled_solve, kerr_rotation, nls_solve, power_proxy, step_count, strang_integrate

__all__ = [
    "DISPERSIONS",
    "DispersionRelation",
    "EnvelopeField",
    "EnvelopePDEModel",
    "Grid1D",
    "Grid2D",
    "Harmonic",
    "Trajectory",
    "WaveField",
    "coupled_fourth_order_model",
    "coupled_solve",
    "dealias_mask",
    "dispersion_eval",
    "envelope_error",
    "envelope_rate",
    "fourth_order",
    "fourth_order_model",
    "gaussian_envelope",
    "kerr_rotation",
    "klein_gordon",
    "klein_gordon_model",
    "linear_energy",
    "max_stable_dt",
    "nls_solve",
    "phase_matching_scan",
    "power_proxy",
    "reconstruct_complex",
    "reconstruct_field",
    "spectral_interpolate",
    "spectral_reference_solve",
    "step_count",
    "strang_integrate",
    "upper_band_fraction",
    "write_metadata_json",
    "write_snapshot_csv",
]
