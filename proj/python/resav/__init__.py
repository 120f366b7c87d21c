"""Relaxed exponential SAV schemes on periodic Fourier grids."""

from ._core import (
    ConfigError,
    Error,
    Grid,
    InvariantViolation,
    IoError,
    NumericalError,
    backward,
    bdf_tableau,
    converge,
    csv_columns,
    forward,
    leray_project,
    read_snapshot,
    relax_esav1,
    relax_esav2,
    relax_mesav,
    run,
    v_poly,
    write_snapshot,
)

__all__ = [name for name in dir() if not name.startswith("_")]
