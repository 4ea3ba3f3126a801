"""Numerical tolerances and the dimension cap shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_MAX_DIM = 4096
MAX_DIM_ENV = "DESCRIPTOR_LAB_MAX_DIM"


@dataclass(frozen=True)
class Tolerances:
    unitary: float = 1e-10
    hermitian: float = 1e-10
    prune: float = 1e-12
    locality: float = 1e-10
    equivalence: float = 1e-9
    step_global: float = 1e-9
    reconstruction: float = 1e-9
    recovery: float = 1e-8
    projective: float = 1e-10
    norm: float = 1e-10
    imag_residue: float = 1e-10
    pivot: float = 1e-6


TOL = Tolerances()


def max_dim() -> int:
    """Dimension cap, overridable through ``DESCRIPTOR_LAB_MAX_DIM``."""
    raw = os.environ.get(MAX_DIM_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_DIM_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{MAX_DIM_ENV} must be positive, got {value}")
    return value
