"""Complementary error function and chi-square tail probabilities."""

from __future__ import annotations

import numpy as np
from scipy import special

# negative rounding residue we are willing to clamp to zero
_CLAMP_TOL = 1e-15


def erfc(z):
    """Complementary error function; accepts scalars or arrays."""
    arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("erfc argument must be finite")
    out = special.erfc(arr)
    return float(out) if out.ndim == 0 else out


def as_probability(p):
    """Validate that ``p`` lies in [0, 1], clamping only tiny negative residue."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < -_CLAMP_TOL) or np.any(arr > 1.0 + _CLAMP_TOL) or np.any(np.isnan(arr)):
        raise ValueError(f"not a probability: {p!r}")
    arr = np.clip(arr, 0.0, 1.0)
    return float(arr) if arr.ndim == 0 else arr


def chi2_sf(stat, dof: int) -> float:
    """P(X > stat) for X ~ chi-square with ``dof`` degrees of freedom.

    Computed as the regularized upper incomplete gamma ``Q(dof/2, stat/2)``.
    """
    if dof < 1 or int(dof) != dof:
        raise ValueError("dof must be a positive integer")
    stat = float(stat)
    if stat < 0 or np.isnan(stat):
        raise ValueError("chi-square statistic must be non-negative")
    if np.isinf(stat):
        return 0.0
    return as_probability(special.gammaincc(dof / 2.0, stat / 2.0))


def normal_two_sided_pvalue(z):
    """``erfc(|z| / sqrt(2))``: twice the standard normal upper tail at ``|z|``."""
    return erfc(np.abs(np.asarray(z, dtype=np.float64)) / np.sqrt(2.0))
