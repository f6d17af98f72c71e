"""Second-level tests over a collection of per-sequence p-values.

* proportion test: ``r = #{p_i > 0.01}`` must satisfy
  ``|r - 0.99 M| < 3 sqrt(0.99 * 0.01 * M)``;
* uniformity test: 10-bin chi-square, pass iff ``p_uniform > 0.0001``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from vpstest.specialfns import as_probability, chi2_sf

ALPHA = 0.01
UNIFORMITY_ALPHA = 0.0001
BINS = 10


@dataclass(frozen=True)
class SecondLevelReport:
    M: int
    r: int
    proportion_pass: bool
    chi2_stat: float
    p_uniform: float
    uniformity_pass: bool
    bin_counts: tuple

    def as_dict(self) -> dict:
        return asdict(self)


def _pvalues(pvalues) -> np.ndarray:
    p = np.asarray(pvalues, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValueError("need at least one p-value")
    return as_probability(p)


def proportion_bound(M: int) -> float:
    return 3.0 * math.sqrt(M * (1 - ALPHA) * ALPHA)


def proportion_test(pvalues) -> tuple[int, bool]:
    """Returns ``(r, passed)``; a p-value of exactly 0.01 does not count toward r."""
    p = _pvalues(pvalues)
    M = p.size
    r = int(np.count_nonzero(p > ALPHA))
    return r, abs(r - (1 - ALPHA) * M) < proportion_bound(M)


def bin_counts(pvalues) -> np.ndarray:
    """Counts over [0, .1), [.1, .2), ..., [.9, 1.0]."""
    p = _pvalues(pvalues)
    idx = np.minimum(np.floor(p * BINS).astype(np.int64), BINS - 1)
    return np.bincount(idx, minlength=BINS)


def chi2_from_counts(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    expected = counts.sum() / counts.size
    return math.fsum((counts - expected) ** 2 / expected)


def uniformity_test(pvalues) -> tuple[float, float, bool]:
    """Returns ``(chi2, p_uniform, passed)``."""
    p = _pvalues(pvalues)
    if p.size < BINS:
        warnings.warn(f"uniformity test on only {p.size} p-values is unreliable", stacklevel=2)
    chi2 = chi2_from_counts(bin_counts(p))
    p_uniform = chi2_sf(chi2, BINS - 1)
    return chi2, p_uniform, p_uniform > UNIFORMITY_ALPHA


def meta_uniformity(p_uniform_values) -> float:
    """Uniformity p-value of a collection of per-set ``p_uniform`` values."""
    p = _pvalues(p_uniform_values)
    if p.size < BINS:
        raise ValueError(f"meta-uniformity needs at least {BINS} values, got {p.size}")
    return chi2_sf(chi2_from_counts(bin_counts(p)), BINS - 1)


def second_level(pvalues) -> SecondLevelReport:
    p = _pvalues(pvalues)
    r, prop_ok = proportion_test(p)
    counts = bin_counts(p)
    chi2 = chi2_from_counts(counts)
    p_uniform = chi2_sf(chi2, BINS - 1)
    return SecondLevelReport(
        M=int(p.size),
        r=r,
        proportion_pass=bool(prop_ok),
        chi2_stat=chi2,
        p_uniform=p_uniform,
        uniformity_pass=bool(p_uniform > UNIFORMITY_ALPHA),
        bin_counts=tuple(int(c) for c in counts),
    )
