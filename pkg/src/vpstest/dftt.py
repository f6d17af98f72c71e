"""The DFT (spectral) test family: original NIST, Kim et al., Pareschi et al.

All three count half-spectrum bins ``j = 0 .. n/2 - 1`` whose magnitude falls
strictly below a threshold and normalize the count as

    d = (N1 - 0.95 n/2) / sqrt(0.95 * 0.05 * n / a)

differing only in the threshold and the divisor ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from vpstest.bitseq import BitSequence, to_pm1
from vpstest.spectral import SpectrumResult, power_spectrum
from vpstest.specialfns import normal_two_sided_pvalue


def _original_threshold_sq(n: int) -> float:
    return 3.0 * n


def _kim_threshold_sq(n: int) -> float:
    return -n * math.log(0.05)


@dataclass(frozen=True)
class DfttVariant:
    name: str
    threshold_sq: Callable[[int], float]
    a: float

    def threshold(self, n: int) -> float:
        return math.sqrt(self.threshold_sq(n))


ORIGINAL = DfttVariant("original", _original_threshold_sq, 2.0)
KIM = DfttVariant("kim", _kim_threshold_sq, 4.0)
# Pareschi et al. refit only the variance divisor; the threshold stays Kim's.
PARESCHI = DfttVariant("pareschi", _kim_threshold_sq, 3.8)

VARIANTS = {v.name: v for v in (ORIGINAL, KIM, PARESCHI)}


@dataclass(frozen=True)
class TestOutcome:
    """Per-sequence result: statistic (``d`` or the scaled variance), its p-value."""

    __test__ = False  # not a pytest class

    statistic: float
    pvalue: float
    variant: str
    n: int


def count_below_threshold(spec: SpectrumResult, threshold: float) -> int:
    """Number of stored bins with ``|S_j| < threshold`` (ties count as not below)."""
    if not spec.half:
        raise ValueError("count_below_threshold expects a half spectrum")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    return int(np.count_nonzero(spec.mag2 < threshold * threshold))


def d_statistic(n1, n: int, variant: DfttVariant):
    """Normalized count ``d``; ``n1`` may be an array."""
    return (np.asarray(n1, dtype=np.float64) - 0.95 * n / 2) / math.sqrt(0.95 * 0.05 * n / variant.a)


def dftt_from_half_spectra(mag2_half: np.ndarray, n: int, variant: DfttVariant):
    """Batched ``(d, p)`` from rows of half power spectra."""
    n1 = np.count_nonzero(mag2_half < variant.threshold_sq(n), axis=-1)
    d = d_statistic(n1, n, variant)
    return d, normal_two_sided_pvalue(d)


def dftt_pvalue(x: BitSequence, variant: DfttVariant = KIM) -> TestOutcome:
    n = x.n
    if n < 2 or n % 2:
        raise ValueError(f"DFT test requires even n >= 2, got {n}")
    mag2 = power_spectrum(to_pm1(x).values, half=True)
    n1 = int(np.count_nonzero(mag2 < variant.threshold_sq(n)))
    d = float(d_statistic(n1, n, variant))
    return TestOutcome(d, float(normal_two_sided_pvalue(d)), variant.name, n)
