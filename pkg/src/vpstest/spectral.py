"""DFT power spectra of +/-1 sequences.

``dft_power`` is the fast path (any length, O(n log n)); ``dft_power_direct``
evaluates the defining cosine/sine sums literally and exists to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vpstest.bitseq import PmSequence

DIRECT_MAX_N = 2**14


@dataclass(frozen=True)
class SpectrumResult:
    """Squared DFT magnitudes ``|S_j|^2``.

    When ``half`` is true only bins ``0 .. n/2 - 1`` are stored.
    """

    n: int
    mag2: np.ndarray
    half: bool

    def __post_init__(self):
        expected = self.n // 2 if self.half else self.n
        if self.mag2.shape != (expected,):
            raise ValueError(f"expected {expected} bins for n={self.n}, half={self.half}")
        self.mag2.flags.writeable = False


def power_spectrum(values: np.ndarray, half: bool = False) -> np.ndarray:
    """``|S_j|^2`` along the last axis of a real array (batched fast path)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[-1]
    if n < 2:
        raise ValueError("need n >= 2")
    if half:
        if n % 2:
            raise ValueError("half spectrum requires even n")
        spec = np.fft.rfft(values, axis=-1)[..., : n // 2]
    else:
        spec = np.fft.fft(values, axis=-1)
    return spec.real**2 + spec.imag**2


def dft_power(x: PmSequence, half: bool = False) -> SpectrumResult:
    return SpectrumResult(x.n, power_spectrum(x.values, half=half), half)


def dft_power_direct(x: PmSequence) -> SpectrumResult:
    """Full spectrum by the literal O(n^2) sums (n <= 2**14)."""
    n = x.n
    if n > DIRECT_MAX_N:
        raise ValueError(f"direct DFT limited to n <= {DIRECT_MAX_N}, got {n}")
    if n < 2:
        raise ValueError("need n >= 2")
    k = np.arange(n, dtype=np.int64)
    out = np.empty(n)
    rows = max(1, 2**22 // n)
    for j0 in range(0, n, rows):
        j = np.arange(j0, min(n, j0 + rows), dtype=np.int64)
        # exact integer reduction of k*j mod n before forming the angle
        angle = (2.0 * math.pi / n) * ((j[:, None] * k[None, :]) % n)
        c = np.cos(angle) @ x.values
        s = np.sin(angle) @ x.values
        out[j] = c * c + s * s
    return SpectrumResult(n, out, False)


def compensated_sum(values) -> float:
    """Error-free (correctly rounded) sum of a 1-d array."""
    return math.fsum(np.asarray(values, dtype=np.float64).ravel())


def fourth_power_sums(mag2: np.ndarray) -> np.ndarray:
    """Row-wise ``sum_j |S_j|^4`` with compensated summation."""
    mag2 = np.atleast_2d(mag2)
    sq = mag2 * mag2
    return np.array([math.fsum(row) for row in sq])
