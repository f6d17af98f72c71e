"""Variance of the power spectrum and the scaled statistic built on it.

For a +/-1 sequence of length n with DFT magnitudes ``|S_j|``,

    V_n = (1/n^3) * sum_j |S_j|^4 - 1              (Parseval form)
    E[V_n] = 1 (n even), 1 - 1/n (n odd)
    V~_n = sqrt(n/8) * (V_n - E[V_n])              (asymptotically N(0, 1))

The shipped test statistic is the half-spectrum shortcut

    V~_n = sum_{j < n/2} |S_j|^4 / sqrt(2 n^5) - sqrt(n/2)

which counts ``j = 0`` once and drops the Nyquist bin ``j = n/2``; it differs
from the full form by ``(|S_0|^4 - |S_{n/2}|^4) / sqrt(8 n^5)``. A consequence
is that a pure period-2 signal, whose power sits entirely in the Nyquist bin,
is invisible to it. Both forms are exposed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from vpstest.bitseq import BitSequence, PmSequence, to_pm1
from vpstest.dftt import TestOutcome
from vpstest.spectral import fourth_power_sums, power_spectrum
from vpstest.specialfns import normal_two_sided_pvalue

DELTA_ORACLE_MAX_N = 64
ENUMERATION_MAX_N = 22


@dataclass(frozen=True)
class VStatistic:
    v_n: float
    v_tilde: float
    n: int
    formula: str  # "canonical_half" or "full_spectrum"


def expected_v_n(n: int) -> Fraction:
    """Exact mean of V_n over uniformly random sequences.

    The quadruples contributing to the mean are a=b=c=d, a=b!=c=d, a=d!=b=c and,
    for even n only, a=c!=b=d with a-b = n/2; odd n therefore loses n of 2n^2.
    """
    return Fraction(1) if n % 2 == 0 else 1 - Fraction(1, n)


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, PmSequence) else np.asarray(x, dtype=np.float64)


def v_n_full(x: PmSequence) -> float:
    """Variance of the power spectrum over all n bins."""
    vals = _values(x)
    n = vals.size
    if n < 2:
        raise ValueError("need n >= 2")
    s4 = fourth_power_sums(power_spectrum(vals))[0]
    return s4 / float(n) ** 3 - 1.0


def v_n_full_batch(values: np.ndarray) -> np.ndarray:
    """Row-wise :func:`v_n_full` for a +/-1 matrix."""
    values = np.atleast_2d(values)
    n = values.shape[1]
    out = np.empty(values.shape[0])
    rows = max(1, (1 << 22) // n)
    for lo in range(0, values.shape[0], rows):
        out[lo : lo + rows] = fourth_power_sums(power_spectrum(values[lo : lo + rows])) / float(n) ** 3 - 1.0
    return out


def v_tilde_full(x: PmSequence) -> VStatistic:
    """Scaled statistic from the full spectrum, centered on the exact mean (any n >= 2)."""
    n = _values(x).size
    v = v_n_full(x)
    vt = math.sqrt(n / 8.0) * (v - float(expected_v_n(n)))
    return VStatistic(v, vt, n, "full_spectrum")


def v_tilde_from_half_spectra(mag2_half: np.ndarray, n: int) -> np.ndarray:
    """Batched half-spectrum statistic from rows of ``|S_j|^2, j < n/2``."""
    s4 = fourth_power_sums(mag2_half)
    nf = float(n)
    # centering subtracted last, after the compensated sum is scaled
    return s4 / math.sqrt(2.0 * nf**5) - math.sqrt(nf / 2.0)


def v_tilde_canonical(x: PmSequence) -> VStatistic:
    """The test statistic: half-spectrum sum of ``|S_j|^4``, scaled and centered."""
    vals = _values(x)
    n = vals.size
    if n < 4 or n % 2:
        raise ValueError(f"canonical statistic requires even n >= 4, got {n}")
    spec = np.fft.rfft(vals)
    mag2 = spec.real**2 + spec.imag**2  # bins 0 .. n/2
    half = mag2[: n // 2]
    vt = float(v_tilde_from_half_spectra(half, n)[0])
    # full sum recovered from the half by conjugate symmetry
    s4_full = math.fsum([2.0 * fourth_power_sums(half)[0], -mag2[0] ** 2, mag2[n // 2] ** 2])
    return VStatistic(s4_full / float(n) ** 3 - 1.0, vt, n, "canonical_half")


def vtest_pvalue(x: BitSequence) -> TestOutcome:
    stat = v_tilde_canonical(to_pm1(x))
    return TestOutcome(stat.v_tilde, float(normal_two_sided_pvalue(stat.v_tilde)), "proposed", x.n)


@functools.lru_cache(maxsize=8)
def delta_quadruples(n: int) -> np.ndarray:
    """All ``(a, b, c, d)`` in ``[0, n)^4`` with ``a - b + c - d`` in ``{0, n, -n}``."""
    r = np.arange(n)
    b, c, d = np.meshgrid(r, r, r, indexing="ij")
    out = []
    for a in range(n):
        s = a - b + c - d
        hit = (s == 0) | (s == n) | (s == -n)
        out.append(np.column_stack([np.full(hit.sum(), a), b[hit], c[hit], d[hit]]))
    return np.concatenate(out)


def v_n_delta_oracle_batch(x: np.ndarray) -> np.ndarray:
    """Rows of a +/-1 matrix -> V_n via the quadruple delta sum, in exact integers."""
    x = np.atleast_2d(np.asarray(x)).astype(np.int64)
    n = x.shape[1]
    if n > DELTA_ORACLE_MAX_N:
        raise ValueError(f"delta oracle limited to n <= {DELTA_ORACLE_MAX_N}, got {n}")
    q = delta_quadruples(n)
    total = np.zeros(x.shape[0], dtype=np.int64)
    for chunk in np.array_split(q, max(1, len(q) // 65536)):
        prod = x[:, chunk[:, 0]] * x[:, chunk[:, 1]] * x[:, chunk[:, 2]] * x[:, chunk[:, 3]]
        total += prod.sum(axis=1)
    return total / float(n * n) - 1.0


def v_n_delta_oracle(x: PmSequence) -> float:
    """V_n as ``(1/n^2) sum x_a x_b x_c x_d delta(a - b + c - d) - 1`` (n <= 64)."""
    return float(v_n_delta_oracle_batch(_values(x)[None, :])[0])


def _enumeration_tallies(n: int, kind: str) -> dict:
    """Exact distribution of the rational part of a statistic over all 2^n sequences.

    Uses sum_j |S_j|^4 = n * sum_tau C_tau^2 with C the cyclic autocorrelation,
    so everything is integer arithmetic. Sign flip x -> -x leaves every statistic
    unchanged, so only sequences with x_0 = +1 are enumerated.
    """
    if not 2 <= n <= ENUMERATION_MAX_N:
        raise ValueError(f"enumeration requires 2 <= n <= {ENUMERATION_MAX_N}, got {n}")
    total = 1 << (n - 1)
    shifts = np.arange(n - 1, dtype=np.int64)
    alt = np.where(np.arange(n) % 2 == 0, 1, -1).astype(np.int64)
    tallies: dict = {}
    for start in range(0, total, 1 << 18):
        idx = np.arange(start, min(total, start + (1 << 18)), dtype=np.int64)
        x = np.ones((idx.size, n), dtype=np.int64)
        x[:, 1:] = 2 * ((idx[:, None] >> shifts) & 1) - 1
        acf2 = np.zeros(idx.size, dtype=np.int64)
        for tau in range(n):
            c = np.einsum("ij,ij->i", x, np.roll(x, -tau, axis=1))
            acf2 += c * c
        if kind == "canonical":
            s0 = x.sum(axis=1)
            sh = x @ alt
            key = n * acf2 + s0**4 - sh**4  # = 2 * sum_{j<n/2} |S_j|^4
        else:
            key = acf2  # = (V_n + 1) * n^2
        vals, counts = np.unique(key, return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            tallies[v] = tallies.get(v, 0) + c
    return tallies


def v_n_moment_exact(n: int, m: int, central: bool = False) -> Fraction:
    """Exact ``E[V_n^m]`` (or ``E[(V_n - E V_n)^m]``) by enumerating all sequences."""
    tallies = _enumeration_tallies(n, "v_n")
    weight = sum(tallies.values())
    shift = expected_v_n(n) if central else Fraction(0)
    acc = sum(c * (Fraction(k, n * n) - 1 - shift) ** m for k, c in tallies.items())
    return acc / weight


def moment_oracle(n: int, m: int, kind: str = "v_tilde") -> float:
    """Exact moment ``E[stat^m]`` over all 2^n equiprobable +/-1 sequences.

    Args:
        n: sequence length, at most 22.
        m: moment order, 1..4.
        kind: ``"v_n"``, ``"v_n_central"``, ``"v_tilde"`` (full-spectrum scaled
            statistic, any n), or ``"v_tilde_canonical"`` (half-spectrum form,
            even n).
    """
    if not 1 <= m <= 4:
        raise ValueError("moment order must be in 1..4")
    if kind in ("v_n", "v_n_central"):
        return float(v_n_moment_exact(n, m, central=kind == "v_n_central"))
    if kind == "v_tilde":
        return (n / 8.0) ** (m / 2.0) * float(v_n_moment_exact(n, m, central=True))
    if kind == "v_tilde_canonical":
        if n % 2:
            raise ValueError("canonical statistic requires even n")
        tallies = _enumeration_tallies(n, "canonical")
        weight = sum(tallies.values())
        # V~ = sqrt(n/2) * (key / (2 n^3) - 1)
        acc = sum(c * (Fraction(k, 2 * n**3) - 1) ** m for k, c in tallies.items())
        return (n / 2.0) ** (m / 2.0) * float(acc / weight)
    raise ValueError(f"unknown statistic kind {kind!r}")
