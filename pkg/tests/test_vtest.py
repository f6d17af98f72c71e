import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_pm
from vpstest.bitseq import BitSequence, PmSequence
from vpstest.spectral import power_spectrum
from vpstest.specialfns import erfc
from vpstest.vtest import (
    delta_quadruples,
    expected_v_n,
    moment_oracle,
    v_n_delta_oracle,
    v_n_delta_oracle_batch,
    v_n_full,
    v_n_full_batch,
    v_n_moment_exact,
    v_tilde_canonical,
    v_tilde_from_half_spectra,
    v_tilde_full,
    vtest_pvalue,
)


def pm(*v):
    return PmSequence.from_values(v)


@pytest.mark.parametrize(
    "x, v",
    [((1, 1, 1, 1), 3.0), ((1, -1), 1.0), ((1, 1, -1, -1), 1.0)],
)
def test_v_n_examples(x, v):
    assert v_n_full(pm(*x)) == pytest.approx(v, abs=1e-12)
    assert v_n_delta_oracle(pm(*x)) == v


def test_delta_oracle_matches_full_random(rng):
    for _ in range(50):
        x = random_pm(rng, int(rng.integers(4, 33)))
        assert abs(v_n_delta_oracle(x) - v_n_full(x)) < 1e-9


def test_delta_oracle_matches_full_exhaustive_small():
    for n in range(2, 9):
        xs = np.array(list(itertools.product([-1.0, 1.0], repeat=n)))
        np.testing.assert_allclose(v_n_delta_oracle_batch(xs), v_n_full_batch(xs), atol=1e-9, rtol=0)


def test_delta_quadruples_count():
    # for each (a, b, c) exactly one d in [0, n) satisfies the constraint
    for n in (3, 4, 7):
        assert len(delta_quadruples(n)) == n**3


def test_delta_oracle_guard():
    with pytest.raises(ValueError):
        v_n_delta_oracle(PmSequence(np.ones(65)))


def test_v_n_lower_bound(rng):
    for n in (2, 3, 10, 101):
        assert v_n_full(random_pm(rng, n)) >= -1


def test_canonical_examples():
    assert v_tilde_canonical(pm(1, 1, 1, 1)).v_tilde == pytest.approx(256 / math.sqrt(2048) - math.sqrt(2), abs=1e-12)
    assert v_tilde_canonical(pm(1, 1, 1, 1)).v_tilde == pytest.approx(4.24264, abs=1e-5)
    # all power of the alternating sequence sits in the dropped Nyquist bin
    assert v_tilde_canonical(pm(1, -1, 1, -1)).v_tilde == pytest.approx(-math.sqrt(2), abs=1e-12)
    assert v_tilde_full(pm(1, -1, 1, -1)).v_tilde == pytest.approx(math.sqrt(4 / 8) * 2, abs=1e-12)


def test_canonical_zero_of_affine_map():
    # half sum of |S|^4 equal to n^3 centers the statistic exactly
    n = 4
    assert v_tilde_from_half_spectra(np.array([[0.0, 8.0]]), n)[0] == pytest.approx(0.0, abs=1e-15)
    assert v_tilde_canonical(pm(1, 1, -1, -1)).v_tilde == pytest.approx(0.0, abs=1e-12)


def test_canonical_reports_full_v_n(rng):
    for n in (4, 10, 256, 1000):
        x = random_pm(rng, n)
        s = v_tilde_canonical(x)
        assert s.formula == "canonical_half"
        assert s.v_n == pytest.approx(v_n_full(x), abs=1e-12)


def test_canonical_vs_full_difference(rng):
    # the two forms differ by (|S_0|^4 - |S_{n/2}|^4) / sqrt(8 n^5)
    for n in (16, 100, 1000):
        x = random_pm(rng, n)
        m2 = power_spectrum(x.values)
        diff = v_tilde_canonical(x).v_tilde - v_tilde_full(x).v_tilde
        assert diff == pytest.approx((m2[0] ** 2 - m2[n // 2] ** 2) / math.sqrt(8.0 * n**5), abs=1e-9)


def test_canonical_requires_even_n():
    with pytest.raises(ValueError):
        v_tilde_canonical(pm(1, 1, -1, 1, 1))
    with pytest.raises(ValueError):
        vtest_pvalue(BitSequence.from_bits([1, 0, 1, 1, 0]))


def test_vtest_pvalue_values():
    out = vtest_pvalue(BitSequence.from_bits([1, 1, 0, 0]))
    assert out.statistic == pytest.approx(0.0, abs=1e-12)
    assert out.pvalue == pytest.approx(1.0, abs=1e-12)
    assert out.variant == "proposed"
    assert erfc(1.414214 / math.sqrt(2)) == pytest.approx(0.157299, abs=1e-6)


def test_vtest_pvalue_is_erfc_of_statistic(rng):
    bits = BitSequence.from_bits(rng.integers(0, 2, size=10_000))
    out = vtest_pvalue(bits)
    assert out.pvalue == erfc(abs(out.statistic) / math.sqrt(2))


@pytest.mark.parametrize("n", [2, 4, 6])
def test_mean_even(n):
    assert v_n_moment_exact(n, 1) == 1
    assert moment_oracle(n, 1, "v_n") == 1.0


@pytest.mark.parametrize("n", [3, 5])
def test_mean_odd(n):
    # exact mean for odd n is 1 - 1/n (no a=c!=b=d quadruples contribute)
    assert v_n_moment_exact(n, 1) == 1 - Fraction(1, n)
    assert expected_v_n(n) == 1 - Fraction(1, n)


def test_odd_mean_by_brute_force_fft():
    for n in (3, 5, 7):
        xs = np.array(list(itertools.product([-1.0, 1.0], repeat=n)))
        assert v_n_full_batch(xs).mean() == pytest.approx(1 - 1 / n, abs=1e-12)


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
def test_scaled_statistic_is_centered(n):
    assert moment_oracle(n, 1, "v_tilde") == pytest.approx(0.0, abs=1e-12)
    assert moment_oracle(n, 1, "v_tilde_canonical") == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_full_statistic_centered_for_odd_n(n):
    assert moment_oracle(n, 1, "v_tilde") == pytest.approx(0.0, abs=1e-12)


def test_exact_means_up_to_enumeration_limit():
    for n in list(range(2, 17)) + [21, 22]:
        assert v_n_moment_exact(n, 1) == expected_v_n(n)


@pytest.mark.parametrize("kind", ["v_n", "v_tilde", "v_tilde_canonical"])
def test_enumeration_matches_fft_brute_force(kind):
    n = 8
    xs = np.array(list(itertools.product([-1.0, 1.0], repeat=n)))
    if kind == "v_n":
        vals = v_n_full_batch(xs)
    elif kind == "v_tilde":
        vals = math.sqrt(n / 8) * (v_n_full_batch(xs) - 1)
    else:
        vals = v_tilde_from_half_spectra(power_spectrum(xs, half=True), n)
    for m in (1, 2, 3, 4):
        assert moment_oracle(n, m, kind) == pytest.approx(np.mean(vals**m), rel=1e-10, abs=1e-12)


def test_exact_variance_approaches_8_over_n():
    ratios = [float(v_n_moment_exact(n, 2, central=True)) * n / 8 for n in (8, 12, 16, 20)]
    assert all(abs(r - 1) < 0.1 for r in ratios[1:])
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)


def test_moment_oracle_guards():
    with pytest.raises(ValueError):
        moment_oracle(23, 1)
    with pytest.raises(ValueError):
        moment_oracle(8, 5)
    with pytest.raises(ValueError):
        moment_oracle(7, 2, "v_tilde_canonical")


def _best_time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_cost_scales_like_n_log_n(rng):
    small = BitSequence.from_bits(rng.integers(0, 2, size=250_000))
    large = BitSequence.from_bits(rng.integers(0, 2, size=1_000_000))
    ratio = _best_time(lambda: vtest_pvalue(large)) / _best_time(lambda: vtest_pvalue(small))
    assert ratio < 5.0


def test_single_million_bit_evaluation_under_two_seconds(rng):
    bits = BitSequence.from_bits(rng.integers(0, 2, size=1_000_000))
    assert _best_time(lambda: vtest_pvalue(bits), repeats=1) < 2.0
