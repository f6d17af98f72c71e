"""
The variance-of-power-spectrum statistic on a few hand-sized sequences.

Shows the fast and literal routes to V_n agreeing, the half-spectrum test
statistic next to the full-spectrum one, and the one sequence family the
half-spectrum form cannot see.
"""

import numpy as np

from vpstest import BitSequence, PmSequence, dft_power, dft_power_direct, to_pm1
from vpstest import v_n_delta_oracle, v_n_full, v_tilde_canonical, v_tilde_full, vtest_pvalue

x = PmSequence.from_values([1, 1, -1, -1])
print("|S_j|^2 fast  :", dft_power(x).mag2.round(12))
print("|S_j|^2 direct:", dft_power_direct(x).mag2.round(12))
print("V_n via FFT:", v_n_full(x), " via quadruple sum:", v_n_delta_oracle(x))

# a random 32-bit sequence: both routes to V_n agree to rounding
rng = np.random.default_rng(0)
y = PmSequence.from_values(rng.choice([-1, 1], size=32))
print("random n=32: |FFT - delta| =", abs(v_n_full(y) - v_n_delta_oracle(y)))

# The shipped statistic sums |S_j|^4 over j < n/2 only. An alternating
# sequence puts all of its power into j = n/2 and so looks "too flat".
alt = PmSequence.from_values([1, -1] * 8)
print("alternating n=16: half-spectrum V~ =", round(v_tilde_canonical(alt).v_tilde, 4),
      " full-spectrum V~ =", round(v_tilde_full(alt).v_tilde, 4))

# p-value of a single 100 000-bit sequence
bits = BitSequence.from_bits(rng.integers(0, 2, size=100_000))
out = vtest_pvalue(bits)
print(f"n=100000: V~ = {out.statistic:.4f}, p = {out.pvalue:.4f}")
