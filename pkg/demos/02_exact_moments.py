"""
Exact moments of V_n by enumerating every +/-1 sequence of small length.

The mean is 1 for even n and 1 - 1/n for odd n; n/8 * Var[V_n] tends to 1.
"""

from vpstest.vtest import moment_oracle, v_n_moment_exact

print(" n   E[V_n]      n/8*Var[V_n]   E[V~^4] (full form)")
for n in range(3, 19):
    mean = v_n_moment_exact(n, 1)
    var = v_n_moment_exact(n, 2, central=True)
    print(f"{n:2d}   {str(mean):9s}   {float(var) * n / 8:.5f}        {moment_oracle(n, 4):.4f}")
