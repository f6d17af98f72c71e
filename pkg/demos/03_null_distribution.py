"""
How close is the scaled statistic to N(0, 1) for MT19937 input?

Writes cdf_n100.csv and cdf_n10000.csv (sorted V~, empirical CDF, normal CDF)
for plotting and prints the Kolmogorov-Smirnov distance of each.
"""

import numpy as np

from vpstest.generators import GeneratorSpec
from vpstest.harness import empirical_cdf

mt = GeneratorSpec("mt19937", seed=0)
for n in (100, 10_000):
    table = empirical_cdf(n, 5000, mt)
    with open(f"cdf_n{n}.csv", "w") as fh:
        fh.write(table.to_csv())
    v = table.v_tilde
    print(f"n={n:6d}  KS={table.ks:.4f}  mean={v.mean():+.3f}  E[V~^2]={np.mean(v**2):.3f}  "
          f"E[V~^3]={np.mean(v**3):+.3f}  E[V~^4]={np.mean(v**4):.3f}")
