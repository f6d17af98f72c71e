"""
Type-1 error of the three tests on the same MT19937 sequences.

A scaled-down version of the 1000 x 1000 experiment: 10 sets of 1000
sequences per length. The DFT tests' p-values are discrete and fail the
uniformity check at short lengths; the proposed test does not.
"""

from vpstest.harness import ExperimentConfig, run_batch

for n in (1000, 10_000):
    report = run_batch(ExperimentConfig(variants=("kim", "pareschi", "proposed"), n=n, M=1000, sets=10))
    print(f"--- n = {n}")
    print(report.summary_csv())
