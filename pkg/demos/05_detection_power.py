"""
Detection of a planted periodic defect (x_i = -1 at i = 0 mod 2T, +1 at i = T mod 2T).

Small sweep at n = 20 000; the proposed test keeps detecting at periods where
both DFT-test variants have already gone blind.
"""

from vpstest.harness import ExperimentConfig, detection_series, run_detection_sweep

cfg = ExperimentConfig(n=20_000, M=100, sets=10, periods=(10, 20, 40, 80, 160))
report = run_detection_sweep(cfg)
print("T      " + "  ".join(f"{t:>4d}" for t in cfg.periods))
for variant in cfg.variants:
    counts = [c for _, c in detection_series(report, variant, "total")]
    print(f"{variant:8s}" + "  ".join(f"{c:>4d}" for c in counts))
