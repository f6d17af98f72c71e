"""Experiment orchestration: Type-1-error batches, detection sweeps, empirical CDFs.

Every sequence is identified by its global index ``set_id * M + i`` and drawn
from the configured source at that index, so a run is fully determined by its
configuration regardless of the number of worker processes. All variants of a
run are evaluated on the same spectra of the same sequences.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from vpstest.dftt import VARIANTS, dftt_from_half_spectra
from vpstest.generators import GeneratorSpec, PeriodicDefect
from vpstest.secondlevel import meta_uniformity, second_level
from vpstest.spectral import power_spectrum
from vpstest.specialfns import erfc, normal_two_sided_pvalue
from vpstest.vtest import v_tilde_from_half_spectra

log = logging.getLogger(__name__)

ALL_VARIANTS = ("original", "kim", "pareschi", "proposed")
ROW_FIELDS = ("set_id", "variant", "n", "M", "r", "proportion_pass", "chi2", "p_uniform", "uniformity_pass")

# float64 elements per processing chunk; bounds peak memory to a few hundred MB
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ExperimentConfig:
    variants: tuple = ("kim", "pareschi", "proposed")
    n: int = 10_000
    M: int = 1000
    sets: int = 20
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    periods: tuple = ()
    workers: int = 1
    debug: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        object.__setattr__(self, "periods", tuple(int(t) for t in self.periods))
        unknown = set(self.variants) - set(ALL_VARIANTS)
        if unknown or not self.variants:
            raise ValueError(f"variants must be a non-empty subset of {ALL_VARIANTS}, got {self.variants}")
        if self.n < 4 or self.n % 2:
            raise ValueError(f"n must be even and >= 4, got {self.n}")
        if self.M < 1 or self.sets < 1:
            raise ValueError("M and sets must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for t in self.periods:
            PeriodicDefect(t)
            if 2 * t > self.n:
                raise ValueError(f"period 2T={2 * t} exceeds n={self.n}")

    @property
    def base_seed(self) -> int:
        return self.generator.seed

    def as_dict(self) -> dict:
        d = asdict(self)
        d["variants"] = list(self.variants)
        d["periods"] = list(self.periods)
        gen = d["generator"]
        gen["key"] = self.generator.key.hex()
        d.pop("workers")  # scheduling never changes results
        return d


def evaluate_sequences(bits: np.ndarray, variants, period: Optional[int] = None) -> dict:
    """P-values of every variant for rows of a 0/1 bit matrix.

    Each row's spectrum is computed once and shared by all variants.
    """
    n = bits.shape[1]
    out = {v: np.empty(bits.shape[0]) for v in variants}
    rows = max(1, _CHUNK_ELEMENTS // n)
    for lo in range(0, bits.shape[0], rows):
        x = 2.0 * bits[lo : lo + rows] - 1.0
        if period is not None:
            PeriodicDefect(period).apply(x)
        mag2 = power_spectrum(x, half=True)
        for v in variants:
            if v == "proposed":
                p = normal_two_sided_pvalue(v_tilde_from_half_spectra(mag2, n))
            else:
                p = dftt_from_half_spectra(mag2, n, VARIANTS[v])[1]
            out[v][lo : lo + rows] = p
    return out


def _sequence_hashes(bits: np.ndarray) -> list:
    return [hashlib.sha256(np.packbits(row).tobytes()).hexdigest()[:16] for row in bits]


def _run_set(args):
    config, set_id, period = args
    bits = config.generator.sequences(set_id * config.M, config.M, config.n)
    pvals = evaluate_sequences(bits, config.variants, period)
    hashes = _sequence_hashes(bits) if config.debug else None
    return set_id, period, pvals, hashes


def _map_sets(config: ExperimentConfig, units):
    if config.workers == 1 or len(units) == 1:
        return [_run_set(u) for u in units]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        # map preserves submission order, so aggregation order is fixed
        return list(pool.map(_run_set, units))


@dataclass
class ExperimentReport:
    """Per-set second-level rows plus per-(period, variant) summaries."""

    config: dict
    rows: list
    summary: list
    sequence_rows: Optional[list] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = (("T",) if self.config["periods"] else ()) + ROW_FIELDS
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        fields = list(self.summary[0])
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.summary)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"config": self.config, "rows": self.rows, "summary": self.summary}
        if self.sequence_rows is not None:
            doc["sequences"] = self.sequence_rows
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, path: str, fmt: str = "csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", newline="") as fh:
            fh.write(text)

    def select(self, variant: str, T: Optional[int] = None) -> dict:
        for s in self.summary:
            if s["variant"] == variant and s.get("T") == T:
                return s
        raise KeyError((variant, T))


def _summarize(config: ExperimentConfig, results) -> ExperimentReport:
    rows, summary, seq_rows = [], [], [] if config.debug else None
    periods = config.periods or (None,)
    for period in periods:
        per_variant = {v: {"pvals": [], "reports": []} for v in config.variants}
        for set_id, t, pvals, hashes in results:
            if t != period:
                continue
            for v in config.variants:
                rep = second_level(pvals[v])
                per_variant[v]["pvals"].append(pvals[v])
                per_variant[v]["reports"].append(rep)
                row = {"set_id": set_id, "variant": v, "n": config.n, "M": config.M, "r": rep.r,
                       "proportion_pass": rep.proportion_pass, "chi2": rep.chi2_stat,
                       "p_uniform": rep.p_uniform, "uniformity_pass": rep.uniformity_pass}
                if period is not None:
                    row = {"T": period, **row}
                rows.append(row)
            if seq_rows is not None:
                for i, h in enumerate(hashes):
                    entry = {"set_id": set_id, "index": i, "sha256": h}
                    if period is not None:
                        entry["T"] = period
                    entry.update({f"p_{v}": float(pvals[v][i]) for v in config.variants})
                    seq_rows.append(entry)
        for v in config.variants:
            reps = per_variant[v]["reports"]
            allp = np.concatenate(per_variant[v]["pvals"])
            prop = sum(not r.proportion_pass for r in reps)
            unif = sum(not r.uniformity_pass for r in reps)
            both = sum((not r.proportion_pass) and (not r.uniformity_pass) for r in reps)
            entry = {
                "variant": v,
                "n": config.n,
                "sequences": int(allp.size),
                "p_below_0.01": int(np.count_nonzero(allp < 0.01)),
                "fraction_below_0.01": float(np.count_nonzero(allp < 0.01) / allp.size),
                "sets": len(reps),
                "proportion_rejections": prop,
                "uniformity_rejections": unif,
                "total_rejections": prop + unif - both,
                "meta_uniformity": meta_uniformity([r.p_uniform for r in reps]) if len(reps) >= 10 else None,
            }
            if period is not None:
                entry = {"T": period, **entry}
            summary.append(entry)
    return ExperimentReport(config.as_dict(), rows, summary, seq_rows)


def run_batch(config: ExperimentConfig) -> ExperimentReport:
    """Type-1-error experiment: all variants on the same ``sets x M`` sequences."""
    if config.periods:
        config = replace(config, periods=())
    log.info("exp1: %d sets x %d sequences, n=%d, %s", config.sets, config.M, config.n, config.variants)
    results = _map_sets(config, [(config, s, None) for s in range(config.sets)])
    return _summarize(config, results)


def run_detection_sweep(config: ExperimentConfig) -> ExperimentReport:
    """Detection counts per period parameter T.

    The same base sequences are used for every T, and the defect is written
    into every sequence before testing.
    """
    if not config.periods:
        raise ValueError("detection sweep needs at least one period T")
    units = [(config, s, t) for t in config.periods for s in range(config.sets)]
    log.info("exp2: T in %s, %d sets x %d sequences, n=%d", config.periods, config.sets, config.M, config.n)
    return _summarize(config, _map_sets(config, units))


def detection_series(report: ExperimentReport, variant: str, criterion: str = "total") -> list:
    """``[(T, count)]`` for criterion ``proportion``, ``uniformity`` or ``total``."""
    key = f"{criterion}_rejections"
    return [(s["T"], s[key]) for s in report.summary if s["variant"] == variant]


def normal_cdf(x):
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def ks_distance(samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and N(0, 1)."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    m = s.size
    f = normal_cdf(s)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


@dataclass
class CdfTable:
    v_tilde: np.ndarray
    empirical: np.ndarray
    normal: np.ndarray
    ks: float

    def to_csv(self) -> str:
        lines = ["v_tilde,empirical_cdf,normal_cdf"]
        lines += [f"{v!r},{e!r},{f!r}" for v, e, f in zip(self.v_tilde.tolist(), self.empirical.tolist(), self.normal.tolist())]
        return "\n".join(lines) + "\n"


def v_tilde_samples(n: int, samples: int, generator: GeneratorSpec = GeneratorSpec()) -> np.ndarray:
    """Half-spectrum statistic for sequences ``0 .. samples - 1`` of the source."""
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and >= 4, got {n}")
    out = np.empty(samples)
    rows = max(1, _CHUNK_ELEMENTS // n)
    for lo in range(0, samples, rows):
        cnt = min(rows, samples - lo)
        x = 2.0 * generator.sequences(lo, cnt, n) - 1.0
        out[lo : lo + cnt] = v_tilde_from_half_spectra(power_spectrum(x, half=True), n)
    return out


def empirical_cdf(n: int, samples: int, generator: GeneratorSpec = GeneratorSpec()) -> CdfTable:
    """Sorted statistic values with empirical and standard-normal CDF columns."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if samples < 100:
        log.warning("empirical CDF from only %d samples", samples)
    v = np.sort(v_tilde_samples(n, samples, generator))
    emp = np.arange(1, samples + 1) / samples
    return CdfTable(v, emp, normal_cdf(v), ks_distance(v))
