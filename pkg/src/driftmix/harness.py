"""Seeded Monte Carlo studies: rate scans over n and blend sweeps over q."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .arc_model import sample_Bnk
from .chain_matrix import build_interpolated, build_pure_drift
from .dense_spectrum import _raw_eigenvalues
from .rootfind import RootFinderError
from .seeding import mix_seed
from .structured_spectrum import SpectrumError, full_spectrum, mixing_rate, rate_from_eigenvalues
from .theory_probe import RingSpec

__all__ = [
    "TrialRecord",
    "SweepRow",
    "SweepTable",
    "RateScanResult",
    "QSweepResult",
    "resolve_threads",
    "run_parallel",
    "log_spaced_grid",
    "q_grid",
    "structured_rate",
    "dense_rate",
    "summarize",
    "ratescan",
    "qsweep",
    "ring_check",
    "fit_loglog_slope",
]

_SOLVER_ERRORS = (SpectrumError, RootFinderError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    k: int
    q: float
    lam: float
    method: str
    residual: float
    wall_ms: float

    @property
    def failed(self) -> bool:
        return math.isnan(self.lam)


@dataclass(frozen=True)
class SweepRow:
    group: float
    attempted: int
    count: int
    mean: float
    std: float
    median: float
    p05: float
    p95: float

    @property
    def failed(self) -> int:
        return self.attempted - self.count


@dataclass(frozen=True)
class SweepTable:
    key: str
    trim: float
    rows: tuple[SweepRow, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def row(self, group: float) -> SweepRow:
        for r in self.rows:
            if r.group == group:
                return r
        raise KeyError(group)

    @property
    def attempted(self) -> int:
        return sum(r.attempted for r in self.rows)

    @property
    def failed(self) -> int:
        return sum(r.failed for r in self.rows)


def resolve_threads(threads: int | str | None) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    t = int(threads)
    if t < 1:
        raise ValueError("threads must be >= 1")
    return t


def run_parallel(fn: Callable, items: Iterable, threads: int | str | None = 1) -> list:
    """``[fn(x) for x in items]`` on a thread pool; output order follows input order."""
    items = list(items)
    t = resolve_threads(threads)
    if t == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=t) as pool:
        return list(pool.map(fn, items))


def log_spaced_grid(lo: int, hi: int, points: int) -> list[int]:
    """Integers ``round(lo * (hi/lo)**(i/(points-1)))``, endpoints exact."""
    if points < 2:
        return [int(lo)]
    return [int(round(lo * (hi / lo) ** (i / (points - 1)))) for i in range(points)]


def q_grid(step: float = 0.025) -> list[float]:
    """Blend values ``1/2, 1/2 + step, ..., 1`` (``step`` must divide 1/2)."""
    count = round(0.5 / step)
    if not math.isclose(count * step, 0.5, rel_tol=0, abs_tol=1e-12):
        raise ValueError(f"step {step} does not divide 1/2")
    return [0.5 + i * 0.5 / count for i in range(count + 1)]


def structured_rate(arcs) -> tuple[float, float]:
    """Mixing rate and worst root residual of the pure-drift chain."""
    spec = full_spectrum(arcs)
    return mixing_rate(spec), spec.residual


def dense_rate(P) -> tuple[float, float]:
    """Mixing rate from the dense route; the residual is the distance of the unit eigenvalue from 1."""
    vals = _raw_eigenvalues(P)
    return rate_from_eigenvalues(vals), float(np.abs(vals - 1.0).min())


def _timed(fn, *args):
    t0 = time.perf_counter()
    try:
        lam, res = fn(*args)
    except _SOLVER_ERRORS:
        lam = res = math.nan
    return lam, res, (time.perf_counter() - t0) * 1e3


def summarize(records: Sequence[TrialRecord], key: str, trim: float) -> SweepTable:
    """Per-group trimmed statistics of ``lam``.

    Failed trials are counted in ``attempted`` but excluded from every
    statistic.  ``floor(trim * count)`` values are dropped from each tail
    before taking the mean and the sample standard deviation; median and
    the 5th/95th percentiles use all successful trials.
    """
    if not 0 <= trim < 0.5:
        raise ValueError("trim must lie in [0, 1/2)")
    groups: dict[float, list[float]] = {}
    for r in records:
        groups.setdefault(getattr(r, key), []).append(r.lam)
    rows = []
    for g in sorted(groups):
        vals = np.array(groups[g], dtype=float)
        ok = np.sort(vals[~np.isnan(vals)])
        if ok.size == 0:
            rows.append(SweepRow(g, vals.size, 0, *([math.nan] * 5)))
            continue
        cut = int(math.floor(trim * ok.size))
        kept = ok[cut: ok.size - cut] if cut else ok
        std = float(kept.std(ddof=1)) if kept.size > 1 else 0.0
        p05, med, p95 = np.percentile(ok, [5, 50, 95])
        rows.append(SweepRow(g, vals.size, ok.size, float(kept.mean()), std, float(med), float(p05), float(p95)))
    return SweepTable(key, trim, tuple(rows))


@dataclass
class RateScanResult:
    records: list[TrialRecord]
    nonreversible: SweepTable
    reversible: SweepTable
    ring_violations: dict[int, tuple[int, int]] = field(default_factory=dict)

    def violation_frequency(self, n: int) -> float:
        hits, total = self.ring_violations[n]
        return hits / total if total else math.nan


def ratescan(n_grid: Sequence[int], sigma: float = 0.5, trials_per_n: int = 2000, trim: float = 0.05,
             gamma: float = 4.1, seed: int = 0, threads: int | str = 1, timing: bool = True,
             reversible: bool = True) -> RateScanResult:
    """Pure-drift vs reversible mixing rates on ``B_n(floor(n**sigma))`` for each ``n``.

    Trial ``i`` at size ``n`` uses the graph seed ``mix_seed(seed, n, i)``;
    both chains are evaluated on the same graph.  A ring violation is a
    pure-drift rate at most ``1/(L log(k)**gamma)`` with ``L = n/k``.
    """
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    sizes = {}
    for n in n_grid:
        k = int(math.floor(n ** sigma + 1e-9))
        if k < 2:
            raise ValueError(f"k = floor({n}**{sigma}) = {k} < 2")
        sizes[int(n)] = k
    widths = {n: RingSpec(gamma, n / k, k).width for n, k in sizes.items()}
    jobs = [(n, k, i) for n, k in sizes.items() for i in range(trials_per_n)]

    def one(job):
        n, k, i = job
        s = mix_seed(seed, n, i)
        arcs = sample_Bnk(n, k, s)
        out = []
        lam, res, ms = _timed(structured_rate, arcs)
        out.append(TrialRecord(s, n, k, 1.0, lam, "structured", res, ms if timing else 0.0))
        if reversible:
            P = build_interpolated(build_pure_drift(arcs), 0.5)
            lam, res, ms = _timed(dense_rate, P)
            out.append(TrialRecord(s, n, k, 0.5, lam, "dense", res, ms if timing else 0.0))
        return out

    records = [r for batch in run_parallel(one, jobs, threads) for r in batch]
    nonrev = [r for r in records if r.q == 1.0]
    ring = {}
    for n, width in widths.items():
        rs = [r for r in nonrev if r.n == n and not r.failed]
        ring[n] = (sum(r.lam <= width for r in rs), len(rs))
    return RateScanResult(
        records,
        summarize(nonrev, "n", trim),
        summarize([r for r in records if r.q == 0.5], "n", trim),
        ring,
    )


@dataclass
class QSweepResult:
    records: list[TrialRecord]
    table: SweepTable


def qsweep(n: int, k: int, qs: Sequence[float], trials: int = 500, trim: float = 0.05, seed: int = 0,
           threads: int | str = 1, timing: bool = True, structured_at_one: bool = True) -> QSweepResult:
    """Mixing rate of ``q P + (1-q) P^T`` for every ``q`` on the same ``B_n(k)`` graph per trial."""
    qs = [float(q) for q in qs]
    for q in qs:
        if not 0.5 <= q <= 1.0:
            raise ValueError(f"q = {q} outside [1/2, 1]")

    def one(i):
        s = mix_seed(seed, n, k, i)
        arcs = sample_Bnk(n, k, s)
        P = build_pure_drift(arcs)
        out = []
        for q in qs:
            if q == 1.0 and structured_at_one:
                lam, res, ms = _timed(structured_rate, arcs)
                method = "structured"
            else:
                lam, res, ms = _timed(dense_rate, build_interpolated(P, q))
                method = "dense"
            out.append(TrialRecord(s, n, k, q, lam, method, res, ms if timing else 0.0))
        return out

    records = [r for batch in run_parallel(one, range(trials), threads) for r in batch]
    return QSweepResult(records, summarize(records, "q", trim))


def ring_check(n_grid: Sequence[int], sigma: float = 0.5, trials: int = 1000, gamma: float = 4.1,
               seed: int = 0, threads: int | str = 1) -> dict[int, dict]:
    """Ring-violation statistics of the pure-drift chain on ``B_n(floor(n**sigma))``."""
    res = ratescan(n_grid, sigma, trials, 0.0, gamma, seed, threads, timing=False, reversible=False)
    out = {}
    for n, (hits, total) in res.ring_violations.items():
        k = int(math.floor(n ** sigma + 1e-9))
        ring = RingSpec(gamma, n / k, k)
        lams = np.array([r.lam for r in res.records if r.n == n and not r.failed])
        out[n] = {
            "n": n,
            "k": k,
            "trials": total,
            "failed": trials - total,
            "violations": hits,
            "frequency": hits / total if total else math.nan,
            "ring_width": ring.width,
            "fraction_rate_above_width": float(np.mean(lams > ring.width)) if lams.size else math.nan,
        }
    return out


def fit_loglog_slope(table: SweepTable) -> tuple[float, float, float]:
    """Least-squares line through ``(log group, log median)``: (slope, intercept, r^2)."""
    x = table.column("group")
    y = table.column("median")
    if x.size < 3:
        raise ValueError("need at least 3 groups")
    if not np.all(y > 0) or not np.all(x > 0):
        raise ValueError("groups and medians must be positive for a log-log fit")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(((ly - fitted) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
