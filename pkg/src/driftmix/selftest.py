"""Oracle-equivalence suite: structured hub roots against the dense eigensolver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .arc_model import ArcSystem
from .chain_matrix import build_pure_drift
from .dense_spectrum import dense_eigenvalues
from .seeding import make_rng, mix_seed
from .structured_spectrum import full_spectrum


def pairing_distance(a, b) -> float:
    """Largest distance under the optimal (min-cost) pairing of two equal-size multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"multiset sizes differ: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def random_small_system(seed: int, max_k: int = 5, max_length: int = 8) -> ArcSystem:
    rng = make_rng(seed)
    k = int(rng.integers(1, max_k + 1))
    return ArcSystem(rng.integers(1, max_length + 1, size=k).tolist())


@dataclass
class EquivalenceReport:
    instances: int
    tol: float
    worst: float = 0.0
    worst_lengths: tuple = ()
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        out = [f"{status} oracle equivalence: {self.instances} instances, worst pairing distance "
               f"{self.worst:.3e} at {list(self.worst_lengths)} (tol {self.tol:g}), {self.seconds:.1f} s"]
        out += [f"  mismatch {list(L)}: {d:.3e}" for L, d in self.failures[:10]]
        return out


def oracle_equivalence(instances: int = 1000, seed: int = 0, max_k: int = 5, max_length: int = 8,
                       tol: float = 1e-8) -> EquivalenceReport:
    rep = EquivalenceReport(instances, tol)
    t0 = time.perf_counter()
    for i in range(instances):
        arcs = random_small_system(mix_seed(seed, i), max_k, max_length)
        d = pairing_distance(full_spectrum(arcs).expanded(), dense_eigenvalues(build_pure_drift(arcs)))
        if d > rep.worst:
            rep.worst, rep.worst_lengths = d, arcs.lengths
        if not d <= tol:
            rep.failures.append((arcs.lengths, d))
    rep.seconds = time.perf_counter() - t0
    return rep
