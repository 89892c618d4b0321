"""Random cycle-with-hubs graph models.

A graph is fully described by its arc lengths: the cycle is cut into ``k``
directed paths, arc ``i`` holding ``L_i`` nodes from its start ``a_i`` to its
end ``b_i``, and every arc end is joined to every arc start.

Two samplers are provided: ``sample_Bnk`` cuts ``k`` distinct edges of an
``n``-cycle, and ``sample_BLk`` draws independent geometric arc lengths with
mean ``L``.  Conditioning the latter (with ``L = n/k``) on a total of ``n``
nodes gives the former, which ``sample_Bnk_rejection`` implements directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .seeding import make_rng

__all__ = [
    "ArcSystem",
    "GeometricParams",
    "RejectionBudgetExceeded",
    "RejectionSample",
    "NodeCountProbability",
    "geometric_lengths",
    "sample_BLk",
    "sample_Bnk",
    "sample_Bnk_rejection",
    "prob_exact_node_count",
    "stirling_correction",
]


@dataclass(frozen=True)
class ArcSystem:
    """Arc lengths ``L_1..L_k`` in cycle order."""

    lengths: tuple[int, ...]

    def __init__(self, lengths: Sequence[int]):
        ls = tuple(int(x) for x in lengths)
        if not ls:
            raise ValueError("an arc system needs at least one arc")
        if min(ls) < 1:
            raise ValueError(f"arc lengths must be >= 1, got {ls}")
        object.__setattr__(self, "lengths", ls)

    @property
    def k(self) -> int:
        return len(self.lengths)

    @property
    def n(self) -> int:
        return sum(self.lengths)

    @property
    def max_length(self) -> int:
        return max(self.lengths)

    def starts(self) -> np.ndarray:
        """Node index of each arc start ``a_i`` (arcs laid out consecutively)."""
        return np.concatenate(([0], np.cumsum(self.lengths[:-1]))).astype(np.int64)

    def ends(self) -> np.ndarray:
        """Node index of each arc end ``b_i``."""
        return np.cumsum(self.lengths).astype(np.int64) - 1

    def sorted_lengths(self) -> tuple[int, ...]:
        return tuple(sorted(self.lengths))

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "lengths": list(self.lengths)}


@dataclass(frozen=True)
class GeometricParams:
    L: float
    k: int

    def __post_init__(self):
        if not (self.L >= 1.0) or not math.isfinite(self.L):
            raise ValueError(f"mean arc length L must be a finite value >= 1, got {self.L}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")


def geometric_lengths(rng: np.random.Generator, L: float, size) -> np.ndarray:
    """Geo(1/L) draws on {1, 2, ...} by inverse CDF."""
    if L == 1.0:
        return np.ones(size, dtype=np.int64)
    u = 1.0 - rng.random(size)  # in (0, 1]
    x = np.ceil(np.log(u) / math.log1p(-1.0 / L))
    return np.maximum(x, 1.0).astype(np.int64)


def sample_BLk(params: GeometricParams, seed: int) -> ArcSystem:
    """Draw ``k`` independent Geo(1/L) arc lengths."""
    rng = make_rng(seed)
    return ArcSystem(geometric_lengths(rng, params.L, params.k))


def _check_nk(n: int, k: int) -> None:
    if k < 1 or n < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if k > n:
        raise ValueError(f"cannot cut {k} distinct edges from a {n}-cycle")


def sample_Bnk(n: int, k: int, seed: int) -> ArcSystem:
    """Cut ``k`` distinct uniformly chosen edges of the ``n``-cycle.

    Edge ``e`` joins node ``e`` to node ``e+1 (mod n)``.  Arcs are listed in
    clockwise order starting after the lowest-numbered cut edge.
    """
    _check_nk(n, k)
    rng = make_rng(seed)
    cuts = np.sort(rng.choice(n, size=k, replace=False))
    gaps = np.diff(np.append(cuts, cuts[0] + n))
    return ArcSystem(gaps)


class RejectionSample(NamedTuple):
    arcs: ArcSystem
    attempts: int


class RejectionBudgetExceeded(RuntimeError):
    def __init__(self, n: int, k: int, attempts: int):
        super().__init__(f"no B({n}/{k}, {k}) draw with exactly {n} nodes in {attempts} attempts")
        self.attempts = attempts


def sample_Bnk_rejection(n: int, k: int, max_attempts: int, seed: int, batch: int = 256) -> RejectionSample:
    """Draw from ``B(n/k, k)`` until the node count is exactly ``n``.

    Attempts are generated in fixed-size batches from a single stream, so the
    accepted draw and the attempt count depend only on ``seed``.
    """
    _check_nk(n, k)
    if max_attempts < 1:
        raise ValueError("max_attempts must be positive")
    rng = make_rng(seed)
    L = n / k
    done = 0
    while done < max_attempts:
        b = min(batch, max_attempts - done)
        draws = geometric_lengths(rng, L, (b, k))
        hits = np.flatnonzero(draws.sum(axis=1) == n)
        if hits.size:
            i = int(hits[0])
            return RejectionSample(ArcSystem(draws[i]), done + i + 1)
        done += b
    raise RejectionBudgetExceeded(n, k, done)


def _stirlerr(m: int) -> float:
    """``log(m!) - [(m + 1/2) log m - m + log(2 pi)/2]`` for m >= 1."""
    if m <= 15:
        return math.lgamma(m + 1.0) - (m + 0.5) * math.log(m) + m - 0.5 * math.log(2.0 * math.pi)
    x = 1.0 / m
    x2 = x * x
    return x * (1 / 12 - x2 * (1 / 360 - x2 * (1 / 1260 - x2 * (1 / 1680 - x2 / 1188))))


def stirling_correction(n: int, k: int) -> float:
    """Log of the ratio between the exact node-count probability and its Stirling form."""
    _check_nk(n, k)
    if n == k:
        return 0.0
    return _stirlerr(n) - _stirlerr(k) - _stirlerr(n - k)


class NodeCountProbability(NamedTuple):
    exact: float
    asymptotic: float


def prob_exact_node_count(n: int, k: int) -> NodeCountProbability:
    """Probability that ``k`` Geo(k/n) lengths sum to exactly ``n``.

    The exact value ``C(n-1, k-1) k^k (n-k)^(n-k) / n^n`` is evaluated in log
    space.  Since the success probability equals ``k/n``, the binomial saddle
    point terms vanish and only Stirling remainders are left, which keeps the
    relative error near machine precision even for n in the tens of thousands.
    The second field is the leading-order approximation
    ``sqrt(k / (2 pi n (n-k)))`` (``inf`` when ``n == k``).
    """
    _check_nk(n, k)
    if n == k:
        return NodeCountProbability(1.0, math.inf)
    asym = math.sqrt(k / (2.0 * math.pi * n * (n - k)))
    return NodeCountProbability(asym * math.exp(stirling_correction(n, k)), asym)
