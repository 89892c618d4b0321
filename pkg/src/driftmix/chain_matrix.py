"""Sparse transition matrices for the pure-drift chain and its relatives.

Nodes are indexed arc by arc in sampled order, so arc ``i`` occupies the
contiguous block ``starts[i] .. ends[i]``.  Distributions are row vectors and
evolve as ``x -> x P``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .arc_model import ArcSystem

__all__ = [
    "DENSE_LIMIT",
    "TransitionMatrix",
    "build_pure_drift",
    "build_interpolated",
    "apply_distribution",
    "tv_distance_curve",
]

DENSE_LIMIT = 4000
_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Immutable row-stochastic operator in CSR form with sorted columns."""

    csr: sp.csr_array

    def __post_init__(self):
        m = sp.csr_array(self.csr)
        m.sum_duplicates()
        m.sort_indices()
        m.data.setflags(write=False)
        object.__setattr__(self, "csr", m)

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    def to_dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise ValueError(f"dense conversion limited to n <= {DENSE_LIMIT}, got n={self.n}")
        return self.csr.toarray()

    def transpose(self) -> "TransitionMatrix":
        return TransitionMatrix(self.csr.T.tocsr())

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.csr.sum(axis=1)).ravel()

    def col_sums(self) -> np.ndarray:
        return np.asarray(self.csr.sum(axis=0)).ravel()

    def diagonal(self) -> np.ndarray:
        return self.csr.diagonal()

    def row(self, i: int) -> dict[int, float]:
        lo, hi = self.csr.indptr[i], self.csr.indptr[i + 1]
        return dict(zip(self.csr.indices[lo:hi].tolist(), self.csr.data[lo:hi].tolist()))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        diff = (self.csr - self.csr.T).tocsr()
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol


def build_pure_drift(arcs: ArcSystem) -> TransitionMatrix:
    """Deterministic step along each arc; uniform ``1/k`` jump from every arc end to every arc start."""
    n, k = arcs.n, arcs.k
    starts, ends = arcs.starts(), arcs.ends()
    is_end = np.zeros(n, dtype=bool)
    is_end[ends] = True
    inner = np.flatnonzero(~is_end)

    rows = np.concatenate((inner, np.repeat(ends, k)))
    cols = np.concatenate((inner + 1, np.tile(starts, k)))
    vals = np.concatenate((np.ones(inner.size), np.full(k * k, 1.0 / k)))
    return TransitionMatrix(sp.csr_array((vals, (rows, cols)), shape=(n, n)))


def build_interpolated(P: TransitionMatrix, q: float) -> TransitionMatrix:
    """Blend ``q P + (1 - q) P^T`` for ``q`` in [1/2, 1]."""
    q = float(q)
    if not 0.5 <= q <= 1.0:
        raise ValueError(f"q must lie in [1/2, 1], got {q}")
    if q == 1.0:
        return P
    return TransitionMatrix(q * P.csr + (1.0 - q) * P.csr.T)


def apply_distribution(P: TransitionMatrix, dist) -> np.ndarray:
    """One step ``dist -> dist P`` of a probability row vector."""
    x = np.asarray(dist, dtype=float)
    if x.shape != (P.n,):
        raise ValueError(f"distribution has shape {x.shape}, expected ({P.n},)")
    if np.any(x < 0) or abs(x.sum() - 1.0) > _NORM_TOL:
        raise ValueError("input is not a probability vector (negative entries or sum != 1)")
    return P.csr.T @ x


def tv_distance_curve(P: TransitionMatrix, dist0, steps: int) -> list[float]:
    """Total-variation distance to the uniform law after 0..steps transitions."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = np.asarray(dist0, dtype=float)
    u = 1.0 / P.n
    PT = P.csr.T.tocsr()
    out = [0.5 * float(np.abs(x - u).sum())]
    for _ in range(steps):
        x = PT @ x
        out.append(0.5 * float(np.abs(x - u).sum()))
    return out
