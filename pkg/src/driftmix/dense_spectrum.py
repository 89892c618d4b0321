"""Dense eigenvalues for arbitrary (small) transition matrices.

Nonsymmetric matrices go through LAPACK ``geev`` (balancing, Householder
Hessenberg reduction, Francis double-shift QR); exactly symmetric ones go
through ``syevr`` (tridiagonalization plus symmetric QR/RRR).

Backward-stable QR cannot resolve defective eigenvalues: a Jordan block of
size ``s`` comes back as a ring of radius about ``eps**(1/s)`` (1e-3 for
s = 8).  The ring's centroid, however, is well conditioned.  ``refine``
therefore groups computed eigenvalues into numerical-multiplicity clusters
and replaces each cluster by its mean.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg as sla

from .chain_matrix import DENSE_LIMIT, TransitionMatrix
from .structured_spectrum import Spectrum, SpectrumError, rate_from_eigenvalues

__all__ = [
    "SYMMETRY_TOL",
    "DenseSolverError",
    "dense_eigenvalues",
    "dense_spectrum",
    "refine_clusters",
    "mixing_rate_general",
]

SYMMETRY_TOL = 1e-14


class DenseSolverError(SpectrumError):
    pass


def _linkage_components(vals: np.ndarray, tau: float) -> list[np.ndarray]:
    n = vals.size
    adj = np.abs(vals[:, None] - vals[None, :]) <= tau
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        members = []
        while stack:
            a = stack.pop()
            members.append(a)
            for b in np.flatnonzero(adj[a] & ~seen):
                seen[b] = True
                stack.append(int(b))
        comps.append(np.array(sorted(members)))
    return comps


def refine_clusters(values, *, link: float = 0.05, eta: float = 1e-12,
                    min_link: float = 1e-13) -> list[tuple[complex, int]]:
    """Group eigenvalues into clusters and return (centroid, size) pairs.

    A single-linkage component of size ``s`` with centroid ``c`` is accepted
    when ``max |v - c| ** s <= eta``, i.e. when its spread is what a
    perturbation of size ``eta`` of an ``s``-fold eigenvalue would produce.
    Rejected components are re-linked with a 4x smaller threshold.  The
    scheme assumes distinct eigenvalues are separated by more than the
    cluster spread; it is meant for the small exactly structured matrices
    used in oracle comparisons.
    """
    vals = np.asarray(values, dtype=np.complex128)
    out: list[tuple[complex, int]] = []
    log_eta = math.log(eta)

    def visit(idx: np.ndarray, tau: float) -> None:
        for comp in _linkage_components(vals[idx], tau):
            members = idx[comp]
            if members.size == 1:
                out.append((complex(vals[members[0]]), 1))
                continue
            c = vals[members].mean()
            r = float(np.abs(vals[members] - c).max())
            if r == 0.0 or members.size * math.log(r) <= log_eta:
                out.append((complex(c), int(members.size)))
            elif tau / 4 >= min_link:
                visit(members, tau / 4)
            else:
                out.extend((complex(vals[m]), 1) for m in members)

    if vals.size:
        visit(np.arange(vals.size), link)
    out.sort(key=lambda t: (-abs(t[0]), -t[0].real, -t[0].imag))
    return out


def _raw_eigenvalues(P) -> np.ndarray:
    A = P.to_dense() if isinstance(P, TransitionMatrix) else np.array(P, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > DENSE_LIMIT:
        raise ValueError(f"dense eigensolver limited to n <= {DENSE_LIMIT}, got {n}")
    try:
        if np.max(np.abs(A - A.T), initial=0.0) <= SYMMETRY_TOL:
            return sla.eigvalsh(A, overwrite_a=True, check_finite=False).astype(np.complex128)
        return sla.eigvals(A, overwrite_a=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise DenseSolverError(f"dense eigensolver failed for n={n}: {exc}") from exc


def dense_spectrum(P, *, refine: bool = True) -> Spectrum:
    """All eigenvalues with multiplicities from the dense route."""
    raw = _raw_eigenvalues(P)
    if refine:
        eig = refine_clusters(raw)
    else:
        eig = [(complex(v), 1) for v in raw]
    return Spectrum(tuple(eig), "dense")


def dense_eigenvalues(P, *, refine: bool = True) -> np.ndarray:
    """All ``n`` eigenvalues (with repetition) of a dense-sized matrix."""
    if not refine:
        return _raw_eigenvalues(P)
    return dense_spectrum(P, refine=True).expanded()


def mixing_rate_general(P) -> float:
    """Mixing rate of any stochastic matrix; the discarded eigenvalue must sit within 1e-8 of 1."""
    return rate_from_eigenvalues(_raw_eigenvalues(P))
