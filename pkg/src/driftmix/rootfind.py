"""Simultaneous polynomial root finding (Aberth-Ehrlich) with compensated Horner.

Polynomials are real, given by ascending coefficient arrays ``c[0..d]``.
Evaluation uses error-free transformations so that ``p(z)`` is obtained as
if computed in twice the working precision; this keeps clustered and double
roots accurate to about machine epsilon instead of its square root.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["RootFinderError", "comp_horner", "aberth", "merge_clusters"]

_SPLITTER = 134217729.0  # 2**27 + 1


class RootFinderError(RuntimeError):
    """Iteration cap reached; ``estimates`` holds the last iterates."""

    def __init__(self, message: str, estimates: np.ndarray):
        super().__init__(message)
        self.estimates = estimates


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True, inline="always")
def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


@njit(cache=True)
def _comp_horner(c, zr, zi):
    d = c.shape[0] - 1
    sr = c[d]
    si = 0.0
    er = 0.0
    ei = 0.0
    for j in range(d - 1, -1, -1):
        ah, al = _two_prod(sr, zr)
        bh, bl = _two_prod(si, zi)
        pr, e1 = _two_sum(ah, -bh)
        ch, cl = _two_prod(sr, zi)
        dh, dl = _two_prod(si, zr)
        pi, e2 = _two_sum(ch, dh)
        sr, e3 = _two_sum(pr, c[j])
        si = pi
        # error polynomial evaluated in plain arithmetic
        tr = er * zr - ei * zi + (e1 + al - bl + e3)
        ti = er * zi + ei * zr + (e2 + cl + dl)
        er = tr
        ei = ti
    return complex(sr + er, si + ei)


def comp_horner(coeffs, z) -> complex:
    """Compensated evaluation of ``sum_j coeffs[j] z**j``."""
    z = complex(z)
    return _comp_horner(np.ascontiguousarray(coeffs, dtype=np.float64), z.real, z.imag)


@njit(cache=True, nogil=True)
def _aberth_kernel(c, dc, z, tol, max_iter, bound):
    m = z.shape[0]
    conv = np.zeros(m, dtype=np.bool_)
    it = 0
    worst = np.inf
    while it < max_iter:
        it += 1
        worst = 0.0
        for i in range(m):
            if conv[i]:
                continue
            zi = z[i]
            pv = _comp_horner(c, zi.real, zi.imag)
            if pv == 0:
                conv[i] = True
                continue
            dv = _comp_horner(dc, zi.real, zi.imag)
            s = 0j
            for j in range(m):
                if j != i:
                    s += 1.0 / (zi - z[j])
            if dv == 0:
                w = pv  # stalled on a critical point; nudge by the residual
            else:
                ratio = pv / dv
                w = ratio / (1.0 - ratio * s)
                if not (abs(w) < np.inf):
                    w = ratio
            damped = False
            if not (abs(zi - w) <= bound):
                # the step leaves the root disk: halve it until it lands inside
                damped = True
                if not (abs(w) < np.inf):
                    w = zi
                for _ in range(60):
                    w *= 0.5
                    if abs(zi - w) <= bound:
                        break
                else:
                    # started outside the disk: project onto its rim
                    w = zi - (zi - w) * (bound / abs(zi - w))
            z[i] = zi - w
            aw = abs(w)
            if aw < tol and not damped:
                conv[i] = True
            if aw > worst:
                worst = aw
        if conv.all():
            return z, it, True
    return z, it, False


def root_bound(coeffs) -> float:
    """Fujiwara bound: every root of ``sum_j coeffs[j] z**j`` has modulus at most this."""
    c = np.asarray(coeffs, dtype=np.float64)
    d = c.shape[0] - 1
    ratios = np.abs(c[:d] / c[d])
    ratios[0] /= 2.0
    return 2.0 * float(max(ratios[d - j] ** (1.0 / j) for j in range(1, d + 1)))


def aberth(coeffs, *, radius: float = 0.9, offset: float = 0.5 / math.pi,
           tol: float = 1e-13, max_iter: int = 200, bound: float | None = None) -> tuple[np.ndarray, int]:
    """All roots of the real polynomial ``sum_j coeffs[j] z**j``.

    Starting points sit equally spaced on ``|z| = radius``, rotated by an
    irrational angle so that real or conjugate-symmetric configurations do
    not stall.  A root is frozen once its Aberth correction drops below
    ``tol``.  Steps that would leave the disk ``|z| <= bound`` are halved
    until they land inside it, which keeps the Horner sums from overflowing
    at high degree; ``bound`` defaults to the Fujiwara bound.  Returns
    ``(roots, iterations)``.
    """
    c = np.ascontiguousarray(coeffs, dtype=np.float64)
    d = c.shape[0] - 1
    while d > 0 and c[d] == 0:
        d -= 1
    c = c[: d + 1]
    if d == 0:
        return np.empty(0, dtype=np.complex128), 0
    dc = c[1:] * np.arange(1, d + 1, dtype=np.float64)
    if bound is None:
        bound = root_bound(c)
    angles = 2.0 * np.pi * (np.arange(d) + offset) / d
    z0 = min(radius, bound) * np.exp(1j * angles)
    z, it, ok = _aberth_kernel(c, dc, z0.astype(np.complex128), tol, max_iter, float(bound))
    if not ok:
        raise RootFinderError(f"Aberth iteration did not converge in {max_iter} sweeps (degree {d})", z)
    return z, it


def merge_clusters(values: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Single-linkage grouping of nearby values; each group becomes (mean, size)."""
    vals = np.asarray(values, dtype=np.complex128)
    n = vals.size
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if n > 1:
        dist = np.abs(vals[:, None] - vals[None, :])
        ii, jj = np.nonzero(np.triu(dist <= tol, 1))
        for a, b in zip(ii.tolist(), jj.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [(complex(vals[idx].mean()), len(idx)) for idx in groups.values()]
    out.sort(key=lambda t: (-abs(t[0]), -t[0].real, -t[0].imag))
    return out
