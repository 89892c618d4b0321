"""Pure-drift spectrum from the hub polynomial.

A nonzero ``mu`` is an eigenvalue of the pure-drift chain exactly when
``sum_i mu**(-L_i) = k``.  Multiplying through by ``z**M`` (``M = max L_i``)
gives the integer polynomial

    p(z) = sum_i z**(M - L_i) - k z**M,

which always vanishes at ``z = 1``.  After dividing out ``(z - 1)`` the
remaining ``M - 1`` roots are found simultaneously; the zero eigenvalue
carries the leftover multiplicity ``n - M``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .arc_model import ArcSystem
from .rootfind import RootFinderError, aberth, comp_horner, merge_clusters

__all__ = [
    "RESIDUAL_TOL",
    "MERGE_TOL",
    "UNIT_TOL",
    "SpectrumError",
    "HubPolynomial",
    "Spectrum",
    "eval_q",
    "char_polynomial",
    "nonzero_eigenvalues",
    "full_spectrum",
    "mixing_rate",
    "rate_from_eigenvalues",
]

RESIDUAL_TOL = 1e-10
MERGE_TOL = 1e-8
UNIT_TOL = 1e-8
DISK_BOUND = 1.0 + 1e-6


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class HubPolynomial:
    """``p(z) = sum_j coeffs[j] z**j`` with integer coefficients.

    ``terms`` maps each exponent ``M - L_i`` to how many arcs produce it.
    """

    coeffs: tuple[int, ...]
    terms: tuple[tuple[int, int], ...]
    k: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.float64)

    def deflated(self) -> tuple[int, ...]:
        """Exact quotient ``p(z) / (z - 1)``; coefficients are partial sums of ``p``'s."""
        c = self.coeffs
        d = [0] * (len(c) - 1)
        acc = 0
        for j in range(len(c) - 1, 0, -1):
            acc += c[j]
            d[j - 1] = acc
        if acc + c[0] != 0:
            raise AssertionError("hub polynomial does not vanish at 1")
        return tuple(d)

    def __call__(self, z) -> complex:
        return comp_horner(self.as_array(), z)

    def relative_residual(self, z) -> float:
        """``|p(z)| / sum_j |c_j| |z|**j``."""
        z = complex(z)
        scale = comp_horner(np.abs(self.as_array()), abs(z)).real
        return abs(self(z)) / scale if scale > 0 else abs(self(z))


def _ipow(w: complex, e: int) -> complex:
    result = 1.0 + 0j
    while e:
        if e & 1:
            result *= w
        w *= w
        e >>= 1
    return result


def eval_q(arcs: ArcSystem, z) -> complex:
    """``sum_i z**(-L_i)``; poles at ``z = 0``."""
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("q(z) has a pole at z = 0")
    w = 1.0 / z
    return sum(_ipow(w, L) for L in arcs.lengths)


def char_polynomial(arcs: ArcSystem) -> HubPolynomial:
    M = arcs.max_length
    coeffs = [0] * (M + 1)
    counts: dict[int, int] = {}
    for L in arcs.lengths:
        coeffs[M - L] += 1
        counts[M - L] = counts.get(M - L, 0) + 1
    coeffs[M] -= arcs.k
    return HubPolynomial(tuple(coeffs), tuple(sorted(counts.items())), arcs.k)


def _hub_roots(arcs: ArcSystem) -> tuple[list[tuple[complex, int]], float]:
    poly = char_polynomial(arcs)
    deflated = np.array(poly.deflated(), dtype=np.float64)
    # |q(z)| < k whenever |z| > 1, so every root lies in the closed unit disk
    roots, _ = aberth(deflated, bound=DISK_BOUND)
    worst = 0.0
    for z in roots:
        r = poly.relative_residual(z)
        if not r <= RESIDUAL_TOL:
            raise SpectrumError(f"root {z} of the hub polynomial has relative residual {r:.3e}")
        worst = max(worst, r)
    return merge_clusters(np.append(roots, 1.0 + 0j), MERGE_TOL), worst


def nonzero_eigenvalues(arcs: ArcSystem) -> list[tuple[complex, int]]:
    """Roots of the hub polynomial, merged into (value, multiplicity) pairs.

    Raises ``RootFinderError`` if the iteration stalls and ``SpectrumError``
    if a converged root fails the relative residual check.
    """
    return _hub_roots(arcs)[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with algebraic multiplicities."""

    eigenvalues: tuple[tuple[complex, int], ...]
    method: str
    residual: float = float("nan")
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple((complex(v), int(m)) for v, m in self.eigenvalues))
        object.__setattr__(self, "n", sum(m for _, m in self.eigenvalues))

    @cached_property
    def mixing_rate(self) -> float:
        return mixing_rate(self)

    def expanded(self) -> np.ndarray:
        """Flat array with each eigenvalue repeated by its multiplicity."""
        return np.array([v for v, m in self.eigenvalues for _ in range(m)], dtype=np.complex128)

    def trace(self) -> complex:
        return sum(v * m for v, m in self.eigenvalues)


def full_spectrum(arcs: ArcSystem) -> Spectrum:
    """Hub-polynomial roots plus the zero eigenvalue with multiplicity ``n - max L_i``.

    ``residual`` is the worst relative residual among the computed roots.
    """
    eig, worst = _hub_roots(arcs)
    zeros = arcs.n - arcs.max_length
    if zeros:
        eig.append((0j, zeros))
    return Spectrum(tuple(eig), "structured", worst)


def rate_from_eigenvalues(values, unit_tol: float = UNIT_TOL) -> float:
    """``min(1 - |mu|)`` after removing one copy of the eigenvalue nearest 1."""
    vals = np.asarray(values, dtype=np.complex128)
    if vals.size == 0:
        raise SpectrumError("empty spectrum")
    i = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[i] - 1.0) > unit_tol:
        raise SpectrumError(f"no eigenvalue within {unit_tol:g} of 1 (closest: {vals[i]})")
    rest = np.delete(vals, i)
    if rest.size == 0:
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - np.abs(rest).max())))


def mixing_rate(spec: Spectrum) -> float:
    """Spectral mixing rate ``min{1 - |mu| : mu != 1}``, clamped to [0, 1]."""
    vals = [v for v, _ in spec.eigenvalues]
    mult = [m for _, m in spec.eigenvalues]
    i = int(np.argmin([abs(v - 1.0) for v in vals]))
    if abs(vals[i] - 1.0) > UNIT_TOL:
        raise SpectrumError(f"no eigenvalue within {UNIT_TOL:g} of 1 (closest: {vals[i]})")
    mods = [abs(v) for j, (v, m) in enumerate(zip(vals, mult)) if j != i or m > 1]
    if not mods:
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - max(mods))))
