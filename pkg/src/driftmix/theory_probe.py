"""Numerical probes of the ring-exclusion argument for the pure-drift chain.

Every ``log`` here is the natural logarithm.  Lemma checks evaluate the
deterministic statements on finite point sets; they are spot checks, not
proofs.  The Monte Carlo probes return frequencies with binomial standard
errors and leave any comparison to the caller.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .arc_model import ArcSystem, geometric_lengths
from .seeding import make_rng, mix_seed
from .structured_spectrum import full_spectrum, mixing_rate

__all__ = [
    "RingSpec",
    "CosProbeConfig",
    "TailResult",
    "MCFrequency",
    "find_ring_violation",
    "max_length_tail",
    "max_length_tail_exact",
    "real_axis_check",
    "small_arg_imag_check",
    "cos_plus_sum",
    "cos_plus_sup",
    "cos_plus_event_mc",
    "residue_interval_mc",
]

_GOLDEN = 0.6180339887498949


@dataclass(frozen=True)
class RingSpec:
    """Annulus ``1 - 1/(L log(k)**gamma) <= |z| <= 1`` minus the point 1."""

    gamma: float
    L: float
    k: int

    def __post_init__(self):
        if self.k < 2 or self.L <= 0:
            raise ValueError("ring needs k >= 2 and L > 0")
        if self.gamma <= 4:
            warnings.warn(f"gamma = {self.gamma} <= 4 is outside the exclusion theorem's range", stacklevel=3)
        r = self.inner_radius
        if not 0.0 < r < 1.0:
            raise ValueError(f"inner radius {r:.4g} is not in (0, 1) for L={self.L}, k={self.k}, gamma={self.gamma}")

    @property
    def width(self) -> float:
        return 1.0 / (self.L * math.log(self.k) ** self.gamma)

    @property
    def inner_radius(self) -> float:
        return 1.0 - self.width


@dataclass(frozen=True)
class CosProbeConfig:
    """Parameters of the cosine-cancellation probe.

    ``m = ceil(log(k)**alpha)`` lengths per group, ``delta = log(k)**-beta``,
    argument window ``A = [pi/(C L log k), 2 pi - pi/(C L log k)]`` and grid
    step ``eps = 2 delta**2 / (m C L log k)``.
    """

    L: float
    k: int
    alpha: float = 1.1
    beta: float = 1.1
    C: float = 2.0

    def __post_init__(self):
        if self.alpha <= 1 or self.beta <= 1 or self.C <= 1:
            raise ValueError("alpha, beta and C must all exceed 1")
        if self.k < 3:
            raise ValueError("need k >= 3 so that delta < 1")
        if self.window[0] >= self.window[1]:
            raise ValueError("argument window is empty")

    @property
    def log_k(self) -> float:
        return math.log(self.k)

    @property
    def scale(self) -> float:
        """``C L log k``, the bound on arc lengths under S(C)."""
        return self.C * self.L * self.log_k

    @property
    def m(self) -> int:
        return max(1, math.ceil(self.log_k ** self.alpha))

    @property
    def delta(self) -> float:
        return self.log_k ** (-self.beta)

    @property
    def window(self) -> tuple[float, float]:
        edge = math.pi / self.scale
        return edge, 2.0 * math.pi - edge

    @property
    def resolution(self) -> float:
        return 2.0 * self.delta ** 2 / (self.m * self.scale)


def find_ring_violation(arcs: ArcSystem, ring: RingSpec) -> complex | None:
    """An eigenvalue other than 1 inside the ring, or ``None``.

    Decided through the mixing rate so that ``None`` holds exactly when
    ``mixing_rate > ring.width``.
    """
    spec = full_spectrum(arcs)
    if mixing_rate(spec) > ring.width:
        return None
    vals = [v for v, m in spec.eigenvalues]
    mult = [m for _, m in spec.eigenvalues]
    one = int(np.argmin([abs(v - 1.0) for v in vals]))
    candidates = [v for j, (v, m) in enumerate(zip(vals, mult)) if j != one or m > 1]
    return max(candidates, key=abs)


class TailResult(NamedTuple):
    frequency: float
    exact: float
    bound: float
    stderr: float
    trials: int


def max_length_tail_exact(L: float, k: int, C: float) -> float:
    """``P(max_i L_i >= C L log k)`` for ``k`` iid Geo(1/L) lengths."""
    t = math.ceil(C * L * math.log(k))
    if L == 1.0:
        single = 1.0 if t <= 1 else 0.0
    else:
        single = math.exp((t - 1) * math.log1p(-1.0 / L))  # P(L_i >= t)
    if single >= 1.0:
        return 1.0
    return -math.expm1(k * math.log1p(-single))


def max_length_tail(L: float, k: int, C: float, trials: int, seed: int,
                    chunk_elems: int = 2_000_000) -> TailResult:
    """Empirical vs exact probability that some arc reaches ``C L log k``, with the ``k**(1-C)`` bound."""
    if C <= 1:
        raise ValueError("C must exceed 1")
    thresh = C * L * math.log(k)
    rng = make_rng(seed)
    per = max(1, chunk_elems // k)
    hits = 0
    done = 0
    while done < trials:
        b = min(per, trials - done)
        hits += int((geometric_lengths(rng, L, (b, k)).max(axis=1) >= thresh).sum())
        done += b
    exact = max_length_tail_exact(L, k, C)
    freq = hits / trials
    return TailResult(freq, exact, float(k) ** (1.0 - C), math.sqrt(max(exact * (1 - exact), 0.0) / trials), trials)


def _q_polar(lengths: np.ndarray, r: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``q(r e^{i theta})`` for arrays of points."""
    Lc = lengths[:, None].astype(float)
    mag = np.exp(-Lc * np.log(r)[None, :])
    ang = Lc * theta[None, :]
    return (mag * np.cos(ang)).sum(axis=0), -(mag * np.sin(ang)).sum(axis=0)


def real_axis_check(arcs: ArcSystem, samples: int) -> bool:
    """``q(z) > k`` at ``samples`` equally spaced points of [0.01, 0.99]."""
    z = np.linspace(0.01, 0.99, samples)
    lengths = np.asarray(arcs.lengths, dtype=float)
    with np.errstate(over="ignore"):
        qz = np.exp(-lengths[:, None] * np.log(z)[None, :]).sum(axis=0)
    return bool(np.all(qz > arcs.k))


def small_arg_imag_check(arcs: ArcSystem, cfg: CosProbeConfig, samples: int,
                         ring: RingSpec | None = None, guard: float = 1e-14) -> bool | None:
    """Check ``Im q(z) < 0`` for ring points with small positive argument.

    Points have ``|z|`` in ``[inner_radius, 1]`` and ``0 < arg z < pi/(C L log k)``,
    laid out on a deterministic Kronecker sequence.  Returns ``None`` when some
    arc is at least ``C L log k`` long, the regime where the claim is not made.
    The conjugate half follows by symmetry.
    """
    if arcs.max_length >= cfg.scale:
        return None
    if ring is None:
        ring = RingSpec(4.1, cfg.L, cfg.k)
    i = np.arange(samples)
    theta = cfg.window[0] * (i + 0.5) / samples
    r = ring.inner_radius + (1.0 - ring.inner_radius) * np.mod((i + 1) * _GOLDEN, 1.0)
    _, im = _q_polar(np.asarray(arcs.lengths), r, theta)
    return bool(np.all(im < -guard))


def cos_plus_sum(lengths: Sequence[int], x) -> np.ndarray:
    """``sum_i max(cos(L_i x), 0)`` for scalar or array ``x``."""
    Lc = np.asarray(lengths, dtype=float)[:, None]
    xs = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    return np.maximum(np.cos(Lc * xs), 0.0).sum(axis=0)


def cos_plus_sup(lengths: Sequence[int], cfg: CosProbeConfig, resolution: float | None = None,
                 chunk: int = 4096) -> float:
    """Maximum of ``sum_i cos+(L_i x)`` over a uniform grid on the window ``A``.

    The grid has spacing at most ``resolution`` (default ``cfg.resolution``)
    and includes both window ends.  The maximum over grid points is found
    exactly by branch and bound on index ranges, using the Lipschitz
    constant ``sum_i L_i``.  Moving from any point of ``A`` to its nearest
    grid node changes the sum by at most ``resolution/2 * sum_i L_i``, which
    is ``delta**2`` at the default resolution under S(C).
    """
    lo_x, hi_x = cfg.window
    eps = cfg.resolution if resolution is None else float(resolution)
    J = max(1, math.ceil((hi_x - lo_x) / eps))
    h = (hi_x - lo_x) / J
    lip = float(np.sum(lengths))
    Lc = np.asarray(lengths, dtype=float)[:, None]

    def f(idx: np.ndarray) -> np.ndarray:
        return np.maximum(np.cos(Lc * (lo_x + idx[None, :] * h)), 0.0).sum(axis=0)

    lo = np.arange(0, J + 1, chunk, dtype=np.int64)
    hi = np.minimum(lo + chunk - 1, J)
    best = -np.inf
    while lo.size:
        mid = (lo + hi) // 2
        val = f(mid)
        best = max(best, float(val.max()))
        reach = np.maximum(mid - lo, hi - mid) * h * lip
        keep = (val + reach > best) & (hi > lo)
        lo, hi, mid = lo[keep], hi[keep], mid[keep]
        # split around the evaluated midpoint
        left_hi = mid - 1
        right_lo = mid + 1
        nl = left_hi >= lo
        nr = hi >= right_lo
        lo = np.concatenate((lo[nl], right_lo[nr]))
        hi = np.concatenate((left_hi[nl], hi[nr]))
    return best


class MCFrequency(NamedTuple):
    frequency: float
    stderr: float
    successes: int
    trials: int

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        return self.frequency - z * self.stderr, self.frequency + z * self.stderr


def _freq(successes: int, trials: int) -> MCFrequency:
    p = successes / trials
    return MCFrequency(p, math.sqrt(p * (1 - p) / trials), successes, trials)


def cos_plus_event_mc(cfg: CosProbeConfig, trials: int, seed: int, force_equal: bool = False) -> MCFrequency:
    """Frequency of ``cos_plus_sup < m - delta**2`` over independent groups of ``m`` Geo(1/L) lengths.

    Trial ``t`` uses the stream ``mix_seed(seed, t)``.  With ``force_equal``
    every group repeats its first length ``m`` times.
    """
    if trials < 100:
        raise ValueError("use at least 100 trials")
    m, target = cfg.m, cfg.m - cfg.delta ** 2
    hits = 0
    for t in range(trials):
        rng = make_rng(mix_seed(seed, t))
        lengths = geometric_lengths(rng, cfg.L, m)
        if force_equal:
            lengths[:] = lengths[0]
        hits += cos_plus_sup(lengths, cfg) < target
    return _freq(int(hits), trials)


def residue_interval_mc(cfg: CosProbeConfig, x: float, D_center: float, trials: int, seed: int,
                        lattice: int = 1) -> MCFrequency:
    """Frequency of ``(L_1 x mod 2 pi)`` landing in the arc of width ``6 delta`` centred at ``D_center``.

    ``lattice`` multiplies each drawn length (``lattice = 2`` gives only even
    lengths, a degenerate alignment case).
    """
    lo_x, hi_x = cfg.window
    if not lo_x <= x <= hi_x:
        raise ValueError(f"x = {x} lies outside the window [{lo_x}, {hi_x}]")
    half = 3.0 * cfg.delta
    if 2 * half >= math.pi:
        raise ValueError("interval width 6*delta must stay below pi")
    L1 = geometric_lengths(make_rng(seed), cfg.L, trials) * int(lattice)
    ang = np.mod(L1 * x, 2.0 * math.pi)
    d = np.mod(ang - D_center + math.pi, 2.0 * math.pi) - math.pi
    return _freq(int(np.count_nonzero(np.abs(d) <= half)), trials)
