"""CSV and SVG writers for trial records, sweep tables and spectra.

Floats are written with 17 significant digits so that every value
round-trips exactly; lines end with ``\\n``.  SVG output is assembled from
fixed-precision strings and is byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .harness import SweepTable, TrialRecord
from .structured_spectrum import Spectrum

__all__ = [
    "TRIALS_HEADER",
    "SWEEP_HEADER",
    "EIGEN_HEADER",
    "fmt_float",
    "trials_csv",
    "sweep_csv",
    "spectrum_csv",
    "parse_trials_csv",
    "emit_csv",
    "emit_svg_histogram",
    "emit_svg_curve",
    "write_text",
]

TRIALS_HEADER = ("seed", "n", "k", "q", "lambda", "method", "residual", "wall_ms")
SWEEP_HEADER = ("group", "count", "mean", "std", "median", "p05", "p95")
EIGEN_HEADER = ("re", "im", "mult", "method")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_group(g) -> str:
    return str(g) if isinstance(g, (int, np.integer)) else fmt_float(g)


def _render(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trials_csv(records: Iterable[TrialRecord]) -> str:
    return _render(TRIALS_HEADER, (
        (str(r.seed), str(r.n), str(r.k), fmt_float(r.q), fmt_float(r.lam), r.method,
         fmt_float(r.residual), fmt_float(r.wall_ms))
        for r in records
    ))


def sweep_csv(table: SweepTable) -> str:
    return _render(SWEEP_HEADER, (
        (_fmt_group(r.group), str(r.count), fmt_float(r.mean), fmt_float(r.std), fmt_float(r.median),
         fmt_float(r.p05), fmt_float(r.p95))
        for r in table.rows
    ))


def spectrum_csv(spec: Spectrum) -> str:
    return _render(EIGEN_HEADER, (
        (fmt_float(v.real), fmt_float(v.imag), str(m), spec.method) for v, m in spec.eigenvalues
    ))


def parse_trials_csv(text: str) -> list[TrialRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != TRIALS_HEADER:
        raise ValueError("not a trials CSV (header mismatch)")
    return [
        TrialRecord(int(s), int(n), int(k), float(q), float(lam), method, float(res), float(ms))
        for s, n, k, q, lam, method, res, ms in rows[1:]
    ]


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(obj, path) -> Path:
    """Write a ``SweepTable``, a ``Spectrum`` or a sequence of ``TrialRecord`` as CSV."""
    if isinstance(obj, SweepTable):
        text = sweep_csv(obj)
    elif isinstance(obj, Spectrum):
        text = spectrum_csv(obj)
    else:
        text = trials_csv(obj)
    return write_text(path, text)


def _n(x: float) -> str:
    return f"{x:.2f}"


def emit_svg_histogram(records: Sequence[TrialRecord], path, bins: tuple[int, int] = (40, 60),
                       width: int = 640, height: int = 480) -> Path:
    """2-D histogram of ``(log n, log lambda)`` with a linear gray scale.

    Failed trials and zero rates (no logarithm) are left out.
    """
    pts = np.array([(r.n, r.lam) for r in records if not r.failed and r.lam > 0], dtype=float)
    margin = 60
    pw, ph = width - 2 * margin, height - 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if pts.size:
        lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
        xr = (lx.min() - 0.05, lx.max() + 0.05)
        yr = (ly.min() - 0.05, ly.max() + 0.05)
        H, xe, ye = np.histogram2d(lx, ly, bins=bins, range=[xr, yr])
        peak = H.max()
        cw, chh = pw / bins[0], ph / bins[1]
        for i in range(bins[0]):
            for j in range(bins[1]):
                if H[i, j] == 0:
                    continue
                g = int(round(255 * (1 - H[i, j] / peak)))
                parts.append(
                    f'<rect x="{_n(margin + i * cw)}" y="{_n(margin + ph - (j + 1) * chh)}" '
                    f'width="{_n(cw)}" height="{_n(chh)}" fill="rgb({g},{g},{g})"/>'
                )
        for t in range(math.ceil(xr[0]), math.floor(xr[1]) + 1):
            x = margin + (t - xr[0]) / (xr[1] - xr[0]) * pw
            parts.append(f'<text x="{_n(x)}" y="{height - margin + 18}" font-size="12" text-anchor="middle">{t}</text>')
        for t in range(math.ceil(yr[0]), math.floor(yr[1]) + 1):
            y = margin + ph - (t - yr[0]) / (yr[1] - yr[0]) * ph
            parts.append(f'<text x="{margin - 6}" y="{_n(y + 4)}" font-size="12" text-anchor="end">{t}</text>')
    parts += [
        f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" font-size="14" text-anchor="middle">log n</text>',
        f'<text x="18" y="{height // 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {height // 2})">log lambda</text>',
        "</svg>",
    ]
    return write_text(path, "\n".join(parts) + "\n")


def emit_svg_curve(table: SweepTable, path, width: int = 640, height: int = 480) -> Path:
    """Trimmed mean against the group key (solid) with mean +/- std (dashed)."""
    rows = [r for r in table.rows if r.count > 0]
    x = np.array([float(r.group) for r in rows])
    mean = np.array([r.mean for r in rows])
    std = np.array([r.std for r in rows])
    margin = 60
    pw, ph = width - 2 * margin, height - 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if x.size:
        x0, x1 = float(x.min()), float(x.max())
        if x1 == x0:
            x1 = x0 + 1.0
        y1 = float((mean + std).max()) * 1.05 or 1.0

        def poly(ys, dash):
            pts = " ".join(
                f"{_n(margin + (a - x0) / (x1 - x0) * pw)},{_n(margin + ph - b / y1 * ph)}" for a, b in zip(x, ys)
            )
            extra = ' stroke-dasharray="6,4"' if dash else ""
            return f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"{extra}/>'

        parts += [poly(mean, False), poly(mean + std, True), poly(mean - std, True)]
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            parts.append(
                f'<text x="{_n(margin + frac * pw)}" y="{height - margin + 18}" font-size="12" '
                f'text-anchor="middle">{x0 + frac * (x1 - x0):.3g}</text>'
            )
            parts.append(
                f'<text x="{margin - 6}" y="{_n(margin + ph - frac * ph + 4)}" font-size="12" '
                f'text-anchor="end">{frac * y1:.3g}</text>'
            )
    parts += [
        f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" font-size="14" text-anchor="middle">{table.key}</text>',
        f'<text x="18" y="{height // 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {height // 2})">lambda</text>',
        "</svg>",
    ]
    return write_text(path, "\n".join(parts) + "\n")
