"""Command-line entry point: ``driftmix <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 solver failures above the allowed
fraction (or a failed self-test).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arc_model import (ArcSystem, GeometricParams, RejectionBudgetExceeded, sample_BLk, sample_Bnk,
                        sample_Bnk_rejection)
from .chain_matrix import build_interpolated, build_pure_drift
from .dense_spectrum import dense_spectrum
from .harness import fit_loglog_slope, log_spaced_grid, q_grid, qsweep, ratescan, ring_check
from .output import (emit_csv, emit_svg_curve, emit_svg_histogram, spectrum_csv, sweep_csv, trials_csv,
                     write_text)
from .structured_spectrum import full_spectrum
from .selftest import oracle_equivalence
from .theory_probe import (CosProbeConfig, cos_plus_event_mc, max_length_tail, real_axis_check,
                           residue_interval_mc, small_arg_imag_check)

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(" ", "").split(",") if x]


def _threads(text: str):
    if text == "auto":
        return text
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1 or 'auto'")
    return v


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="base 64-bit seed")
    g.add_argument("--trials", type=int, default=None, help="trial count (command-specific default)")
    g.add_argument("--trim", type=float, default=0.05, help="fraction dropped from each tail")
    g.add_argument("--threads", type=_threads, default=1, help="worker threads or 'auto'")
    g.add_argument("--out", default=None, help="output file or directory")
    g.add_argument("--gamma", type=float, default=4.1, help="ring exponent")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--config", default=None, help="flat key=value file; flags override it")
    g.add_argument("--max-failure-fraction", type=float, default=0.01)
    g.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for reproducible bytes")
    return p


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    common = _common()
    parser = _Parser(prog="driftmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = subs["sample"] = sub.add_parser("sample", parents=[common], help="draw one arc system (JSON)")
    p.add_argument("--model", choices=("bnk", "blk", "rejection"), default="bnk")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=float)
    p.add_argument("--max-attempts", type=int, default=1_000_000)

    p = subs["spectrum"] = sub.add_parser("spectrum", parents=[common], help="eigenvalues of one instance")
    p.add_argument("--lengths", type=_int_list, help="comma-separated arc lengths")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=("structured", "dense"), default="structured")
    p.add_argument("--q", type=float, default=1.0, help="blend parameter (dense only when < 1)")

    p = subs["ratescan"] = sub.add_parser("ratescan", parents=[common], help="pure-drift vs reversible rates over n")
    p.add_argument("--n-grid", type=_int_list)
    p.add_argument("--n-min", type=int, default=54)
    p.add_argument("--n-max", type=int, default=2980)
    p.add_argument("--n-points", type=int, default=8)
    p.add_argument("--sigma", type=float, default=0.5)

    p = subs["qsweep"] = sub.add_parser("qsweep", parents=[common], help="rates of q P + (1-q) P^T")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--q-step", type=float, default=0.025)
    p.add_argument("--q-grid", type=_float_list)
    p.add_argument("--dense-at-one", action="store_true", help="use the dense solver at q = 1 as well")

    p = subs["ring-check"] = sub.add_parser("ring-check", parents=[common], help="ring-violation frequencies")
    p.add_argument("--n-grid", type=_int_list, default=[512, 1024, 2048])
    p.add_argument("--sigma", type=float, default=0.5)

    p = subs["lemma-mc"] = sub.add_parser("lemma-mc", parents=[common], help="lemma and proposition batteries")
    p.add_argument("--L", type=float, default=100.0)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--alpha", type=float, default=1.1)
    p.add_argument("--beta", type=float, default=1.1)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--z-points", type=int, default=1000)

    p = subs["selftest"] = sub.add_parser("selftest", parents=[common], help="structured vs dense oracle suite")
    p.add_argument("--max-k", type=int, default=5)
    p.add_argument("--max-length", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-8)
    return parser, subs


def load_config(path) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _apply_config(sub: _Parser, cfg: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        if key not in actions or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(actions[key], argparse._StoreTrueAction):
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean")
            defaults[key] = value.lower() in ("true", "1", "yes")
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)


def _emit(text: str, out) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _table_dict(table) -> list[dict]:
    return [
        {"group": r.group, "attempted": r.attempted, "count": r.count, "failed": r.failed, "mean": r.mean,
         "std": r.std, "median": r.median, "p05": r.p05, "p95": r.p95}
        for r in table.rows
    ]


def _failure_status(attempted: int, failed: int, limit: float) -> int:
    if failed:
        print(f"warning: {failed} of {attempted} solves failed and were excluded", file=sys.stderr)
    return EXIT_SOLVER if attempted and failed / attempted > limit else EXIT_OK


def cmd_sample(a) -> int:
    if a.model == "blk":
        if a.L is None:
            raise UsageError("--model blk needs --L")
        arcs = sample_BLk(GeometricParams(a.L, a.k), a.seed)
        extra = {}
    else:
        if a.n is None:
            raise UsageError(f"--model {a.model} needs --n")
        if a.model == "bnk":
            arcs, extra = sample_Bnk(a.n, a.k, a.seed), {}
        else:
            try:
                arcs, attempts = sample_Bnk_rejection(a.n, a.k, a.max_attempts, a.seed)
            except RejectionBudgetExceeded as exc:
                print(str(exc), file=sys.stderr)
                return EXIT_SOLVER
            extra = {"attempts": attempts}
    _emit(_json({**arcs.to_dict(), **extra, "seed": a.seed}), a.out)
    return EXIT_OK


def cmd_spectrum(a) -> int:
    if a.lengths:
        arcs = ArcSystem(a.lengths)
    elif a.n is not None and a.k is not None:
        arcs = sample_Bnk(a.n, a.k, a.seed)
    else:
        raise UsageError("give --lengths or both --n and --k")
    if a.method == "structured":
        if a.q != 1.0:
            raise UsageError("the structured solver only handles q = 1")
        spec = full_spectrum(arcs)
    else:
        spec = dense_spectrum(build_interpolated(build_pure_drift(arcs), a.q))
    if a.format == "json":
        text = _json({
            "lengths": list(arcs.lengths), "method": spec.method, "mixing_rate": spec.mixing_rate,
            "eigenvalues": [{"re": v.real, "im": v.imag, "mult": m} for v, m in spec.eigenvalues],
        })
    else:
        text = spectrum_csv(spec)
    _emit(text, a.out)
    return EXIT_OK


def cmd_ratescan(a) -> int:
    grid = a.n_grid or log_spaced_grid(a.n_min, a.n_max, a.n_points)
    trials = a.trials or 2000
    res = ratescan(grid, a.sigma, trials, a.trim, a.gamma, a.seed, a.threads, timing=not a.no_timing)
    fits = {}
    for name, table in (("nonreversible", res.nonreversible), ("reversible", res.reversible)):
        try:
            fits[name] = dict(zip(("slope", "intercept", "r2"), fit_loglog_slope(table)))
        except ValueError:
            fits[name] = None
    summary = {
        "n_grid": grid, "sigma": a.sigma, "trials_per_n": trials, "trim": a.trim, "seed": a.seed,
        "gamma": a.gamma, "fits": fits,
        "ring_violations": {str(n): {"violations": h, "trials": t} for n, (h, t) in res.ring_violations.items()},
        "nonreversible": _table_dict(res.nonreversible), "reversible": _table_dict(res.reversible),
        "trials_attempted": len(res.records), "trials_failed": sum(r.failed for r in res.records),
    }
    if a.out:
        out = Path(a.out)
        write_text(out / "trials.csv", trials_csv(res.records))
        write_text(out / "nonreversible.csv", sweep_csv(res.nonreversible))
        write_text(out / "reversible.csv", sweep_csv(res.reversible))
        write_text(out / "summary.json", _json(summary))
        emit_svg_histogram(res.records, out / "histogram.svg")
    elif a.format == "json":
        sys.stdout.write(_json(summary))
    else:
        sys.stdout.write("# nonreversible\n" + sweep_csv(res.nonreversible))
        sys.stdout.write("# reversible\n" + sweep_csv(res.reversible))
    return _failure_status(summary["trials_attempted"], summary["trials_failed"], a.max_failure_fraction)


def cmd_qsweep(a) -> int:
    qs = a.q_grid or q_grid(a.q_step)
    trials = a.trials or 500
    res = qsweep(a.n, a.k, qs, trials, a.trim, a.seed, a.threads, timing=not a.no_timing,
                 structured_at_one=not a.dense_at_one)
    summary = {
        "n": a.n, "k": a.k, "q_grid": qs, "trials": trials, "trim": a.trim, "seed": a.seed,
        "table": _table_dict(res.table), "trials_attempted": len(res.records),
        "trials_failed": sum(r.failed for r in res.records),
    }
    if a.out:
        out = Path(a.out)
        write_text(out / "trials.csv", trials_csv(res.records))
        write_text(out / "sweep.csv", sweep_csv(res.table))
        write_text(out / "summary.json", _json(summary))
        emit_svg_curve(res.table, out / "curve.svg")
    elif a.format == "json":
        sys.stdout.write(_json(summary))
    else:
        sys.stdout.write(sweep_csv(res.table))
    return _failure_status(summary["trials_attempted"], summary["trials_failed"], a.max_failure_fraction)


def cmd_ring_check(a) -> int:
    stats = ring_check(a.n_grid, a.sigma, a.trials or 1000, a.gamma, a.seed, a.threads)
    rows = [stats[n] for n in sorted(stats)]
    if a.format == "json":
        text = _json(rows)
    else:
        cols = ("n", "k", "trials", "failed", "violations", "frequency", "ring_width", "fraction_rate_above_width")
        text = ",".join(cols) + "\n" + "".join(
            ",".join(str(r[c]) if isinstance(r[c], int) else format(r[c], ".17g") for c in cols) + "\n"
            for r in rows
        )
    _emit(text, a.out)
    attempted = sum(r["trials"] + r["failed"] for r in rows)
    return _failure_status(attempted, sum(r["failed"] for r in rows), a.max_failure_fraction)


def cmd_lemma_mc(a) -> int:
    from .arc_model import geometric_lengths
    from .seeding import make_rng, mix_seed
    from .theory_probe import RingSpec

    trials = a.trials or 100_000
    cfg = CosProbeConfig(a.L, a.k, a.alpha, a.beta, a.C)
    ring = RingSpec(a.gamma, a.L, a.k)
    tail = max_length_tail(a.L, a.k, a.C, trials, mix_seed(a.seed, 1))
    real_ok, small_ok, small_na = 0, 0, 0
    for i in range(a.instances):
        arcs = ArcSystem(geometric_lengths(make_rng(mix_seed(a.seed, 2, i)), a.L, a.k))
        real_ok += real_axis_check(arcs, a.z_points)
        res = small_arg_imag_check(arcs, cfg, a.z_points, ring)
        if res is None:
            small_na += 1
        else:
            small_ok += res
    cos_trials = max(100, min(trials, 500))
    cos = cos_plus_event_mc(cfg, cos_trials, mix_seed(a.seed, 3))
    x_mid = math.pi * (1 + 1 / math.sqrt(5))
    resid = residue_interval_mc(cfg, x_mid, 0.0, trials, mix_seed(a.seed, 4))
    report = {
        "config": {"L": a.L, "k": a.k, "C": a.C, "alpha": a.alpha, "beta": a.beta, "gamma": a.gamma,
                   "m": cfg.m, "delta": cfg.delta, "window": list(cfg.window), "resolution": cfg.resolution},
        "max_length_tail": tail._asdict(),
        "real_axis": {"instances": a.instances, "passed": real_ok},
        "small_argument": {"instances": a.instances, "passed": small_ok, "not_applicable": small_na},
        "cos_plus_event": {**cos._asdict(), "lower_bound": 1 / 3,
                           "within": cos.frequency >= 1 / 3 - 3 * cos.stderr},
        "residue_interval": {**resid._asdict(), "x": x_mid, "upper_bound": 0.75,
                             "within": resid.frequency <= 0.75 + 3 * resid.stderr},
    }
    _emit(_json(report), a.out)
    failed = (real_ok != a.instances) or (small_ok + small_na != a.instances)
    failed |= not (report["cos_plus_event"]["within"] and report["residue_interval"]["within"])
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_selftest(a) -> int:
    res = oracle_equivalence(a.trials or 1000, a.seed, a.max_k, a.max_length, a.tol)
    for line in res.lines():
        print(line)
    return EXIT_OK if res.passed else EXIT_SOLVER


COMMANDS = {
    "sample": cmd_sample,
    "spectrum": cmd_spectrum,
    "ratescan": cmd_ratescan,
    "qsweep": cmd_qsweep,
    "ring-check": cmd_ring_check,
    "lemma-mc": cmd_lemma_mc,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(subs[args.command], load_config(args.config))
            args = parser.parse_args(argv)
        if args.trials is not None and args.trials < 1:
            raise UsageError("--trials must be positive")
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"driftmix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
