import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import driftmix.harness as harness
from driftmix.arc_model import sample_Bnk
from driftmix.harness import (SweepRow, SweepTable, TrialRecord, fit_loglog_slope, log_spaced_grid, q_grid,
                              qsweep, ratescan, resolve_threads, ring_check, run_parallel, summarize)
from driftmix.seeding import mix_seed
from driftmix.structured_spectrum import SpectrumError, full_spectrum


def rec(group, lam, q=1.0):
    return TrialRecord(0, group, 2, q, lam, "structured", 0.0, 0.0)


def test_grids():
    g = log_spaced_grid(54, 2980, 8)
    assert g[0] == 54 and g[-1] == 2980 and len(g) == 8
    assert all(b > a for a, b in zip(g, g[1:]))
    ratios = np.diff(np.log(g))
    assert ratios.max() - ratios.min() < 0.02
    qs = q_grid(0.025)
    assert len(qs) == 21 and qs[0] == 0.5 and qs[-1] == 1.0
    with pytest.raises(ValueError):
        q_grid(0.3)


def test_threads():
    assert resolve_threads(3) == 3
    assert resolve_threads("auto") >= 1
    with pytest.raises(ValueError):
        resolve_threads(0)
    assert run_parallel(lambda x: x * x, range(20), 4) == [x * x for x in range(20)]


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=80), st.sampled_from([0.0, 0.05, 0.1, 0.25]))
def test_trim_drops_floor_from_each_tail(vals, trim):
    t = summarize([rec(10, v) for v in vals], "n", trim)
    row = t.rows[0]
    s = np.sort(vals)
    cut = math.floor(trim * len(vals))
    kept = s[cut: len(s) - cut]
    assert row.count == len(vals) == row.attempted
    assert row.mean == pytest.approx(kept.mean(), abs=1e-12)
    assert row.median == pytest.approx(np.median(s), abs=1e-12)


def test_failures_counted_not_dropped():
    recs = [rec(5, 0.1), rec(5, math.nan), rec(5, 0.3), rec(7, math.nan)]
    t = summarize(recs, "n", 0.0)
    assert t.row(5).attempted == 3 and t.row(5).count == 2 and t.row(5).failed == 1
    assert t.row(7).count == 0 and math.isnan(t.row(7).mean)
    assert t.attempted == 4 and t.failed == 2
    with pytest.raises(ValueError):
        summarize(recs, "n", 0.5)


def _table(groups, med):
    rows = tuple(SweepRow(g, 1, 1, m, 0.0, m, m, m) for g, m in zip(groups, med))
    return SweepTable("n", 0.0, rows)


def test_fit_exact_power_laws():
    n = np.array([54, 100, 300, 1000, 2980], dtype=float)
    for p in (0.5, 1.0):
        slope, icpt, r2 = fit_loglog_slope(_table(n, 3.0 * n**-p))
        assert abs(slope + p) < 1e-12 and abs(icpt - math.log(3)) < 1e-10 and r2 == pytest.approx(1.0)


def test_fit_rejects():
    with pytest.raises(ValueError):
        fit_loglog_slope(_table([1, 2], [1, 1]))
    with pytest.raises(ValueError):
        fit_loglog_slope(_table([1, 2, 3], [1, 0, 1]))


def test_ratescan_small():
    res = ratescan([54, 100], trials_per_n=20, seed=3, timing=False)
    assert len(res.records) == 80
    for r in res.records:
        assert 0 <= r.lam <= 1 and not r.failed
        assert r.wall_ms == 0.0
    nonrev = [r for r in res.records if r.q == 1.0]
    rev = [r for r in res.records if r.q == 0.5]
    # paired design: same graph seed for both chains
    assert [r.seed for r in nonrev] == [r.seed for r in rev]
    r0 = nonrev[0]
    assert r0.seed == mix_seed(3, 54, 0)
    assert r0.lam == full_spectrum(sample_Bnk(54, 7, r0.seed)).mixing_rate
    assert set(res.ring_violations) == {54, 100}
    assert res.nonreversible.row(100).median > res.reversible.row(100).median


def test_ratescan_thread_count_invariant():
    a = ratescan([60, 90], trials_per_n=15, seed=1, timing=False, threads=1)
    b = ratescan([60, 90], trials_per_n=15, seed=1, timing=False, threads=3)
    assert a.records == b.records
    assert a.nonreversible == b.nonreversible


def test_ratescan_range_n100():
    res = ratescan([100], trials_per_n=1000, seed=5, timing=False, reversible=False)
    lams = np.array([r.lam for r in res.records])
    assert lams.size == 1000 and not np.isnan(lams).any()
    assert lams.min() >= 0 and lams.max() <= 1


def test_ratescan_rejects():
    with pytest.raises(ValueError):
        ratescan([3], sigma=0.5, trials_per_n=1)
    with pytest.raises(ValueError):
        ratescan([100], sigma=1.0, trials_per_n=1)


def test_solver_failure_recorded(monkeypatch):
    calls = {"n": 0}
    real = harness.structured_rate

    def flaky(arcs):
        calls["n"] += 1
        if calls["n"] % 3 == 0:
            raise SpectrumError("synthetic")
        return real(arcs)

    monkeypatch.setattr(harness, "structured_rate", flaky)
    res = ratescan([64], trials_per_n=9, seed=0, timing=False, reversible=False)
    assert len(res.records) == 9
    assert res.nonreversible.attempted == 9 and res.nonreversible.failed == 3
    assert res.ring_violations[64][1] == 6


def test_qsweep_paired_and_structured_at_one():
    qs = [0.5, 0.75, 1.0]
    res = qsweep(60, 6, qs, trials=8, seed=2, timing=False)
    assert len(res.records) == 24
    for i in range(8):
        batch = res.records[3 * i: 3 * i + 3]
        assert len({r.seed for r in batch}) == 1 and [r.q for r in batch] == qs
    ones = [r for r in res.records if r.q == 1.0]
    dense = qsweep(60, 6, [1.0], trials=8, seed=2, timing=False, structured_at_one=False).records
    for a, b in zip(ones, dense):
        assert a.method == "structured" and b.method == "dense"
        assert abs(a.lam - b.lam) <= 1e-8
    with pytest.raises(ValueError):
        qsweep(60, 6, [0.4], trials=1)


def test_ring_check_rows():
    out = ring_check([100, 144], trials=10, seed=0)
    assert sorted(out) == [100, 144]
    row = out[144]
    assert row["k"] == 12 and row["trials"] + row["failed"] == 10
    assert row["violations"] == round(row["frequency"] * row["trials"])
