import json

import pytest

from driftmix.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_json(capsys):
    code, out, _ = run(capsys, "sample", "--n", "20", "--k", "4", "--seed", "3")
    d = json.loads(out)
    assert code == 0 and d["n"] == 20 and sum(d["lengths"]) == 20
    code, out, _ = run(capsys, "sample", "--model", "blk", "--L", "5", "--k", "6")
    assert code == 0 and len(json.loads(out)["lengths"]) == 6
    code, out, _ = run(capsys, "sample", "--model", "rejection", "--n", "12", "--k", "3")
    assert code == 0 and json.loads(out)["attempts"] >= 1


def test_sample_budget_exceeded(capsys):
    code, _, err = run(capsys, "sample", "--model", "rejection", "--n", "400", "--k", "2", "--max-attempts", "2")
    assert code == 2 and "attempts" in err


def test_spectrum_csv_and_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--lengths", "1,2")
    assert code == 0 and out.splitlines()[0] == "re,im,mult,method" and len(out.splitlines()) == 4
    code, out, _ = run(capsys, "spectrum", "--lengths", "1,2", "--method", "dense", "--q", "0.5", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["method"] == "dense" and abs(d["mixing_rate"] - 0.25) < 1e-14


@pytest.mark.parametrize("argv", [
    ["spectrum"],
    ["spectrum", "--lengths", "1,2", "--q", "0.7"],
    ["sample", "--k", "3"],
    ["nonsense"],
    ["qsweep", "--threads", "0"],
    ["ratescan", "--trials", "0"],
    ["qsweep", "--q-grid", "0.2,1", "--trials", "1"],
])
def test_usage_errors_exit_one(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_ratescan_writes_directory(tmp_path, capsys):
    out = tmp_path / "scan"
    code, _, _ = run(capsys, "ratescan", "--n-grid", "54,80,120", "--trials", "8", "--out", str(out), "--no-timing")
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["histogram.svg", "nonreversible.csv", "reversible.csv", "summary.json", "trials.csv"]
    s = json.loads((out / "summary.json").read_text())
    assert s["trials_attempted"] == 48 and s["trials_failed"] == 0
    assert s["fits"]["nonreversible"]["slope"] < 0


def test_ratescan_threads_byte_identical(tmp_path, capsys):
    for t in ("1", "3"):
        run(capsys, "ratescan", "--n-grid", "54,80", "--trials", "6", "--threads", t, "--no-timing",
            "--out", str(tmp_path / t))
    for name in ("trials.csv", "nonreversible.csv", "reversible.csv"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "3" / name).read_bytes()


def test_qsweep_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\ntrials = 4\nq-step = 0.25\nn = 40\nk = 5\n")
    code, out, _ = run(capsys, "qsweep", "--config", str(cfg))
    assert code == 0 and [l.split(",")[0] for l in out.splitlines()] == ["group", "0.5", "0.75", "1"]
    # flags override the file
    code, out, _ = run(capsys, "qsweep", "--config", str(cfg), "--q-step", "0.5")
    assert [l.split(",")[0] for l in out.splitlines()] == ["group", "0.5", "1"]
    cfg.write_text("unknown = 3\n")
    assert run(capsys, "qsweep", "--config", str(cfg))[0] == 1
    assert run(capsys, "qsweep", "--config", str(tmp_path / "missing.cfg"))[0] == 1


def test_solver_failures_exit_two(monkeypatch, capsys):
    import driftmix.harness as harness
    from driftmix.structured_spectrum import SpectrumError

    def boom(arcs):
        raise SpectrumError("synthetic")

    monkeypatch.setattr(harness, "structured_rate", boom)
    code, _, err = run(capsys, "ring-check", "--n-grid", "64", "--trials", "5")
    assert code == 2 and "5 of 5" in err
    code, _, _ = run(capsys, "ring-check", "--n-grid", "64", "--trials", "5", "--max-failure-fraction", "1.0")
    assert code == 0


def test_ring_check_and_lemma_and_selftest(capsys):
    code, out, _ = run(capsys, "ring-check", "--n-grid", "64,100", "--trials", "5", "--format", "json")
    assert code == 0 and [r["n"] for r in json.loads(out)] == [64, 100]
    code, out, _ = run(capsys, "lemma-mc", "--trials", "300", "--instances", "5", "--z-points", "50")
    d = json.loads(out)
    assert code == 0 and d["real_axis"]["passed"] == 5
    code, out, _ = run(capsys, "selftest", "--trials", "40")
    assert code == 0 and out.startswith("PASS")
