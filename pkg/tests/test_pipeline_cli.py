import os

import numpy as np
import pytest

from ionlink import qcore
from ionlink.cli import main
from ionlink.datasets import builtin_dataset, dataset_from_tables
from ionlink.errors import ValidationError
from ionlink.pipeline import PipelineOptions, run_pipeline
from ionlink.plotdata import emit_plot_data, measured_correlator, pauli_bars
from ionlink.tomo import CountTable, format_count_table


def test_builtin_totals(dataset):
    totals = {k: t.total_clicks for k, t in dataset.pattern_tables.items()}
    assert totals == {"a": 8884, "b": 9082, "c": 8512, "d": 9522}
    assert dataset.grand_total == 36_000
    assert dataset.patterns["a"].detectors == frozenset({"APD0", "APD2"})


def test_zz_anticorrelation(dataset):
    pp, mp, pm, mm = dataset.pattern_tables["a"].counts("ZZ")
    assert (mp + pm) / (pp + mp + pm + mm) == pytest.approx(0.986, abs=1e-3)
    assert measured_correlator((pp, mp, pm, mm)) == pytest.approx(-0.972, abs=1e-3)


def test_report_averages(report):
    assert not report.partial
    avg = report.average
    assert avg.fully_entangled_fraction == pytest.approx(0.940, abs=0.010)
    assert avg.entanglement_of_formation == pytest.approx(0.838, abs=0.030)
    fefs = [m.fully_entangled_fraction for m in report.merits.values()]
    assert avg.fully_entangled_fraction == pytest.approx(np.mean(fefs), abs=1e-15)
    for fit in report.fits.values():
        assert qcore.is_density(fit.rho)


def test_pipeline_deterministic_with_bootstrap(dataset):
    opts = PipelineOptions(bootstrap_samples=4, seed=7)
    a = run_pipeline(dataset, opts)
    b = run_pipeline(dataset, opts)
    assert a.summary_text() == b.summary_text()
    assert a.mean_pattern_sem("fully_entangled_fraction") > 0


def test_partial_report_names_failing_pattern(dataset):
    good = dict(dataset.pattern_tables)
    good["b"] = CountTable(tuple((lab, (0, 0, 0, 0)) for lab in good["b"].labels))
    report = run_pipeline(dataset_from_tables(good), PipelineOptions())
    assert report.partial and "b" in report.failures
    assert set(report.merits) == {"a", "c", "d"}


def test_dataset_validation(dataset):
    with pytest.raises(ValidationError):
        dataset_from_tables({"zz": dataset.pattern_tables["a"]})


def test_pauli_bars_within_band(dataset, report):
    rows = pauli_bars(dataset, report.fits, seed=1)
    assert len(rows) == 36
    inside = sum(lo <= meas <= hi for _, _, meas, _, lo, hi, _ in rows)
    assert inside >= 0.95 * 36


def test_plot_kinds(dataset, report):
    assert len(emit_plot_data("na_curves", {"na_grid": [0.2, 0.4], "quadrature_points": 64}).splitlines()) == 3
    hist = emit_plot_data("histogram", {"p": 2.18e-4, "seed": 0, "n_draws": 20_000})
    counts = [int(line.split(",")[2]) for line in hist.splitlines()[1:]]
    assert counts[0] > counts[len(counts) // 2] > counts[-1]
    bars = emit_plot_data("pauli_bars", {"dataset": dataset, "fits": report.fits})
    assert bars.splitlines()[0] == "pattern,operator,measured,predicted,lo95,hi95,total"
    with pytest.raises(ValidationError):
        emit_plot_data("pie", {})


def test_cli_fit_and_metrics(tmp_path, capsys):
    assert main(["fit", "--builtin", "a", "--out-dir", str(tmp_path)]) == 0
    assert "fully_entangled_fraction" in capsys.readouterr().out
    assert main(["metrics", "--rho", str(tmp_path / "rho.csv")]) == 0
    assert "concurrence" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("basis_a,basis_b,pp,mp,pm,mm\nZ,Z,x,1,1,1\n")
    assert main(["fit", "--counts", str(bad)]) == 1
    assert main(["fit", "--counts", str(tmp_path / "missing.csv")]) == 1
    empty = tmp_path / "empty.csv"
    empty.write_text("basis_a,basis_b,pp,mp,pm,mm\n" + "".join(
        f"{a},{b},0,0,0,0\n" for a in "ZXY" for b in "ZXY"))
    assert main(["fit", "--counts", str(empty)]) == 1
    counts = tmp_path / "a.csv"
    counts.write_text(format_count_table(builtin_dataset().pattern_tables["a"]))
    assert main(["report", "--counts", f"a={counts}", f"b={empty}"]) == 1
    capsys.readouterr()


def test_cli_numerical_failure_exit_code(capsys):
    assert main(["fit", "--builtin", "a", "--max-iterations", "3"]) == 2
    assert main(["report", "--max-iterations", "3"]) == 2
    capsys.readouterr()


def test_cli_simulate_and_optics(tmp_path, capsys):
    cfg = tmp_path / "link.cfg"
    cfg.write_text("dark_rate_per_detector = 60\nmode_overlap = 0.99\n")
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(cfg), "--seed", "1", "--heralds-per-setting", "50",
                 "--out-dir", str(out)]) == 0
    assert sorted(os.listdir(out)) == ["attempts.csv", "histogram.csv", "pattern_a", "pattern_b",
                                      "pattern_c", "pattern_d", "summary.txt"]
    assert len((out / "attempts.csv").read_text().splitlines()) == 1 + 9 * 50 * 4
    assert "attempt_rate = 833333" in (out / "summary.txt").read_text()
    assert main(["optics-curve", "--na", "0.3", "--quadrature-points", "64"]) == 0
    assert main(["report", "--out-dir", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "pattern_d" / "rho.csv").exists()
    assert (tmp_path / "rep" / "pauli_bars.csv").exists()
    capsys.readouterr()


def test_cli_bootstrap_and_bayes(capsys):
    assert main(["bootstrap", "--builtin", "b", "-B", "3", "--seed", "1"]) == 0
    assert "fully_entangled_fraction.sem" in capsys.readouterr().out
    assert main(["bayes", "--builtin", "b", "--chain-length", "3000", "--burn-in", "1000"]) == 0
    assert "posterior_mean" in capsys.readouterr().out
