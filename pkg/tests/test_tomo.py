import numpy as np
import pytest

from ionlink import qcore
from ionlink.errors import ConvergenceError, NumericalError, ParseError, ValidationError
from ionlink.measure import ion_photon_settings, pauli_setting
from ionlink.metrics import fidelity_to_pure, fully_entangled_fraction
from ionlink.tomo import (
    CountTable,
    MleOptions,
    format_count_table,
    log_likelihood,
    mle_direct,
    mle_rrr,
    parse_count_table,
    pauli_table,
)
from ionlink.tomo.mle import cholesky_to_density, density_to_cholesky

PHI_PLUS = qcore.projector(qcore.BELL["phi_plus"])


def exact_table(rho, settings, n=1_000_000):
    rows = []
    for s in settings:
        p = np.clip(s.probabilities(rho), 0, None)
        rows.append((s.setting_label, tuple(np.rint(n * p / p.sum()).astype(int))))
    return CountTable(tuple(rows))


def test_parse_rows(dataset):
    text = "basis_a,basis_b,pp,mp,pm,mm\n" + "\n".join(
        f"{lab[0]},{lab[1]},1,2,3,4" for lab in dataset.pattern_tables["a"].labels)
    table = parse_count_table(text)
    assert table.counts("ZZ").tolist() == [1, 2, 3, 4]
    assert dataset.pattern_tables["a"].counts("ZZ").tolist() == [4, 424, 564, 10]
    assert dataset.pattern_tables["c"].counts("ZZ").tolist() == [1, 449, 459, 18]


def test_parse_errors(dataset):
    good = format_count_table(dataset.pattern_tables["a"]).splitlines()
    bad = good.copy()
    bad[1] = "Z,Z,-1,0,0,0"
    with pytest.raises(ParseError, match="line 2"):
        parse_count_table("\n".join(bad))
    bad[1] = "Z,Z,1.5,0,0,0"
    with pytest.raises(ParseError):
        parse_count_table("\n".join(bad))
    bad[1] = "Z,Z,1,2,3"
    with pytest.raises(ParseError, match="line 2"):
        parse_count_table("\n".join(bad))
    swapped = [good[0], good[2], good[1]] + good[3:]
    with pytest.raises(ValidationError, match="order"):
        parse_count_table("\n".join(swapped))
    with pytest.raises(ParseError):
        parse_count_table("a,b\n")


def test_table_roundtrip(dataset):
    for t in dataset.pattern_tables.values():
        assert parse_count_table(format_count_table(t)) == t


def test_count_table_validation():
    with pytest.raises(ValidationError):
        CountTable((("ZZ", (1, -1, 0, 0)),))
    with pytest.raises(ValidationError):
        CountTable((("ZZ", (1, 0, 0, 0)), ("ZZ", (1, 0, 0, 0))))
    with pytest.raises(ValidationError):
        pauli_table(np.zeros((8, 4)))
    t = pauli_table(np.ones((9, 4), dtype=int))
    assert t.total_clicks == 36


def test_log_likelihood_examples(dataset, settings):
    zz = pauli_setting("Z", "Z")
    certain = CountTable((("ZZ", (0, 7, 0, 0)),))
    rho = np.zeros((4, 4))
    rho[2, 2] = 1  # up-down: "-" on A, "+" on B
    assert log_likelihood(rho, certain, [zz]) == pytest.approx(0.0)
    table = dataset.pattern_tables["a"]
    mixed = log_likelihood(np.eye(4) / 4, table, settings)
    assert mixed == pytest.approx(table.total_clicks * np.log(0.25))
    fit = mle_rrr(table, settings)
    assert fit.log_likelihood >= mixed
    with pytest.raises(ValidationError):
        log_likelihood(np.eye(2) / 2, table, settings)
    with pytest.raises(ValidationError):
        log_likelihood(np.eye(4) / 4, table, settings[:3])


def test_negative_probability_is_numerical_error(dataset, settings):
    bad = np.diag([1.2, -0.2, 0, 0]).astype(complex)
    with pytest.raises(NumericalError):
        log_likelihood(bad, dataset.pattern_tables["a"], settings)


def test_rrr_noiseless_bell(settings):
    fit = mle_rrr(exact_table(PHI_PLUS, settings), settings)
    assert fidelity_to_pure(fit.rho, qcore.BELL["phi_plus"]) >= 1 - 1e-6
    assert np.all(np.diff(fit.loglik_trace) >= -1e-9)


def test_rrr_single_setting_matches_frequencies():
    zz = pauli_setting("Z", "Z")
    table = CountTable((("ZZ", (10, 400, 550, 40)),))
    fit = mle_rrr(table, [zz])
    freq = np.array(table.counts("ZZ")) / 1000
    assert np.allclose(zz.probabilities(fit.rho), freq, atol=1e-6)


def test_rrr_max_iterations_raises(dataset, settings):
    with pytest.raises(ConvergenceError) as info:
        mle_rrr(dataset.pattern_tables["a"], settings, MleOptions(max_iterations=3))
    assert info.value.best is not None
    assert np.isfinite(info.value.gradient_norm)


def test_rrr_empty_table(settings):
    empty = CountTable(tuple((s.setting_label, (0, 0, 0, 0)) for s in settings))
    with pytest.raises(ValidationError):
        mle_rrr(empty, settings)


def test_direct_noiseless_and_agreement(dataset, settings):
    fit = mle_direct(exact_table(PHI_PLUS, settings), settings)
    assert fidelity_to_pure(fit.rho, qcore.BELL["phi_plus"]) >= 1 - 1e-5
    table = dataset.pattern_tables["a"]
    d = mle_direct(table, settings)
    r = mle_rrr(table, settings)
    assert qcore.trace_distance(d.rho, r.rho) < 1e-3
    assert abs(d.log_likelihood - r.log_likelihood) < 1e-3


def test_direct_recovers_efficiency():
    rng = np.random.default_rng(5)
    rho = 0.95 * PHI_PLUS + 0.05 * np.eye(4) / 4
    settings = ion_photon_settings(efficiency=0.021)
    rows = []
    for s in settings:
        p = np.clip(s.probabilities(rho), 0, None)
        rows.append((s.setting_label, tuple(rng.multinomial(25_000, p / p.sum()))))
    fit = mle_direct(CountTable(tuple(rows)), settings, MleOptions(fit_efficiency=True))
    assert fit.efficiency == pytest.approx(0.021, abs=0.002)
    assert fully_entangled_fraction(fit.rho) == pytest.approx(fully_entangled_fraction(rho), abs=0.02)


def test_cholesky_roundtrip(rng):
    rho = qcore.random_density(4, rng)
    back = cholesky_to_density(density_to_cholesky(rho, 4), 4)
    assert qcore.trace_distance(rho, back) < 1e-7


def test_options_validation():
    with pytest.raises(ValidationError):
        MleOptions(tolerance=0)
    with pytest.raises(ValidationError):
        MleOptions(max_iterations=0)


def test_diagnostics_text(dataset, settings):
    text = mle_rrr(dataset.pattern_tables["b"], settings).diagnostics_text()
    assert "converged = true" in text and "iterations = " in text
