import numpy as np
import pytest

from ionlink import qcore
from ionlink.errors import ValidationError
from ionlink.metrics import (
    MeritReport,
    concurrence,
    entanglement_of_formation,
    fidelity_to_pure,
    fully_entangled_fraction,
    nearest_bell_rotation,
    nearest_maximally_entangled,
)

BELLS = {k: qcore.projector(v) for k, v in qcore.BELL.items()}


def werner(p):
    return p * BELLS["psi_minus"] + (1 - p) * np.eye(4) / 4


def test_fidelity_to_pure_examples():
    assert fidelity_to_pure(BELLS["phi_plus"], qcore.BELL["phi_plus"]) == pytest.approx(1)
    for psi in qcore.BELL.values():
        assert fidelity_to_pure(np.eye(4) / 4, psi) == pytest.approx(0.25)
    assert fidelity_to_pure(BELLS["psi_minus"], qcore.BELL["psi_plus"]) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValidationError):
        fidelity_to_pure(np.eye(2) / 2, qcore.BELL["phi_plus"])


@pytest.mark.parametrize("name", list(qcore.BELL))
def test_bell_states_are_maximal(name):
    rho = BELLS[name]
    assert fully_entangled_fraction(rho) == pytest.approx(1, abs=1e-12)
    assert concurrence(rho) == pytest.approx(1, abs=1e-9)
    assert entanglement_of_formation(rho) == pytest.approx(1, abs=1e-9)


def test_mixed_and_product_states(rng):
    assert fully_entangled_fraction(np.eye(4) / 4) == pytest.approx(0.25)
    for _ in range(5):
        a = qcore.random_density(2, rng, rank=1)
        b = qcore.random_density(2, rng, rank=1)
        prod = np.kron(a, b)
        assert concurrence(prod) == pytest.approx(0, abs=1e-7)
        assert entanglement_of_formation(prod) == pytest.approx(0, abs=1e-9)


def test_werner_concurrence_closed_form():
    assert concurrence(werner(0.8)) == pytest.approx(0.7, abs=1e-10)
    for p in np.linspace(0, 1, 11):
        assert concurrence(werner(p)) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-9)
        assert fully_entangled_fraction(werner(p)) == pytest.approx((1 + 3 * p) / 4, abs=1e-12)


def test_eof_zero_iff_concurrence_zero(rng):
    for _ in range(30):
        rho = qcore.random_density(4, rng)
        c, e = concurrence(rho), entanglement_of_formation(rho)
        assert (c < 1e-9) == (e < 1e-9)
        report = MeritReport.from_state(rho)
        assert 0 <= report.fully_entangled_fraction <= 1 + 1e-9


def test_nearest_maximally_entangled_attains_fef(rng):
    rho = qcore.random_density(4, rng)
    psi = nearest_maximally_entangled(rho)
    assert fidelity_to_pure(rho, psi) == pytest.approx(fully_entangled_fraction(rho), abs=1e-12)
    c = psi.reshape(2, 2)
    assert np.allclose(c @ c.conj().T, np.eye(2) / 2, atol=1e-10)


def test_nearest_bell_rotation_examples(rng):
    res = nearest_bell_rotation(BELLS["psi_minus"], qcore.BELL["phi_plus"])
    assert res.overlap == pytest.approx(1, abs=1e-9)
    res = nearest_bell_rotation(BELLS["phi_plus"], qcore.BELL["phi_plus"])
    assert res.overlap == pytest.approx(1, abs=1e-9)
    for _ in range(5):
        rho = qcore.random_density(4, rng)
        res = nearest_bell_rotation(rho)
        assert res.overlap == pytest.approx(fully_entangled_fraction(rho), abs=1e-6)
        assert qcore.is_density(res.rho_rotated)
        for u in (res.u_local_a, res.u_local_b):
            assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_nearest_bell_rotation_rejects_non_maximal_target():
    with pytest.raises(ValidationError):
        nearest_bell_rotation(np.eye(4) / 4, np.array([1, 0, 0, 0]))


def test_merit_report_average_and_text():
    a = MeritReport.from_state(BELLS["phi_plus"])
    b = MeritReport.from_state(np.eye(4) / 4)
    avg = MeritReport.average([a, b])
    assert avg.fully_entangled_fraction == pytest.approx(0.625)
    assert "x.concurrence = " in avg.to_text("x.")
