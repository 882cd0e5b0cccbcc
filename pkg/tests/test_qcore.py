import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ionlink import qcore
from ionlink.errors import NumericalError, ParseError, ValidationError

PHI_PLUS = qcore.projector(qcore.BELL["phi_plus"])
PSI_MINUS = qcore.projector(qcore.BELL["psi_minus"])


def test_eigh_pauli_z():
    w, v = qcore.eigh(qcore.pauli("Z"))
    assert np.allclose(w, [1, -1])
    assert np.allclose(np.abs(v), np.eye(2))


def test_eigh_identity_and_bell_projector():
    w, _ = qcore.eigh(np.eye(4))
    assert np.allclose(w, 1)
    w, v = qcore.eigh(PHI_PLUS)
    assert np.allclose(w, [1, 0, 0, 0], atol=1e-12)
    assert abs(abs(np.vdot(v[:, 0], qcore.BELL["phi_plus"])) - 1) < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        qcore.eigh(np.array([[0, 1], [0, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 4, 16]))
def test_eigh_matches_reference(seed, dim):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + a.conj().T
    w, v = qcore.eigh(h)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.allclose(w, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)
    assert np.allclose(h @ v, v * w, atol=1e-9)


def test_tensor_examples():
    assert np.allclose(qcore.tensor(np.eye(2), np.eye(2)), np.eye(4))
    zz = qcore.tensor(qcore.pauli("Z"), qcore.pauli("Z"))
    assert np.allclose(np.diag(zz), [1, -1, -1, 1])
    assert qcore.tensor(qcore.pauli("X"), qcore.pauli("Y"))[0, 3] == -1j


def test_partial_trace_examples(rng):
    assert np.allclose(qcore.partial_trace(PHI_PLUS, keep=[0], dims=[2, 2]), np.eye(2) / 2)
    ra, rb = qcore.random_density(2, rng), qcore.random_density(2, rng)
    assert np.allclose(qcore.partial_trace(np.kron(ra, rb), keep=[0], dims=[2, 2]), ra)
    assert np.allclose(qcore.partial_trace(np.kron(ra, rb), keep=[1], dims=[2, 2]), rb)
    r4 = qcore.random_density(4, rng)
    assert abs(np.trace(qcore.partial_trace(r4, keep=[1], dims=[2, 2])) - 1) < 1e-10
    with pytest.raises(ValidationError):
        qcore.partial_trace(r4, keep=[0], dims=[2, 3])


def test_permute_subsystems_roundtrip(rng):
    a, b, c = (qcore.random_density(2, rng) for _ in range(3))
    rho = qcore.tensor(a, b, c)
    assert np.allclose(qcore.permute_subsystems(rho, [2, 0, 1], [2, 2, 2]), qcore.tensor(c, a, b))


def test_matrix_sqrt_psd(rng):
    assert np.allclose(qcore.matrix_sqrt_psd(np.eye(3)), np.eye(3))
    assert np.allclose(qcore.matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    m = qcore.random_density(4, rng)
    s = qcore.matrix_sqrt_psd(m)
    assert np.max(np.abs(s @ s - m)) < 1e-8
    with pytest.raises(ValidationError):
        qcore.matrix_sqrt_psd(np.diag([1.0, -1e-6]))


def test_expectation_examples():
    zz = qcore.tensor(qcore.pauli("Z"), qcore.pauli("Z"))
    xx = qcore.tensor(qcore.pauli("X"), qcore.pauli("X"))
    assert qcore.expectation(np.eye(4) / 4, zz) == pytest.approx(0)
    assert qcore.expectation(PHI_PLUS, xx) == pytest.approx(1)
    assert qcore.expectation(PSI_MINUS, zz) == pytest.approx(-1)
    with pytest.raises(NumericalError):
        qcore.expectation(np.eye(2) / 2, np.diag([1j, 0]))


def test_density_validation():
    assert qcore.is_density(PHI_PLUS)
    assert not qcore.is_density(np.diag([1.2, -0.2]))
    assert not qcore.is_density(np.diag([0.6, 0.6]))
    with pytest.raises(ValidationError):
        qcore.validate_density(np.eye(4) / 4, dim=2)
    with pytest.raises(ValidationError):
        qcore.pure_state([1, 1])


def test_pauli_matrices():
    for k in "XYZ":
        p = qcore.pauli(k)
        assert np.allclose(p @ p.conj().T, np.eye(2))
        assert qcore.is_hermitian(p)
        assert abs(np.trace(p)) < 1e-15


def test_density_text_roundtrip(rng):
    rho = qcore.random_density(4, rng)
    assert np.array_equal(qcore.density_from_text(qcore.density_to_text(rho)), rho)
    with pytest.raises(ParseError, match="line"):
        qcore.density_from_text("row,col,re,im\n0,0,oops,0\n")


def test_trace_distance():
    assert qcore.trace_distance(PHI_PLUS, PSI_MINUS) == pytest.approx(1)
    assert qcore.trace_distance(PHI_PLUS, PHI_PLUS) == pytest.approx(0, abs=1e-12)
