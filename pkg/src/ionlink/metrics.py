"""Entanglement figures of merit for two-qubit states.

The "fidelity" quoted for heralded ion-ion states is the fully entangled
fraction: the largest overlap of the state with any maximally entangled
state. ``fully_entangled_fraction`` computes it in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qcore
from .errors import ConvergenceError, ValidationError

# Columns are the magic-basis vectors. Maximally entangled states have real
# coordinates (up to a global phase) in this basis.
MAGIC_BASIS = np.array(
    [
        [1, 0, 0, 1],
        [1j, 0, 0, -1j],
        [0, 1j, 1j, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
).T / np.sqrt(2)

# Ion-photon target (|down H> + |up V>)/sqrt(2).
BELL_DEFAULT = qcore.BELL["phi_plus"]

SPECTRUM_FLOOR = 1e-14

_YY = np.kron(qcore.PAULI["Y"], qcore.PAULI["Y"])


@dataclass(frozen=True)
class MeritReport:
    fully_entangled_fraction: float
    concurrence: float
    entanglement_of_formation: float

    def __post_init__(self):
        for name in ("fully_entangled_fraction", "concurrence", "entanglement_of_formation"):
            v = getattr(self, name)
            if not -1e-9 <= v <= 1 + 1e-9:
                raise ValidationError(f"{name}={v} outside [0, 1]")

    @classmethod
    def from_state(cls, rho) -> "MeritReport":
        c = concurrence(rho)
        return cls(fully_entangled_fraction(rho), c, eof_from_concurrence(c))

    @classmethod
    def average(cls, reports) -> "MeritReport":
        reports = list(reports)
        return cls(
            float(np.mean([r.fully_entangled_fraction for r in reports])),
            float(np.mean([r.concurrence for r in reports])),
            float(np.mean([r.entanglement_of_formation for r in reports])),
        )

    def to_text(self, prefix: str = "") -> str:
        return "".join(
            f"{prefix}{k} = {getattr(self, k):.12g}\n"
            for k in ("fully_entangled_fraction", "concurrence", "entanglement_of_formation")
        )


def _two_qubit(rho) -> np.ndarray:
    return qcore.validate_density(rho, dim=4)


def fidelity_to_pure(rho, psi) -> float:
    rho = np.asarray(rho, dtype=complex)
    psi = qcore.pure_state(psi)
    if rho.shape != (psi.size, psi.size):
        raise ValidationError(f"state dimension {rho.shape} does not match vector length {psi.size}")
    return float(np.real(psi.conj() @ rho @ psi))


def fully_entangled_fraction(rho) -> float:
    rho = _two_qubit(rho)
    rm = MAGIC_BASIS.conj().T @ rho @ MAGIC_BASIS
    return float(qcore.eigvalsh(rm.real.astype(complex))[0])


def nearest_maximally_entangled(rho) -> np.ndarray:
    """The maximally entangled state attaining the fully entangled fraction."""
    rho = _two_qubit(rho)
    rm = MAGIC_BASIS.conj().T @ rho @ MAGIC_BASIS
    _, v = qcore.eigh(rm.real.astype(complex))
    x = v[:, 0].real
    x /= np.linalg.norm(x)
    return MAGIC_BASIS @ x


def spin_flip(rho) -> np.ndarray:
    return _YY @ np.conj(rho) @ _YY


def concurrence(rho) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    rho = _two_qubit(rho)
    s = qcore.matrix_sqrt_psd(rho)
    m = s @ spin_flip(rho) @ s
    w = qcore.eigvalsh(0.5 * (m + m.conj().T))
    # Rounding leaves ~1e-17 in exact zeros, which the square root would
    # inflate to ~1e-9.
    w = np.where(w > SPECTRUM_FLOOR * max(w[0], 1.0), w, 0.0)
    lam = np.sqrt(w)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x: float) -> float:
    if x <= 1e-15 or x >= 1 - 1e-15:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 * (1 + np.sqrt(1 - c * c)))


def entanglement_of_formation(rho) -> float:
    return eof_from_concurrence(concurrence(rho))


def merit_report(rho) -> MeritReport:
    return MeritReport.from_state(rho)


def euler_unitary(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Z-Y-Z Euler rotation ``Rz(alpha) Ry(beta) Rz(gamma)``."""
    def rz(t):
        return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])

    c, s = np.cos(beta / 2), np.sin(beta / 2)
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    return rz(alpha) @ ry @ rz(gamma)


def _unitary_to_euler(u: np.ndarray) -> np.ndarray:
    """Z-Y-Z angles of a 2x2 unitary, global phase discarded."""
    u = u / np.sqrt(np.linalg.det(u))
    beta = 2 * np.arctan2(abs(u[1, 0]), abs(u[0, 0]))
    s = np.angle(u[1, 1]) if abs(u[1, 1]) > 1e-12 else 0.0
    d = np.angle(u[1, 0]) if abs(u[1, 0]) > 1e-12 else 0.0
    # u11 = e^{i(a+g)/2} cos(b/2), u10 = e^{i(a-g)/2} sin(b/2)
    return np.array([s + d, beta, s - d])


@dataclass(frozen=True)
class BellRotation:
    u_local_a: np.ndarray
    u_local_b: np.ndarray
    rho_rotated: np.ndarray
    overlap: float


def nearest_bell_rotation(rho, target=None, n_starts: int = 8) -> BellRotation:
    """Local unitaries maximising the overlap of ``rho`` with ``target``.

    Each local unitary is parameterised by Z-Y-Z Euler angles. The ascent
    runs from a closed-form start (mapping the nearest maximally entangled
    state onto ``target``) and ``n_starts`` deterministic random starts.
    """
    rho = _two_qubit(rho)
    target = qcore.pure_state(BELL_DEFAULT if target is None else target)
    c_t = target.reshape(2, 2)
    if not qcore.allclose(c_t @ c_t.conj().T, np.eye(2) / 2, atol=1e-9):
        raise ValidationError("target state is not maximally entangled")

    def rotated(x):
        u = np.kron(euler_unitary(*x[:3]), euler_unitary(*x[3:]))
        return u @ rho @ u.conj().T

    def neg_overlap(x):
        return -float(np.real(target.conj() @ rotated(x) @ target))

    # (I (x) W) acting on coefficient matrix C gives C W^T.
    c_best = nearest_maximally_entangled(rho).reshape(2, 2)
    w = (2 * c_best.conj().T @ c_t).T
    starts = [np.concatenate([np.zeros(3), _unitary_to_euler(w)])]
    rng = np.random.default_rng(20200512)
    starts += [rng.uniform(0, 2 * np.pi, 6) for _ in range(n_starts)]

    fef = fully_entangled_fraction(rho)
    best = None
    for x0 in starts:
        res = minimize(neg_overlap, x0, method="BFGS", options={"gtol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    overlap = -best.fun
    if abs(overlap - fef) > 1e-6:
        raise ConvergenceError(
            f"local rotation reached overlap {overlap:.8f}, expected {fef:.8f}",
            best=best.x,
            best_value=overlap,
        )
    ua, ub = euler_unitary(*best.x[:3]), euler_unitary(*best.x[3:])
    return BellRotation(ua, ub, qcore.normalize_trace(rotated(best.x)), overlap)
