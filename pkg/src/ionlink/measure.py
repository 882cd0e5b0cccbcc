"""Measurement models for ion-ion and ion-photon tomography.

Ion qubits are analysed in Pauli bases. Photons are analysed with a
quarter-wave plate, a half-wave plate and a polarising beam splitter; the
photon passes the QWP first, then the HWP, then the polariser. Fast-axis
angles are measured from the polariser's transmission (H) axis.

A finite detection efficiency is represented by scaled click effects plus an
explicit no-click effect, so every setting stays a complete POVM.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .errors import ValidationError

PAULI_OUTCOMES = ("pp", "mp", "pm", "mm")
PAULI_BASIS_ORDER = ("ZZ", "ZX", "ZY", "XZ", "XX", "XY", "YZ", "YX", "YY")
NO_CLICK = "none"

QWP_ANGLES = (0.0, np.pi / 4)
HWP_ANGLES = (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8)


@dataclass(frozen=True)
class PovmEffect:
    operator: np.ndarray
    outcome_label: str

    def __post_init__(self):
        op = np.asarray(self.operator, dtype=complex)
        if not qcore.is_hermitian(op):
            raise ValidationError(f"effect {self.outcome_label!r} is not Hermitian")
        w = qcore.eigvalsh(op)
        if w[-1] < -1e-9 or w[0] > 1 + 1e-9:
            raise ValidationError(f"effect {self.outcome_label!r} has eigenvalues outside [0, 1]")
        op.setflags(write=False)
        object.__setattr__(self, "operator", op)


@dataclass(frozen=True)
class MeasurementSetting:
    setting_label: str
    effects: tuple = field(default_factory=tuple)

    def __post_init__(self):
        effects = tuple(self.effects)
        if not effects:
            raise ValidationError("a measurement setting needs at least one effect")
        object.__setattr__(self, "effects", effects)
        total = sum(e.operator for e in effects)
        if not qcore.allclose(total, np.eye(total.shape[0]), atol=1e-9):
            raise ValidationError(f"setting {self.setting_label!r} is not complete")

    @property
    def dim(self) -> int:
        return self.effects[0].operator.shape[0]

    @property
    def outcome_labels(self) -> tuple:
        return tuple(e.outcome_label for e in self.effects)

    def operators(self) -> np.ndarray:
        return np.array([e.operator for e in self.effects])

    def probabilities(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.array([qcore.expectation(rho, e.operator) for e in self.effects])


def _pauli_eigvecs(label: str):
    """(+1, -1) eigenvectors; for Z the +1 state is "down" (index 0)."""
    s = 1 / np.sqrt(2)
    if label == "Z":
        return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    if label == "X":
        return np.array([s, s], dtype=complex), np.array([s, -s], dtype=complex)
    if label == "Y":
        return np.array([s, 1j * s]), np.array([s, -1j * s])
    raise ValidationError(f"{label!r} is not a tomographic Pauli basis (use X, Y or Z)")


def pauli_projectors(label: str):
    plus, minus = _pauli_eigvecs(label)
    return qcore.projector(plus), qcore.projector(minus)


def pauli_setting(o_a: str, o_b: str) -> MeasurementSetting:
    """Four product projectors ordered (+A+B, -A+B, +A-B, -A-B)."""
    pa, ma = _pauli_eigvecs(o_a)
    pb, mb = _pauli_eigvecs(o_b)
    vecs = (np.kron(pa, pb), np.kron(ma, pb), np.kron(pa, mb), np.kron(ma, mb))
    effects = [PovmEffect(qcore.projector(v), lab) for v, lab in zip(vecs, PAULI_OUTCOMES)]
    return MeasurementSetting(o_a + o_b, effects)


def pauli_settings(order: Sequence[str] = PAULI_BASIS_ORDER) -> list:
    return [pauli_setting(lab[0], lab[1]) for lab in order]


@dataclass(frozen=True)
class WaveplateSpec:
    kind: str
    fast_axis_angle: float = 0.0
    retardance: float | None = None

    def __post_init__(self):
        if self.kind not in ("quarter", "half"):
            raise ValidationError(f"waveplate kind must be 'quarter' or 'half', not {self.kind!r}")
        if self.retardance is None:
            object.__setattr__(self, "retardance", np.pi / 2 if self.kind == "quarter" else np.pi)


def _rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def waveplate_jones(spec: WaveplateSpec) -> np.ndarray:
    """Jones matrix of a linear retarder, basis (H, V).

    The slow axis acquires phase ``exp(-i retardance)`` relative to the fast
    axis, so a QWP at 45 degrees turns H into (H + iV)/sqrt(2) up to phase.
    """
    core = np.diag([1.0, np.exp(-1j * spec.retardance)])
    return _rot(spec.fast_axis_angle) @ core @ _rot(-spec.fast_axis_angle)


def analyser_unitary(qwp: WaveplateSpec, hwp: WaveplateSpec, order: str = "qwp_first") -> np.ndarray:
    q, h = waveplate_jones(qwp), waveplate_jones(hwp)
    if order == "qwp_first":
        return h @ q
    if order == "hwp_first":
        return q @ h
    raise ValidationError(f"unknown waveplate order {order!r}")


def photon_analysis_setting(
    qwp: WaveplateSpec,
    hwp: WaveplateSpec,
    efficiency: float = 1.0,
    order: str = "qwp_first",
) -> MeasurementSetting:
    """Transmit/reflect clicks behind the polariser plus a no-click effect."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValidationError(f"efficiency {efficiency} outside [0, 1]")
    w = analyser_unitary(qwp, hwp, order)
    h = w.conj().T @ np.array([1, 0], dtype=complex)
    v = w.conj().T @ np.array([0, 1], dtype=complex)
    t = efficiency * qcore.projector(h)
    r = efficiency * qcore.projector(v)
    label = f"Q{qwp.fast_axis_angle:.6f}_H{hwp.fast_axis_angle:.6f}"
    return MeasurementSetting(
        label,
        [PovmEffect(t, "T"), PovmEffect(r, "R"), PovmEffect(np.eye(2) - t - r, NO_CLICK)],
    )


def ion_photon_settings(
    qwp_angles: Iterable[float] = QWP_ANGLES,
    hwp_angles: Iterable[float] = HWP_ANGLES,
    ion_bases: Iterable[str] = ("X", "Y", "Z"),
    efficiency: float = 1.0,
    qwp_retardance: float | None = None,
    hwp_retardance: float | None = None,
    order: str = "qwp_first",
) -> list:
    """Composite ion (x) photon settings on the 4-dim ``(ion, photon)`` space.

    Each setting has four click effects (ion +/- times photon T/R) and one
    no-click effect; the ion is only read out when the photon clicks.
    """
    qwp_angles, hwp_angles, ion_bases = list(qwp_angles), list(hwp_angles), list(ion_bases)
    if not (qwp_angles and hwp_angles and ion_bases):
        raise ValidationError("angle grids and ion bases must be non-empty")
    out = []
    for basis in ion_bases:
        ion_ops = pauli_projectors(basis)
        for qa, ha in product(qwp_angles, hwp_angles):
            ph = photon_analysis_setting(
                WaveplateSpec("quarter", qa, qwp_retardance),
                WaveplateSpec("half", ha, hwp_retardance),
                efficiency,
                order,
            )
            effects = []
            for pe in ph.effects[:2]:
                for sign, ion in zip("pm", ion_ops):
                    effects.append(PovmEffect(np.kron(ion, pe.operator), sign + pe.outcome_label))
            effects.append(PovmEffect(np.kron(np.eye(2), ph.effects[2].operator), NO_CLICK))
            out.append(MeasurementSetting(f"{basis}_{ph.setting_label}", effects))
    return out


def settings_to_text(settings: Sequence[MeasurementSetting], matrix_ref: str = "") -> str:
    """One ``setting_label,outcome_label[,matrix_ref]`` line per effect."""
    lines = []
    for s in settings:
        for k, e in enumerate(s.effects):
            ref = f",{matrix_ref}{s.setting_label}_{k}" if matrix_ref else ""
            lines.append(f"{s.setting_label},{e.outcome_label}{ref}")
    return "\n".join(lines) + "\n"
