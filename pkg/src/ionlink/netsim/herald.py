"""Bell-state analyser forward model.

Photon polarisations use ``H = 0, V = 1``; the photonic Bell states are
``Psi+- = (|HV> +- |VH>)/sqrt(2)`` in (photon A, photon B) order. Partially
distinguishable photons (mode overlap ``v``) herald with the effect
``E = v |Psi><Psi| + (1 - v)(|HV><HV| + |VH><VH|)/2``, shared equally by the
two detector pairs that herald the same Bell label.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import qcore
from ..errors import NumericalError
from .params import DETECTOR_PORTS, INVALID, AnalyserParams, HeraldPattern, NodeParams, ProtocolTiming

_S2 = 1 / np.sqrt(2)
PHOTON_BELL = {
    "psi_plus": np.array([0, _S2, _S2, 0], dtype=complex),
    "psi_minus": np.array([0, _S2, -_S2, 0], dtype=complex),
}
MIN_HERALD_PROBABILITY = 1e-15


def ideal_ion_photon_state() -> np.ndarray:
    """(|down H> + |up V>)/sqrt(2) as a density matrix."""
    return qcore.projector(qcore.BELL["phi_plus"])


def target_ion_state(label: str, phase: float = 0.0) -> np.ndarray:
    """Ion-ion Bell state with ``phase`` applied to ion A's down component."""
    psi = qcore.BELL[label] * np.array([np.exp(1j * phase), np.exp(1j * phase), 1, 1])
    return psi


def herald_classify(clicks, ap: AnalyserParams | None = None) -> str:
    ap = ap or AnalyserParams()
    clicks = frozenset(clicks)
    if len(clicks) != 2:
        return INVALID
    return ap.herald_map.get(clicks, INVALID)


def herald_effect(label: str, mode_overlap: float) -> np.ndarray:
    classical = np.diag([0.0, 0.5, 0.5, 0.0]).astype(complex)
    return mode_overlap * qcore.projector(PHOTON_BELL[label]) + (1 - mode_overlap) * classical


def phase_flip(rho: np.ndarray, p: float, qubit: int) -> np.ndarray:
    z = [np.eye(2), np.eye(2)]
    z[qubit] = qcore.pauli("Z")
    zz = np.kron(*z)
    return (1 - p) * rho + p * zz @ rho @ zz


def depolarize(rho: np.ndarray, lam: float, qubit: int) -> np.ndarray:
    """Single-qubit depolarising channel with replacement probability ``lam``."""
    other = 1 - qubit
    reduced = qcore.partial_trace(rho, keep=[other], dims=[2, 2])
    mixed = np.kron(np.eye(2) / 2, reduced) if qubit == 0 else np.kron(reduced, np.eye(2) / 2)
    return (1 - lam) * rho + lam * mixed


def apply_memory_errors(rho: np.ndarray, node_a: NodeParams, node_b: NodeParams) -> np.ndarray:
    """Dephasing then per-pulse rotation error on each ion.

    A depolarising strength of ``4 e / 3`` gives infidelity ``e`` against a
    pure state, so ``rotation_error_per_pulse`` is the per-pulse infidelity.
    """
    for q, node in ((0, node_a), (1, node_b)):
        rho = phase_flip(rho, node.dephasing_error, q)
        lam = 4 * node.rotation_error_per_pulse / 3
        for _ in range(node.pulses_per_analysis):
            rho = depolarize(rho, lam, q)
    return rho


def _pattern_weight(p: HeraldPattern, ap: AnalyserParams) -> float:
    a, b = sorted(p.detectors)
    return ap.efficiency(a) * ap.efficiency(b)


@dataclass
class HeraldedPattern:
    pattern: HeraldPattern
    rho: np.ndarray
    probability: float
    true_probability: float
    dark_probability: float

    def fidelity(self, phase: float = 0.0) -> float:
        target = qcore.projector(target_ion_state(self.pattern.bell_label, phase))
        return qcore.expectation(self.rho, target)


@dataclass
class HeraldOutcome:
    patterns: tuple
    invalid_probability: float
    total_probability: float

    def by_name(self) -> dict:
        return {h.pattern.name: h for h in self.patterns}

    def pattern_probabilities(self) -> np.ndarray:
        return np.array([h.probability for h in self.patterns])


def heralded_state(
    rho_a=None,
    rho_b=None,
    ap: AnalyserParams | None = None,
    node_a: NodeParams | None = None,
    node_b: NodeParams | None = None,
    timing: ProtocolTiming | None = None,
) -> HeraldOutcome:
    """Ion-ion states and probabilities for each herald pattern of one attempt.

    ``rho_a``/``rho_b`` are ion-photon states in (ion, photon) order, given
    that a photon was emitted; ``None`` means the ideal state. Probabilities
    are per attempt. Dark-count false heralds (one real photon plus one dark
    click on the partner detector) add an uncorrelated admixture.
    """
    ap = ap or AnalyserParams()
    node_a = node_a or NodeParams()
    node_b = node_b or NodeParams()
    timing = timing or ProtocolTiming()
    rho_a = ideal_ion_photon_state() if rho_a is None else qcore.validate_density(rho_a, 4)
    rho_b = ideal_ion_photon_state() if rho_b is None else qcore.validate_density(rho_b, 4)

    pa = node_a.photon_detection_probability
    pb = node_b.photon_detection_probability
    two_photon = pa * pb
    # (ionA, photonA, ionB, photonB) -> (ionA, ionB, photonA, photonB)
    joint = qcore.permute_subsystems(np.kron(rho_a, rho_b), [0, 2, 1, 3], [2, 2, 2, 2])
    phase = np.diag([np.exp(1j * ap.bell_phase), 1.0])
    u_phase = np.kron(phase, np.eye(2))
    ion_a = qcore.partial_trace(rho_a, keep=[0], dims=[2, 2])
    ion_b = qcore.partial_trace(rho_b, keep=[0], dims=[2, 2])
    uncorrelated = apply_memory_errors(np.kron(ion_a, ion_b), node_a, node_b)

    results = []
    for pat in ap.patterns():
        effect = herald_effect(pat.bell_label, ap.mode_overlap) / 2
        m = np.kron(np.eye(4), effect)
        cond = qcore.partial_trace(m @ joint, keep=[0, 1], dims=[2, 2, 2, 2])
        cond = (cond + cond.conj().T) / 2
        p_true = two_photon * _pattern_weight(pat, ap) * float(np.trace(cond).real)
        ions = apply_memory_errors(u_phase @ cond @ u_phase.conj().T, node_a, node_b)
        # One real photon lands on either detector of the pair (1/4 each) and
        # the partner dark-counts within the window.
        q = 0.5 * (node_a.dark_rate_per_detector + node_b.dark_rate_per_detector) * timing.detection_window
        eff_sum = sum(ap.efficiency(d) for d in pat.detectors)
        p_dark = 0.25 * (pa + pb) * eff_sum * q
        p_total = p_true + p_dark
        if p_total < MIN_HERALD_PROBABILITY:
            raise NumericalError(f"herald probability for {pat.name} is degenerate ({p_total:.3e})")
        tr = float(np.trace(ions).real)
        mixed = (p_true * ions / tr if tr > 0 else 0) + p_dark * uncorrelated
        rho = qcore.normalize_trace((mixed + np.conj(mixed).T) / 2)
        results.append(HeraldedPattern(pat, rho, p_total, p_true, p_dark))
    dark_total = sum(h.dark_probability for h in results)
    total = two_photon + dark_total
    valid = sum(h.probability for h in results)
    return HeraldOutcome(tuple(results), total - valid, total)


def detector_port(detector: str) -> tuple:
    return DETECTOR_PORTS[detector]
