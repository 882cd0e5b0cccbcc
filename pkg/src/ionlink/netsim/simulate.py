"""Synthetic heralded-tomography runs shaped like the measured tables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import qcore
from ..errors import ValidationError
from ..measure import PAULI_BASIS_ORDER, pauli_settings
from ..tomo.counts import CountTable


@dataclass(frozen=True)
class SchedulePlan:
    """``sweeps`` passes through a random permutation of ``bases``, each
    basis held for ``heralds_per_setting`` heralds per pass."""

    bases: tuple = PAULI_BASIS_ORDER
    heralds_per_setting: int = 1000
    sweeps: int = 4

    def __post_init__(self):
        if self.heralds_per_setting < 1 or self.sweeps < 1:
            raise ValidationError("heralds_per_setting and sweeps must be positive")
        unknown = set(self.bases) - set(PAULI_BASIS_ORDER)
        if unknown:
            raise ValidationError(f"unknown bases {sorted(unknown)}")

    @property
    def total_heralds(self) -> int:
        return len(self.bases) * self.heralds_per_setting * self.sweeps


@dataclass
class SimulationResult:
    tables: dict
    attempts: np.ndarray
    schedule: list
    pattern_of_herald: np.ndarray

    @property
    def total_heralds(self) -> int:
        return int(self.attempts.size)

    def attempts_csv(self) -> str:
        return "attempts\n" + "\n".join(str(int(a)) for a in self.attempts) + "\n"


def simulate_experiment(
    rho_per_pattern: Mapping[str, np.ndarray],
    plan: SchedulePlan | None = None,
    seed=0,
    pattern_weights: Sequence[float] | None = None,
    p_success: float = 2.2e-4,
) -> SimulationResult:
    """Draw a full heralded tomography run.

    Each herald is assigned a pattern with probability proportional to
    ``pattern_weights`` (equal by default), then a Pauli outcome by the Born
    rule for the setting scheduled at that moment. The attempts preceding
    every herald are geometric with ``p_success``.
    """
    plan = plan or SchedulePlan()
    names = list(rho_per_pattern)
    if not names:
        raise ValidationError("need at least one herald pattern")
    states = [qcore.validate_density(rho_per_pattern[n], 4) for n in names]
    if pattern_weights is None:
        w = np.full(len(names), 1.0 / len(names))
    else:
        w = np.asarray(pattern_weights, dtype=float)
        if w.shape != (len(names),) or np.any(w < 0) or w.sum() <= 0:
            raise ValidationError("pattern_weights must be non-negative, one per pattern")
        w = w / w.sum()
    if not 0 < p_success <= 1:
        raise ValidationError("p_success must lie in (0, 1]")

    settings = {s.setting_label: s for s in pauli_settings()}
    born = {}
    for b in plan.bases:
        for k, rho in enumerate(states):
            p = np.clip(settings[b].probabilities(rho), 0.0, None)
            born[(b, k)] = p / p.sum()

    rng = np.random.default_rng(seed)
    counts = {(b, k): np.zeros(4, dtype=np.int64) for b in plan.bases for k in range(len(names))}
    schedule = []
    pattern_of_herald = []
    for _ in range(plan.sweeps):
        order = rng.permutation(len(plan.bases))
        for i in order:
            b = plan.bases[i]
            schedule.append(b)
            pat = rng.choice(len(names), size=plan.heralds_per_setting, p=w)
            pattern_of_herald.append(pat)
            for k in range(len(names)):
                n_k = int(np.count_nonzero(pat == k))
                counts[(b, k)] += rng.multinomial(n_k, born[(b, k)])
    attempts = rng.geometric(p_success, size=plan.total_heralds)
    tables = {
        n: CountTable(tuple((b, tuple(counts[(b, k)])) for b in plan.bases))
        for k, n in enumerate(names)
    }
    return SimulationResult(tables, attempts, schedule, np.concatenate(pattern_of_herald))
