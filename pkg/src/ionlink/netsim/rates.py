"""Attempt-loop timing, heralding probability and waiting-time statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .params import NodeParams, ProtocolTiming


def success_probability(node_a: NodeParams, node_b: NodeParams) -> float:
    """Probability that one attempt heralds entanglement.

    Half of the two-photon coincidences are resolvable Bell states.
    """
    return 0.5 * node_a.photon_detection_probability * node_b.photon_detection_probability


def effective_attempt_rate(t: ProtocolTiming) -> float:
    return t.attempts_per_loop / (t.attempts_per_loop * t.attempt_period + t.cooling_duration)


def entanglement_rate(p_success: float, attempt_rate: float) -> float:
    if p_success < 0 or attempt_rate < 0:
        raise ValidationError("success probability and attempt rate must be non-negative")
    return p_success * attempt_rate


@dataclass
class AttemptHistogram:
    edges: np.ndarray
    counts: np.ndarray

    def to_csv(self) -> str:
        lines = ["bin_start,bin_end,count"]
        for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            lines.append(f"{lo:.0f},{hi:.0f},{c}")
        return "\n".join(lines) + "\n"


def attempt_histogram(draws, n_bins: int = 50, max_attempts: float | None = None) -> AttemptHistogram:
    """Linear bins starting at one attempt (plotted on a log count axis)."""
    draws = np.asarray(draws)
    top = max_attempts if max_attempts is not None else float(draws.max())
    edges = np.linspace(1.0, max(top, 2.0) + 1.0, n_bins + 1)
    counts, _ = np.histogram(draws, bins=edges)
    return AttemptHistogram(edges, counts)


def sample_attempts_until_success(p: float, seed=0, n_draws: int = 10_000, n_bins: int = 50):
    """Geometric attempt counts (support >= 1) and their histogram."""
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"success probability {p} outside (0, 1]")
    if n_draws < 1:
        raise ValidationError("n_draws must be positive")
    draws = np.random.default_rng(seed).geometric(p, size=n_draws)
    return draws, attempt_histogram(draws, n_bins)
