"""Plain CSV data for external plotting."""
from __future__ import annotations

import numpy as np

from . import qcore
from .errors import ValidationError
from .measure import PAULI_OUTCOMES, pauli_setting
from .netsim.rates import attempt_histogram, sample_attempts_until_success
from .optics import curve_scan, curve_to_csv

PLOT_KINDS = ("histogram", "na_curves", "pauli_bars")
PAULI_BARS_HEADER = "pattern,operator,measured,predicted,lo95,hi95,total"
_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])  # pp, mp, pm, mm


def measured_correlator(counts) -> float:
    c = np.asarray(counts, dtype=float)
    if c.shape != (len(PAULI_OUTCOMES),) or c.sum() <= 0:
        raise ValidationError("need four outcome counts with a positive total")
    return float(_SIGNS @ c / c.sum())


def predicted_correlator(rho, operator: str) -> float:
    op = np.kron(qcore.pauli(operator[0]), qcore.pauli(operator[1]))
    return qcore.expectation(rho, op)


def pauli_bars(dataset, fits: dict, samples: int = 2000, seed=0) -> list:
    """Rows ``(pattern, operator, measured, predicted, lo95, hi95, total)``.

    The 95% band is that of the measured correlator under multinomial
    sampling from the fitted state at the observed setting total.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for key, table in dataset.pattern_tables.items():
        rho = fits[key].rho if hasattr(fits[key], "rho") else fits[key]
        for label, counts in table.rows:
            n = int(sum(counts))
            pred = predicted_correlator(rho, label)
            p = _outcome_probabilities(rho, label)
            draws = rng.multinomial(n, p, size=samples) @ _SIGNS / n
            lo, hi = np.percentile(draws, [2.5, 97.5])
            rows.append((key, label, measured_correlator(counts), pred, float(lo), float(hi), n))
    return rows


def _outcome_probabilities(rho, label: str) -> np.ndarray:
    p = np.clip(pauli_setting(label[0], label[1]).probabilities(rho), 0.0, None)
    return p / p.sum()


def pauli_bars_csv(rows) -> str:
    lines = [PAULI_BARS_HEADER]
    for key, op, meas, pred, lo, hi, n in rows:
        lines.append(f"{key},{op},{meas:.10g},{pred:.10g},{lo:.10g},{hi:.10g},{n}")
    return "\n".join(lines) + "\n"


def emit_plot_data(kind: str, inputs: dict) -> str:
    """CSV text for one plot.

    ``histogram``: ``attempts`` (array) or ``p``, ``seed``, ``n_draws``; optional ``n_bins``.
    ``na_curves``: ``na_grid``; optional ``quadrature_points``.
    ``pauli_bars``: ``dataset`` and ``fits``; optional ``seed``.
    """
    if kind == "histogram":
        n_bins = inputs.get("n_bins", 50)
        if "attempts" in inputs:
            return attempt_histogram(inputs["attempts"], n_bins).to_csv()
        _, hist = sample_attempts_until_success(inputs["p"], inputs.get("seed", 0),
                                                inputs.get("n_draws", 10_000), n_bins)
        return hist.to_csv()
    if kind == "na_curves":
        return curve_to_csv(curve_scan(inputs["na_grid"], inputs.get("quadrature_points", 256)))
    if kind == "pauli_bars":
        return pauli_bars_csv(pauli_bars(inputs["dataset"], inputs["fits"], seed=inputs.get("seed", 0)))
    raise ValidationError(f"unknown plot kind {kind!r}; expected one of {', '.join(PLOT_KINDS)}")
