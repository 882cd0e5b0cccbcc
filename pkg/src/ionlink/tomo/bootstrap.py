"""Parametric and non-parametric bootstrap error bars for tomography metrics.

Both functions accept either a single (state, table) pair or parallel
sequences of them (e.g. the four herald patterns). In the ensemble case the
metric receives the list of refitted states, so pattern-averaged figures of
merit get a single joint error bar.

``metric`` may also be a mapping ``{name: callable}``; all metrics are then
evaluated on the same refits and a dict of results is returned.

Every replicate draws from its own RNG stream spawned from ``seed``, so
results do not depend on evaluation order or thread count.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from ..errors import IonLinkError, NumericalError, ValidationError
from ..measure import MeasurementSetting
from .counts import CountTable
from .mle import LikelihoodModel, MleOptions, mle_rrr

log = logging.getLogger(__name__)

MAX_DROP_FRACTION = 0.10


@dataclass
class BootstrapResult:
    metric_name: str
    point_estimate: float
    sem: float
    replicates: np.ndarray
    dropped: int = 0

    def interval(self, level: float = 0.95) -> tuple:
        lo = 100 * (1 - level) / 2
        return tuple(np.percentile(self.replicates, [lo, 100 - lo]))

    def to_text(self) -> str:
        return (
            f"{self.metric_name}.estimate = {self.point_estimate:.12g}\n"
            f"{self.metric_name}.sem = {self.sem:.12g}\n"
            f"{self.metric_name}.replicates = {len(self.replicates)}\n"
            f"{self.metric_name}.dropped = {self.dropped}\n"
        )


def _as_list(x, kind):
    if isinstance(x, kind):
        return [x], True
    return list(x), False


def _setting_probabilities(rho, table: CountTable, settings) -> list:
    model = LikelihoodModel(table, settings)
    p = np.clip(model.probabilities(rho), 0.0, None)
    out = []
    for k in range(len(table.rows)):
        pk = p[model.owner == k]
        out.append(pk / pk.sum())
    return out


def _sample_table(table: CountTable, probs: list, rng: np.random.Generator) -> CountTable:
    rows = []
    for (label, counts), p in zip(table.rows, probs):
        rows.append((label, tuple(rng.multinomial(sum(counts), p))))
    return CountTable(tuple(rows))


def _run(
    tables: list,
    prob_sets: list,
    settings,
    B: int,
    metric: Callable,
    single: bool,
    seed,
    opts: MleOptions | None,
    threads: int,
    point: dict,
    name: str | None,
):
    if B < 2:
        raise ValidationError("bootstrap needs B >= 2")
    if metric is None:
        raise ValidationError("a metric function is required")
    funcs = _metric_map(metric, name)
    streams = np.random.SeedSequence(seed).spawn(B)

    def replicate(i):
        rng = np.random.default_rng(streams[i])
        fits = []
        for table, probs in zip(tables, prob_sets):
            synth = _sample_table(table, probs, rng)
            fits.append(mle_rrr(synth, settings, opts).rho)
        arg = fits[0] if single else fits
        return [float(f(arg)) for f in funcs.values()]

    def safe(i):
        try:
            return replicate(i)
        except IonLinkError as exc:
            log.warning("bootstrap replicate %d dropped: %s", i, exc)
            return None

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(safe, range(B)))
    else:
        values = [safe(i) for i in range(B)]
    kept = np.array([v for v in values if v is not None]).reshape(-1, len(funcs))
    dropped = B - len(kept)
    if dropped > MAX_DROP_FRACTION * B or len(kept) < 2:
        raise NumericalError(f"{dropped} of {B} bootstrap refits failed")
    out = {
        key: BootstrapResult(key, point[key], float(np.std(kept[:, j], ddof=1)), kept[:, j], dropped)
        for j, key in enumerate(funcs)
    }
    return out if isinstance(metric, Mapping) else out[next(iter(funcs))]


def _metric_map(metric, name: str | None) -> dict:
    if isinstance(metric, Mapping):
        return dict(metric)
    return {name or getattr(metric, "__name__", "metric"): metric}


def _point(metric, arg, name: str | None) -> dict:
    return {k: float(f(arg)) for k, f in _metric_map(metric, name).items()}


def bootstrap_parametric(
    rho_hat,
    settings: Sequence[MeasurementSetting],
    counts_plan,
    B: int = 1000,
    metric: Callable | Mapping = None,
    seed=0,
    opts: MleOptions | None = None,
    threads: int = 1,
    name: str | None = None,
) -> BootstrapResult:
    """Resample synthetic tables from the Born probabilities of ``rho_hat``.

    ``counts_plan`` supplies the per-setting totals (usually the observed
    table). Each synthetic table is refitted with ``mle_rrr``.
    """
    if metric is None:
        raise ValidationError("a metric function is required")
    plans, single = _as_list(counts_plan, CountTable)
    states = [rho_hat] if single else list(rho_hat)
    if len(states) != len(plans):
        raise ValidationError("need one fitted state per count table")
    prob_sets = [_setting_probabilities(r, t, settings) for r, t in zip(states, plans)]
    point = _point(metric, states[0] if single else states, name)
    return _run(plans, prob_sets, settings, B, metric, single, seed, opts, threads, point, name)


def bootstrap_nonparametric(
    table,
    settings: Sequence[MeasurementSetting],
    B: int = 1000,
    metric: Callable | Mapping = None,
    seed=0,
    opts: MleOptions | None = None,
    threads: int = 1,
    name: str | None = None,
) -> BootstrapResult:
    """Resample each setting's outcomes from the observed frequencies.

    The point estimate is the metric of the MLE fitted to the observed data.
    """
    if metric is None:
        raise ValidationError("a metric function is required")
    tables, single = _as_list(table, CountTable)
    prob_sets = []
    for t in tables:
        probs = []
        for _, counts in t.rows:
            c = np.asarray(counts, dtype=float)
            probs.append(c / c.sum() if c.sum() > 0 else np.full(c.size, 1.0 / c.size))
        prob_sets.append(probs)
    fits = [mle_rrr(t, settings, opts).rho for t in tables]
    point = _point(metric, fits[0] if single else fits, name)
    return _run(tables, prob_sets, settings, B, metric, single, seed, opts, threads, point, name)
