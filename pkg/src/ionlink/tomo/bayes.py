"""Metropolis-Hastings sampling of the tomography posterior.

The state is ``rho = G G^dag / Tr(G G^dag)`` for a complex ``d x d`` matrix
``G`` whose ``2 d^2`` real components have a standard normal prior; this
induces the Hilbert-Schmidt (uniform) prior on density matrices. Proposals
are isotropic Gaussian random-walk moves on all components.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ConvergenceError, ValidationError
from ..measure import MeasurementSetting
from .counts import CountTable
from .mle import LikelihoodModel

TARGET_ACCEPTANCE = (0.2, 0.4)


@dataclass(frozen=True)
class ChainOptions:
    chain_length: int = 200_000
    burn_in: int = 20_000
    thinning: int = 10
    initial_step: float = 0.05
    tune_interval: int = 500

    def __post_init__(self):
        if self.chain_length <= self.burn_in:
            raise ValidationError("chain_length must exceed burn_in")
        if self.thinning < 1:
            raise ValidationError("thinning must be at least 1")


@dataclass
class PosteriorSample:
    samples: np.ndarray
    acceptance_rate: float
    chain_length: int
    burn_in: int
    thinning: int
    step_size: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1))

    def credible_interval(self, level: float) -> tuple:
        lo = 100 * (1 - level) / 2
        return tuple(float(x) for x in np.percentile(self.samples, [lo, 100 - lo]))

    def mc_error(self, n_batches: int = 20) -> float:
        """Batch-means Monte Carlo standard error of the posterior mean."""
        batches = np.array_split(self.samples, n_batches)
        means = np.array([b.mean() for b in batches if b.size])
        return float(np.std(means, ddof=1) / np.sqrt(len(means)))

    def to_text(self, name: str = "metric") -> str:
        lo68, hi68 = self.credible_interval(0.68)
        lo95, hi95 = self.credible_interval(0.95)
        return (
            f"{name}.posterior_mean = {self.mean:.12g}\n"
            f"{name}.posterior_std = {self.std:.12g}\n"
            f"{name}.ci68 = {lo68:.12g},{hi68:.12g}\n"
            f"{name}.ci95 = {lo95:.12g},{hi95:.12g}\n"
            f"acceptance_rate = {self.acceptance_rate:.6g}\n"
            f"samples = {len(self.samples)}\n"
        )


def _to_rho(g: np.ndarray, d: int) -> np.ndarray:
    z = g[: d * d].reshape(d, d) + 1j * g[d * d:].reshape(d, d)
    m = z @ z.conj().T
    return m / np.trace(m).real


def bayes_mh(
    table: CountTable,
    settings: Sequence[MeasurementSetting],
    chain: ChainOptions | None = None,
    metric: Callable | None = None,
    seed=0,
) -> PosteriorSample:
    """Sample ``metric(rho)`` under the posterior for ``table``.

    The step size is adapted during burn-in only, towards an acceptance rate
    in [0.2, 0.4]; the reported acceptance rate covers the post-burn-in part.
    """
    chain = chain or ChainOptions()
    if metric is None:
        raise ValidationError("a metric function is required")
    model = LikelihoodModel(table, settings)
    d = model.dim
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(2 * d * d)

    def log_post(x):
        p = model.probabilities(_to_rho(x, d))
        return model.loglik_from_p(np.maximum(p, 0.0)) - 0.5 * float(x @ x)

    lp = log_post(g)
    step = chain.initial_step
    accepted_window = 0
    accepted_after = 0
    out = []
    for i in range(chain.chain_length):
        prop = g + step * rng.standard_normal(g.size)
        lp_prop = log_post(prop)
        if np.log(rng.random()) < lp_prop - lp:
            g, lp = prop, lp_prop
            accepted_window += 1
            if i >= chain.burn_in:
                accepted_after += 1
        if i < chain.burn_in and (i + 1) % chain.tune_interval == 0:
            rate = accepted_window / chain.tune_interval
            if rate < TARGET_ACCEPTANCE[0]:
                step *= 0.7 if rate > 0.05 else 0.3
            elif rate > TARGET_ACCEPTANCE[1]:
                step *= 1.4
            accepted_window = 0
        if i >= chain.burn_in and (i - chain.burn_in) % chain.thinning == 0:
            out.append(float(metric(_to_rho(g, d))))
    rate = accepted_after / (chain.chain_length - chain.burn_in)
    if rate < 0.01:
        raise ConvergenceError(f"acceptance rate {rate:.4f} after tuning is too low", best_value=rate)
    return PosteriorSample(
        np.array(out), rate, chain.chain_length, chain.burn_in, chain.thinning, step
    )
