"""Maximum-likelihood state estimation from outcome counts.

Two independent routes are provided: the diluted fixed-point iteration
(``mle_rrr``) and direct maximisation over a Cholesky parameterisation
(``mle_direct``). They should agree to within optimiser tolerance.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .. import qcore
from ..errors import ConvergenceError, NumericalError, ValidationError
from ..measure import NO_CLICK, MeasurementSetting
from .counts import CountTable

log = logging.getLogger(__name__)

P_FLOOR = 1e-300


@dataclass(frozen=True)
class MleOptions:
    dilution_initial: float = 1.0
    tolerance: float = 1e-10
    max_iterations: int = 100_000
    dilution_floor: float = 1e-6
    seed_state: np.ndarray | None = None
    # mle_direct only
    n_starts: int = 4
    fit_efficiency: bool = False
    start_seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if not 0 < self.dilution_initial:
            raise ValidationError("dilution_initial must be positive")


@dataclass
class MleResult:
    rho: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    method: str
    gradient_norm: float = float("nan")
    efficiency: float | None = None
    loglik_trace: list = field(default_factory=list, repr=False)

    def diagnostics_text(self) -> str:
        lines = [
            f"method = {self.method}",
            f"iterations = {self.iterations}",
            f"final_log_likelihood = {self.log_likelihood:.12g}",
            f"converged = {str(self.converged).lower()}",
            f"gradient_norm = {self.gradient_norm:.6g}",
        ]
        if self.efficiency is not None:
            lines.append(f"efficiency = {self.efficiency:.12g}")
        return "\n".join(lines) + "\n"


class LikelihoodModel:
    """Flattened view of (counts, settings) for fast probability evaluation."""

    def __init__(self, table: CountTable, settings: Sequence[MeasurementSetting]):
        table.check_settings(settings)
        by_label = {s.setting_label: s for s in settings}
        ops, counts, owner, click = [], [], [], []
        for k, (label, row) in enumerate(table.rows):
            s = by_label[label]
            for e, n in zip(s.effects, row):
                ops.append(e.operator)
                counts.append(n)
                owner.append(k)
                click.append(e.outcome_label != NO_CLICK)
        self.dim = ops[0].shape[0]
        self.ops = np.array(ops)
        d2 = self.dim * self.dim
        # Tr(rho E) = sum_ij rho_ij E_ji
        self._a = self.ops.transpose(0, 2, 1).reshape(-1, d2)
        self._flat = self.ops.reshape(-1, d2)
        self.counts = np.array(counts, dtype=float)
        self.owner = np.array(owner)
        self.click = np.array(click)
        self.n_settings = len(table.rows)
        self.total = float(self.counts.sum())
        self.setting_totals = np.bincount(self.owner, weights=self.counts, minlength=self.n_settings)
        self._observed = self.counts > 0
        self.has_no_click = bool((~self.click).any())
        if self.has_no_click:
            # Nominal efficiency: click effects sum to eta * I in the ideal model.
            sums = np.zeros((self.n_settings, self.dim, self.dim), dtype=complex)
            np.add.at(sums, self.owner[self.click], self.ops[self.click])
            self.nominal_efficiency = float(np.mean(np.trace(sums, axis1=1, axis2=2).real) / self.dim)
        else:
            self.nominal_efficiency = 1.0

    def probabilities(self, rho, efficiency: float | None = None) -> np.ndarray:
        p = (self._a @ np.asarray(rho).ravel()).real
        if efficiency is not None and self.has_no_click:
            scale = efficiency / self.nominal_efficiency
            p = np.where(self.click, p * scale, 0.0)
            clicked = np.bincount(self.owner, weights=p, minlength=self.n_settings)
            p = np.where(self.click, p, 1.0 - clicked[self.owner])
        return p

    def loglik_from_p(self, p: np.ndarray) -> float:
        obs = self._observed
        if np.any(p[obs] < -1e-9):
            raise NumericalError("negative outcome probability for an observed outcome")
        return float(np.dot(self.counts[obs], np.log(np.maximum(p[obs], P_FLOOR))))

    def log_likelihood(self, rho, efficiency: float | None = None) -> float:
        p = self.probabilities(rho, efficiency)
        if np.any(p < -1e-9):
            raise NumericalError(f"negative outcome probability {p.min():.3e}")
        return self.loglik_from_p(p)

    def r_operator(self, p: np.ndarray) -> np.ndarray:
        """Likelihood-gradient operator; equals the identity at an interior optimum."""
        w = np.zeros_like(p)
        obs = self._observed
        w[obs] = self.counts[obs] / self.total / np.maximum(p[obs], P_FLOOR)
        return (w @ self._flat).reshape(self.dim, self.dim)


def log_likelihood(rho, table: CountTable, settings: Sequence[MeasurementSetting]) -> float:
    """Multinomial log-likelihood ``sum_j n_j ln Tr(rho E_j)`` (constant terms dropped)."""
    model = LikelihoodModel(table, settings)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (model.dim, model.dim):
        raise ValidationError(f"state dimension {rho.shape} does not match effects ({model.dim})")
    return model.log_likelihood(rho)


def mle_rrr(
    table: CountTable,
    settings: Sequence[MeasurementSetting],
    opts: MleOptions | None = None,
) -> MleResult:
    """Diluted fixed-point ("R rho R") maximum-likelihood estimate.

    Each step is ``rho <- N[(I + eps R) rho (I + eps R)]``. A step that lowers
    the likelihood is rejected and ``eps`` halved; ``eps`` never grows again.
    Iteration stops once the mean log-likelihood gain per step drops below
    ``opts.tolerance`` or ``eps`` falls below ``opts.dilution_floor``.
    """
    opts = opts or MleOptions()
    model = LikelihoodModel(table, settings)
    if model.total <= 0:
        raise ValidationError("count table is empty")
    d = model.dim
    eye = np.eye(d)
    if opts.seed_state is None:
        rho = qcore.maximally_mixed(d)
    else:
        rho = qcore.validate_density(opts.seed_state, dim=d).astype(complex)
    p = model.probabilities(rho)
    ll = model.loglik_from_p(p)
    trace = [ll]
    eps = opts.dilution_initial
    converged = False
    it = 0
    r = model.r_operator(p)
    for it in range(1, opts.max_iterations + 1):
        while True:
            m = eye + eps * r
            cand = qcore.normalize_trace(m @ rho @ m)
            p_c = model.probabilities(cand)
            ll_c = model.loglik_from_p(p_c)
            if ll_c >= ll:
                break
            eps *= 0.5
            if eps < opts.dilution_floor:
                break
        if eps < opts.dilution_floor:
            converged = True
            break
        gain = (ll_c - ll) / model.total
        rho, p, ll = cand, p_c, ll_c
        trace.append(ll)
        r = model.r_operator(p)
        if gain < opts.tolerance:
            converged = True
            break
    grad = float(np.linalg.norm((r - eye) @ rho))
    if not converged:
        raise ConvergenceError(
            f"R-rho-R iteration did not converge in {opts.max_iterations} iterations",
            best=rho,
            best_value=ll,
            gradient_norm=grad,
        )
    return MleResult(rho, ll, it, True, "rrr", grad, loglik_trace=trace)


def cholesky_to_density(params: np.ndarray, dim: int) -> np.ndarray:
    """Map ``dim**2`` reals to ``T^dag T / Tr(T^dag T)`` with ``T`` lower triangular."""
    t = np.zeros((dim, dim), dtype=complex)
    t[np.diag_indices(dim)] = params[:dim]
    il = np.tril_indices(dim, -1)
    k = len(il[0])
    t[il] = params[dim:dim + k] + 1j * params[dim + k:dim + 2 * k]
    m = t.conj().T @ t
    return m / np.trace(m).real


def density_to_cholesky(rho, dim: int) -> np.ndarray:
    """Approximate inverse of ``cholesky_to_density`` (regularised for rank deficiency)."""
    rho = np.asarray(rho, dtype=complex) + 1e-9 * np.eye(dim)
    # rho = T^dag T with T lower triangular: T^dag is upper triangular, so use
    # the Cholesky factor of the index-reversed matrix.
    j = np.eye(dim)[::-1]
    lower = np.linalg.cholesky(j @ rho @ j)
    t = (j @ lower @ j).conj().T
    il = np.tril_indices(dim, -1)
    phase = np.exp(-1j * np.angle(np.diag(t)))
    t = phase[:, None] * t
    return np.concatenate([np.diag(t).real, t[il].real, t[il].imag])


def _logit(x: float) -> float:
    return float(np.log(x / (1 - x)))


def _sigmoid(u: float) -> float:
    return float(1 / (1 + np.exp(-u)))


def mle_direct(
    table: CountTable,
    settings: Sequence[MeasurementSetting],
    opts: MleOptions | None = None,
) -> MleResult:
    """Direct likelihood maximisation over a Cholesky parameterisation.

    With ``opts.fit_efficiency`` and settings that carry a no-click effect, one
    extra parameter scales every click effect (an overall detection
    efficiency). Uses quasi-Newton ascent with finite-difference gradients
    from ``opts.n_starts`` deterministic starts and keeps the best.
    """
    opts = opts or MleOptions()
    model = LikelihoodModel(table, settings)
    if model.total <= 0:
        raise ValidationError("count table is empty")
    d = model.dim
    n_rho = d * d
    fit_eff = opts.fit_efficiency and model.has_no_click

    def unpack(x):
        rho = cholesky_to_density(x[:n_rho], d)
        eff = _sigmoid(x[n_rho]) if fit_eff else None
        return rho, eff

    def objective(x):
        rho, eff = unpack(x)
        p = model.probabilities(rho, eff)
        return -model.loglik_from_p(np.maximum(p, 0.0)) / model.total

    rng = np.random.default_rng(opts.start_seed)
    base = np.concatenate([np.ones(d), np.zeros(n_rho - d)])
    starts = [base]
    for _ in range(max(opts.n_starts, 1) - 1):
        starts.append(base + 0.5 * rng.standard_normal(n_rho))
    if opts.seed_state is not None:
        starts.insert(0, density_to_cholesky(opts.seed_state, d))
    ref_x = base
    if fit_eff:
        u0 = _logit(min(max(model.nominal_efficiency, 1e-6), 1 - 1e-6))
        starts = [np.append(s, u0) for s in starts]
        ref_x = np.append(base, u0)

    ref = objective(ref_x)
    best = None
    for x0 in starts:
        res = minimize(objective, x0, method="BFGS", options={"gtol": 1e-10, "maxiter": 20_000})
        log.debug("direct MLE start: f=%.12g nit=%d %s", res.fun, res.nit, res.message)
        if best is None or res.fun < best.fun:
            best = res
    if best.fun > ref + 1e-12:
        raise ConvergenceError(
            "direct likelihood maximisation never improved on the maximally mixed start",
            best=unpack(best.x)[0],
            best_value=-best.fun * model.total,
        )
    rho, eff = unpack(best.x)
    ll = model.log_likelihood(rho, eff)
    grad = float(np.linalg.norm(best.jac)) if best.jac is not None else float("nan")
    return MleResult(
        qcore.normalize_trace(rho), ll, int(best.nit), bool(best.success), "direct", grad, eff
    )
