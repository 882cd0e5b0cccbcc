"""End-to-end analysis of a herald-pattern dataset.

Each pattern is fitted independently, its figures of merit computed, and
optional bootstrap and posterior error bars attached. Averages are plain
arithmetic means over the patterns that fitted successfully.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .datasets import Dataset
from .errors import IonLinkError
from .measure import pauli_settings
from .metrics import MeritReport, entanglement_of_formation, fully_entangled_fraction
from .tomo import (
    ChainOptions,
    MleOptions,
    bayes_mh,
    bootstrap_nonparametric,
    bootstrap_parametric,
    format_count_table,
    mle_direct,
    mle_rrr,
)

log = logging.getLogger(__name__)

DEFAULT_SEED = 12345
METRICS = {
    "fully_entangled_fraction": fully_entangled_fraction,
    "entanglement_of_formation": entanglement_of_formation,
}


@dataclass(frozen=True)
class PipelineOptions:
    method: str = "rrr"
    bootstrap_samples: int = 0
    bootstrap_kind: str = "parametric"
    bayes_chain: ChainOptions | None = None
    seed: int = DEFAULT_SEED
    threads: int = 1
    mle: MleOptions = field(default_factory=MleOptions)


@dataclass
class RunReport:
    fits: dict
    merits: dict
    bootstrap: dict
    bayes: dict
    failures: dict
    options: PipelineOptions
    errors: dict = field(default_factory=dict)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    @property
    def average(self) -> MeritReport | None:
        return MeritReport.average(self.merits.values()) if self.merits else None

    def density(self, key: str) -> np.ndarray:
        return self.fits[key].rho

    def mean_pattern_sem(self, metric: str) -> float:
        """Average over patterns of the per-pattern bootstrap sem."""
        return float(np.mean([b[metric].sem for b in self.bootstrap.values()]))

    def average_sem(self, metric: str) -> float:
        """Bootstrap sem of the pattern-averaged metric (patterns resampled independently)."""
        reps = [b[metric].replicates for b in self.bootstrap.values()]
        n = min(len(r) for r in reps)
        return float(np.std(np.mean([r[:n] for r in reps], axis=0), ddof=1))

    def summary_text(self) -> str:
        lines = [f"patterns = {','.join(self.merits)}", f"partial = {str(self.partial).lower()}"]
        for key, msg in self.failures.items():
            lines.append(f"failed.{key} = {msg}")
        out = "\n".join(lines) + "\n"
        for key, m in self.merits.items():
            out += m.to_text(prefix=f"{key}.")
        if self.average is not None:
            out += self.average.to_text(prefix="average.")
        if self.bootstrap:
            for metric in METRICS:
                for key, b in self.bootstrap.items():
                    out += f"{key}.{metric}.sem = {b[metric].sem:.12g}\n"
                out += f"mean_pattern_sem.{metric} = {self.mean_pattern_sem(metric):.12g}\n"
                out += f"average_sem.{metric} = {self.average_sem(metric):.12g}\n"
        for key, post in self.bayes.items():
            out += post.to_text(name=f"{key}.fully_entangled_fraction")
        return out

    def write(self, out_dir: str, dataset: Dataset | None = None) -> None:
        os.makedirs(out_dir, exist_ok=True)
        for key, fit in self.fits.items():
            sub = os.path.join(out_dir, f"pattern_{key}")
            os.makedirs(sub, exist_ok=True)
            _write(os.path.join(sub, "rho.csv"), qcore.density_to_text(fit.rho))
            _write(os.path.join(sub, "diagnostics.txt"), fit.diagnostics_text())
            _write(os.path.join(sub, "metrics.txt"), self.merits[key].to_text())
            if key in self.bootstrap:
                _write(os.path.join(sub, "bootstrap.txt"),
                       "".join(b.to_text() for b in self.bootstrap[key].values()))
            if key in self.bayes:
                _write(os.path.join(sub, "bayes.txt"),
                       self.bayes[key].to_text("fully_entangled_fraction"))
            if dataset is not None:
                _write(os.path.join(sub, "counts.csv"), format_count_table(dataset.pattern_tables[key]))
        _write(os.path.join(out_dir, "report.txt"), self.summary_text())


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def run_pipeline(dataset: Dataset, options: PipelineOptions | None = None,
                 out_dir: str | None = None) -> RunReport:
    options = options or PipelineOptions()
    settings = pauli_settings()
    fit_fn = {"rrr": mle_rrr, "direct": mle_direct}.get(options.method)
    if fit_fn is None:
        raise ValueError(f"unknown fit method {options.method!r}")
    fits, merits, boots, bayes, failures, errors = {}, {}, {}, {}, {}, {}
    for k, (key, table) in enumerate(dataset.pattern_tables.items()):
        try:
            fit = fit_fn(table, settings, options.mle)
            fits[key] = fit
            merits[key] = MeritReport.from_state(fit.rho)
            if options.bootstrap_samples:
                seed = [options.seed, k]
                if options.bootstrap_kind == "parametric":
                    boots[key] = bootstrap_parametric(
                        fit.rho, settings, table, options.bootstrap_samples, METRICS, seed,
                        options.mle, options.threads)
                else:
                    boots[key] = bootstrap_nonparametric(
                        table, settings, options.bootstrap_samples, METRICS, seed,
                        options.mle, options.threads)
            if options.bayes_chain is not None:
                bayes[key] = bayes_mh(table, settings, options.bayes_chain,
                                      fully_entangled_fraction, [options.seed, k])
        except IonLinkError as exc:
            log.error("pattern %s failed: %s", key, exc)
            failures[key] = f"{type(exc).__name__}: {exc}"
            errors[key] = exc
            fits.pop(key, None)
            merits.pop(key, None)
            boots.pop(key, None)
    report = RunReport(fits, merits, boots, bayes, failures, options, errors)
    if out_dir is not None:
        report.write(out_dir, dataset)
    return report
