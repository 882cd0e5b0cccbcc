"""Command-line entry point.

Exit codes: 0 on success, 1 for invalid input, 2 for numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import qcore
from .datasets import PATTERN_KEYS, builtin_dataset, dataset_from_tables
from .errors import NumericalError, ValidationError
from .measure import pauli_settings
from .metrics import MeritReport, fully_entangled_fraction
from .netsim import (
    LinkConfig,
    effective_attempt_rate,
    entanglement_rate,
    heralded_state,
    parse_config,
    simulate_experiment,
    success_probability,
)
from .netsim.simulate import SchedulePlan
from .optics import curve_scan, curve_to_csv
from .pipeline import DEFAULT_SEED, METRICS, PipelineOptions, run_pipeline
from .plotdata import emit_plot_data
from .tomo import (
    ChainOptions,
    MleOptions,
    bayes_mh,
    bootstrap_nonparametric,
    bootstrap_parametric,
    format_count_table,
    mle_direct,
    mle_rrr,
    parse_count_table,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _table(args):
    if args.counts:
        return parse_count_table(_read(args.counts))
    return builtin_dataset().pattern_tables[args.builtin]


def _add_table_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--counts", help="count table CSV")
    src.add_argument("--builtin", choices=PATTERN_KEYS, default="a",
                     help="built-in herald pattern table (default: a)")


def cmd_fit(args) -> str:
    table = _table(args)
    opts = MleOptions(max_iterations=args.max_iterations)
    fit = (mle_direct if args.method == "direct" else mle_rrr)(table, pauli_settings(), opts)
    out = fit.diagnostics_text() + MeritReport.from_state(fit.rho).to_text()
    if args.out_dir:
        _write(os.path.join(args.out_dir, "rho.csv"), qcore.density_to_text(fit.rho))
        _write(os.path.join(args.out_dir, "diagnostics.txt"), fit.diagnostics_text())
    return out


def cmd_bootstrap(args) -> str:
    table = _table(args)
    settings = pauli_settings()
    if args.kind == "parametric":
        rho = mle_rrr(table, settings).rho
        res = bootstrap_parametric(rho, settings, table, args.samples, METRICS, args.seed,
                                   MleOptions(), args.threads)
    else:
        res = bootstrap_nonparametric(table, settings, args.samples, METRICS, args.seed,
                                      MleOptions(), args.threads)
    return "".join(r.to_text() for r in res.values())


def cmd_bayes(args) -> str:
    chain = ChainOptions(args.chain_length, args.burn_in, args.thinning)
    post = bayes_mh(_table(args), pauli_settings(), chain, fully_entangled_fraction, args.seed)
    return post.to_text("fully_entangled_fraction") + f"mc_error = {post.mc_error():.6g}\n"


def cmd_metrics(args) -> str:
    rho = qcore.density_from_text(_read(args.rho))
    return MeritReport.from_state(rho).to_text()


def cmd_simulate(args) -> str:
    cfg = parse_config(_read(args.config)) if args.config else LinkConfig()
    outcome = heralded_state(None, None, cfg.analyser, cfg.alice, cfg.bob, cfg.timing)
    states = dict(zip(PATTERN_KEYS, (h.rho for h in outcome.patterns)))
    weights = outcome.pattern_probabilities()
    p_herald = float(weights.sum())
    plan = SchedulePlan(heralds_per_setting=args.heralds_per_setting, sweeps=args.sweeps)
    sim = simulate_experiment(states, plan, args.seed, weights, p_herald)
    rate = effective_attempt_rate(cfg.timing)
    p_model = success_probability(cfg.alice, cfg.bob)
    summary = (
        f"success_probability = {p_model:.12g}\n"
        f"herald_probability_with_dark_counts = {p_herald:.12g}\n"
        f"attempt_rate = {rate:.12g}\n"
        f"entanglement_rate = {entanglement_rate(p_model, rate):.12g}\n"
        f"heralds = {sim.total_heralds}\n"
        f"mean_attempts = {float(np.mean(sim.attempts)):.12g}\n"
    )
    for h, key in zip(outcome.patterns, PATTERN_KEYS):
        summary += f"{key}.detectors = {h.pattern.name}\n{key}.fidelity = {h.fidelity(cfg.analyser.bell_phase):.12g}\n"
    if args.out_dir:
        for key, table in sim.tables.items():
            _write(os.path.join(args.out_dir, f"pattern_{key}", "counts.csv"), format_count_table(table))
        _write(os.path.join(args.out_dir, "attempts.csv"), sim.attempts_csv())
        _write(os.path.join(args.out_dir, "histogram.csv"),
               emit_plot_data("histogram", {"attempts": sim.attempts}))
        _write(os.path.join(args.out_dir, "summary.txt"), summary)
    return summary


def cmd_optics_curve(args) -> str:
    grid = args.na if args.na else np.linspace(args.na_min, args.na_max, args.points)
    text = curve_to_csv(curve_scan(grid, args.quadrature_points))
    if args.out:
        _write(args.out, text)
    return text


def cmd_report(args) -> str:
    if args.counts:
        tables = {}
        for item in args.counts:
            key, sep, path = item.partition("=")
            if not sep:
                raise ValidationError(f"--counts expects KEY=PATH, got {item!r}")
            tables[key] = parse_count_table(_read(path))
        dataset = dataset_from_tables(tables, provenance="command line")
    else:
        dataset = builtin_dataset()
    chain = ChainOptions(args.chain_length, args.burn_in) if args.bayes else None
    opts = PipelineOptions(method=args.method, bootstrap_samples=args.bootstrap,
                           bootstrap_kind=args.kind, bayes_chain=chain, seed=args.seed,
                           threads=args.threads, mle=MleOptions(max_iterations=args.max_iterations))
    report = run_pipeline(dataset, opts, args.out_dir)
    if args.out_dir:
        _write(os.path.join(args.out_dir, "pauli_bars.csv"),
               emit_plot_data("pauli_bars", {"dataset": dataset, "fits": report.fits, "seed": args.seed}))
    if report.partial:
        print(report.summary_text(), end="")
        key, exc = next(iter(report.errors.items()))
        kind = ValidationError if isinstance(exc, ValidationError) else NumericalError
        raise kind(f"pattern {key} failed: {exc}")
    return report.summary_text()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionlink", description="Heralded ion-ion link analysis")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for resampling")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum-likelihood fit of one count table")
    _add_table_args(p)
    p.add_argument("--method", choices=("rrr", "direct"), default="rrr")
    p.add_argument("--max-iterations", type=int, default=MleOptions.max_iterations)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bootstrap", help="bootstrap error bars for one count table")
    _add_table_args(p)
    p.add_argument("--samples", "-B", type=int, default=1000)
    p.add_argument("--kind", choices=("parametric", "nonparametric"), default="parametric")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("bayes", help="posterior sampling of the fully entangled fraction")
    _add_table_args(p)
    p.add_argument("--chain-length", type=int, default=200_000)
    p.add_argument("--burn-in", type=int, default=20_000)
    p.add_argument("--thinning", type=int, default=10)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_bayes)

    p = sub.add_parser("metrics", help="figures of merit of a density-matrix CSV")
    p.add_argument("--rho", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="synthetic heralded tomography run")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--heralds-per-setting", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=4)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optics-curve", help="collection efficiency and fidelity versus NA")
    p.add_argument("--na", type=float, nargs="+")
    p.add_argument("--na-min", type=float, default=0.05)
    p.add_argument("--na-max", type=float, default=0.9)
    p.add_argument("--points", type=int, default=18)
    p.add_argument("--quadrature-points", type=int, default=256)
    p.add_argument("--out")
    p.set_defaults(func=cmd_optics_curve)

    p = sub.add_parser("report", help="full analysis of all herald patterns")
    p.add_argument("--counts", nargs="+", metavar="KEY=PATH",
                   help="count tables per pattern (default: built-in dataset)")
    p.add_argument("--method", choices=("rrr", "direct"), default="rrr")
    p.add_argument("--max-iterations", type=int, default=MleOptions.max_iterations)
    p.add_argument("--bootstrap", type=int, default=0, metavar="B")
    p.add_argument("--kind", choices=("parametric", "nonparametric"), default="parametric")
    p.add_argument("--bayes", action="store_true")
    p.add_argument("--chain-length", type=int, default=200_000)
    p.add_argument("--burn-in", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        print(args.func(args), end="")
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
