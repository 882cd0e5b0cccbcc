"""State tomography: count tables, maximum-likelihood fits, error bars."""
from .counts import CountTable, format_count_table, parse_count_table, pauli_table
from .bayes import ChainOptions, PosteriorSample, bayes_mh
from .bootstrap import BootstrapResult, bootstrap_nonparametric, bootstrap_parametric
from .mle import LikelihoodModel, MleOptions, MleResult, log_likelihood, mle_direct, mle_rrr

__all__ = [
    "BootstrapResult",
    "ChainOptions",
    "PosteriorSample",
    "bayes_mh",
    "bootstrap_nonparametric",
    "bootstrap_parametric",
    "CountTable",
    "LikelihoodModel",
    "MleOptions",
    "MleResult",
    "format_count_table",
    "log_likelihood",
    "mle_direct",
    "mle_rrr",
    "parse_count_table",
    "pauli_table",
]
