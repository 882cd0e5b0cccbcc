"""Measured ion-ion tomography counts for the four herald patterns.

Outcome columns are (+A+B, -A+B, +A-B, -A-B); for Z, "+" is taken as the
down state, which makes the ZZ rows anticorrelated as expected for Psi
states. Flipping that convention only relabels local bases.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

from .errors import ValidationError
from .measure import PAULI_BASIS_ORDER
from .netsim.params import AnalyserParams, HeraldPattern
from .tomo.counts import CountTable, parse_count_table

PATTERN_KEYS = ("a", "b", "c", "d")
DECLARED_TOTALS = MappingProxyType({"a": 8884, "b": 9082, "c": 8512, "d": 9522})

_TABLES = {
    "a": """\
basis_a,basis_b,pp,mp,pm,mm
Z,Z,4,424,564,10
Z,X,255,217,297,194
Z,Y,283,218,316,193
X,Z,212,222,271,263
X,X,259,236,227,289
X,Y,28,463,477,26
Y,Z,178,213,288,285
Y,X,424,32,32,524
Y,Y,249,223,193,295
""",
    "b": """\
basis_a,basis_b,pp,mp,pm,mm
Z,Z,3,533,425,11
Z,X,210,256,233,287
Z,Y,204,294,232,252
X,Z,263,278,235,231
X,X,273,239,228,332
X,Y,38,508,425,26
Y,Z,254,280,267,250
Y,X,451,30,27,495
Y,Y,287,233,180,312
""",
    "c": """\
basis_a,basis_b,pp,mp,pm,mm
Z,Z,1,449,459,18
Z,X,206,259,249,236
Z,Y,247,260,224,185
X,Z,234,237,260,251
X,X,224,250,257,192
X,Y,467,28,30,399
Y,Z,221,249,220,263
Y,X,21,441,450,36
Y,Y,227,301,259,202
""",
    "d": """\
basis_a,basis_b,pp,mp,pm,mm
Z,Z,5,531,544,19
Z,X,270,321,292,218
Z,Y,271,278,309,234
X,Z,262,236,282,263
X,X,221,264,295,214
X,Y,535,21,29,500
Y,Z,240,261,242,289
Y,X,20,511,482,24
Y,Y,240,305,267,227
""",
}


@dataclass(frozen=True)
class Dataset:
    pattern_tables: MappingProxyType
    patterns: MappingProxyType
    provenance: str
    declared_totals: MappingProxyType | None = None

    def __post_init__(self):
        if set(self.pattern_tables) != set(self.patterns):
            raise ValidationError("every table needs a herald pattern")
        for key, table in self.pattern_tables.items():
            if table.labels != PAULI_BASIS_ORDER:
                raise ValidationError(f"pattern {key}: rows must be the nine Pauli settings in order")
            if self.declared_totals is not None and table.total_clicks != self.declared_totals[key]:
                raise ValidationError(
                    f"pattern {key}: {table.total_clicks} clicks, declared {self.declared_totals[key]}"
                )

    @property
    def keys(self) -> tuple:
        return tuple(self.pattern_tables)

    @property
    def grand_total(self) -> int:
        return sum(t.total_clicks for t in self.pattern_tables.values())


def default_patterns(ap: AnalyserParams | None = None) -> dict:
    return dict(zip(PATTERN_KEYS, (ap or AnalyserParams()).patterns()))


def builtin_dataset() -> Dataset:
    tables = {k: parse_count_table(_TABLES[k]) for k in PATTERN_KEYS}
    return Dataset(
        MappingProxyType(tables),
        MappingProxyType(default_patterns()),
        "measured ion-ion Pauli tomography, 36000 heralded states",
        DECLARED_TOTALS,
    )


def dataset_from_tables(tables: dict, provenance: str = "user", patterns: dict | None = None) -> Dataset:
    """Wrap ``{key: CountTable}``; keys a-d pick up the default herald patterns."""
    pats = patterns or {}
    defaults = default_patterns()
    resolved = {}
    for k in tables:
        if k in pats:
            resolved[k] = pats[k]
        elif k in defaults:
            resolved[k] = defaults[k]
        else:
            raise ValidationError(f"no herald pattern known for table {k!r}")
    return Dataset(MappingProxyType(dict(tables)), MappingProxyType(resolved), provenance)


def builtin_table_text(key: str) -> str:
    return _TABLES[key]


__all__ = ["Dataset", "HeraldPattern", "CountTable", "builtin_dataset", "dataset_from_tables"]
