"""Outcome-count tables and their CSV form."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import ParseError, ValidationError
from ..measure import PAULI_BASIS_ORDER, PAULI_OUTCOMES, MeasurementSetting

PAULI_HEADER = "basis_a,basis_b," + ",".join(PAULI_OUTCOMES)


@dataclass(frozen=True)
class CountTable:
    """Observed counts, one row per measurement setting.

    ``rows`` pairs each setting label with a tuple of non-negative integer
    counts, one per outcome of that setting (in the setting's effect order).
    """

    rows: tuple

    def __post_init__(self):
        clean = []
        for label, counts in self.rows:
            arr = np.asarray(counts)
            if arr.ndim != 1 or arr.size == 0:
                raise ValidationError(f"row {label!r}: counts must be a non-empty vector")
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValidationError(f"row {label!r}: counts must be integers")
            if np.any(arr < 0):
                raise ValidationError(f"row {label!r}: counts must be non-negative")
            clean.append((str(label), tuple(int(c) for c in arr)))
        labels = [lab for lab, _ in clean]
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate setting labels in count table")
        object.__setattr__(self, "rows", tuple(clean))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Sequence[int]]) -> "CountTable":
        return cls(tuple(data.items()))

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.rows)

    @property
    def total_clicks(self) -> int:
        return sum(sum(c) for _, c in self.rows)

    def setting_totals(self) -> np.ndarray:
        return np.array([sum(c) for _, c in self.rows], dtype=np.int64)

    def counts(self, label: str) -> np.ndarray:
        for lab, c in self.rows:
            if lab == label:
                return np.array(c, dtype=np.int64)
        raise KeyError(label)

    def as_array(self) -> np.ndarray:
        """Counts as a 2-D array; only valid when every row has equal length."""
        lengths = {len(c) for _, c in self.rows}
        if len(lengths) != 1:
            raise ValidationError("rows have different numbers of outcomes")
        return np.array([c for _, c in self.rows], dtype=np.int64)

    def check_settings(self, settings: Sequence[MeasurementSetting]) -> None:
        by_label = {s.setting_label: s for s in settings}
        for lab, c in self.rows:
            if lab not in by_label:
                raise ValidationError(f"count row {lab!r} has no matching measurement setting")
            if len(c) != len(by_label[lab].effects):
                raise ValidationError(
                    f"row {lab!r} has {len(c)} outcomes, setting has {len(by_label[lab].effects)}"
                )


def pauli_table(counts, order: Sequence[str] = PAULI_BASIS_ORDER) -> CountTable:
    """Build a two-qubit Pauli table from a (9, 4) array in basis order."""
    counts = np.asarray(counts)
    if counts.shape != (len(order), 4):
        raise ValidationError(f"expected shape ({len(order)}, 4), got {counts.shape}")
    return CountTable(tuple(zip(order, map(tuple, counts))))


def parse_count_table(text: str) -> CountTable:
    """Parse the nine-row Pauli CSV (header ``basis_a,basis_b,pp,mp,pm,mm``)."""
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValidationError("empty count table")
    lineno, header = lines[0]
    if header.replace(" ", "") != PAULI_HEADER:
        raise ParseError(f"line {lineno}: header must be {PAULI_HEADER!r}")
    rows = []
    for lineno, line in lines[1:]:
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 6:
            raise ParseError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        a, b = parts[0].upper(), parts[1].upper()
        counts = []
        for p in parts[2:]:
            if not p.isdigit():
                raise ParseError(f"line {lineno}: count {p!r} is not a non-negative integer")
            counts.append(int(p))
        rows.append((a + b, tuple(counts)))
    labels = tuple(lab for lab, _ in rows)
    if labels != PAULI_BASIS_ORDER:
        raise ValidationError(
            f"basis rows must appear in order {','.join(PAULI_BASIS_ORDER)}, got {','.join(labels)}"
        )
    return CountTable(tuple(rows))


def format_count_table(table: CountTable) -> str:
    lines = [PAULI_HEADER]
    for lab, c in table.rows:
        if len(lab) != 2 or len(c) != 4:
            raise ValidationError(f"row {lab!r} is not a two-qubit Pauli row")
        lines.append(f"{lab[0]},{lab[1]}," + ",".join(str(x) for x in c))
    return "\n".join(lines) + "\n"
