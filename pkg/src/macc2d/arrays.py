"""Star/integer arrays and exhaustive verifiers for their defining conditions.

Cells are stored densely as ``int64`` grids: :data:`STAR` (-1) marks a
cached/known subfile, :data:`NULL` (0) an empty caching-array cell, and any
positive value is an integer symbol. Rows and column positions are 0-based in
storage; everything reported back (rows, positions, labels) is 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import StructureError
from .grid import access_set, grid_positions

__all__ = [
    "STAR", "NULL", "Epda", "CachingArray", "DeliveryArray", "ConditionReport",
    "SubArray", "verify_epda", "verify_caching_array", "verify_delivery_array",
    "stars_from_caching", "subarray",
]

STAR = -1
NULL = 0


def _frozen_grid(cells) -> np.ndarray:
    arr = np.array(cells, dtype=np.int64)
    if arr.ndim != 2:
        raise StructureError(f"cell grid must be 2-D, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_labels(cols, k1, k2) -> tuple:
    cols = tuple((int(a), int(b)) for a, b in cols)
    if sorted(cols) != grid_positions(k1, k2):
        raise StructureError(
            f"column labels must be a permutation of the {k1}x{k2} grid positions")
    return cols


class _GridArray:
    """Equality and label lookup shared by the three array types."""

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key() and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self._key(), self.cells.tobytes()))


class _LabeledArray(_GridArray):
    """Grid whose columns carry (k1, k2) grid-position labels."""

    @property
    def f(self) -> int:
        return self.cells.shape[0]

    def position(self, label) -> int:
        """0-based column position carrying ``label``."""
        return self._positions[tuple(label)]


@dataclass(frozen=True, eq=False)
class Epda(_GridArray):
    """A ``(K, L, F, Z, S)`` extended placement delivery array (stars and integers)."""

    k: int
    l: int
    f: int
    z: int
    s: int
    cells: np.ndarray

    def __post_init__(self):
        cells = _frozen_grid(self.cells)
        object.__setattr__(self, "cells", cells)
        if cells.shape != (self.f, self.k):
            raise StructureError(
                f"declared F x K = {self.f} x {self.k} but grid is "
                f"{cells.shape[0]} x {cells.shape[1]}")
        if self.f < 1 or self.k < 1:
            raise StructureError("EPDA needs at least one row and one column")
        if (cells == NULL).any() or (cells < STAR).any():
            raise StructureError("EPDA cells must be stars or positive integers")
        if self.l < 1 or self.z < 0 or self.s < 0:
            raise StructureError("EPDA parameters L >= 1, Z >= 0, S >= 0 required")

    def _key(self):
        return (self.k, self.l, self.f, self.z, self.s)

    def tilde(self) -> np.ndarray:
        """Star pattern with every integer replaced by NULL."""
        return np.where(self.cells == STAR, STAR, NULL)


@dataclass(frozen=True, eq=False)
class CachingArray(_LabeledArray):
    """A ``(K1, K2, F, Z)`` caching array; column ``c`` is cache ``cols[c]``."""

    k1: int
    k2: int
    z: int
    cells: np.ndarray
    cols: tuple
    _positions: dict = field(init=False, repr=False)

    def __post_init__(self):
        cells = _frozen_grid(self.cells)
        object.__setattr__(self, "cells", cells)
        if cells.shape[0] < 1:
            raise StructureError("caching array needs at least one row")
        if cells.shape[1] != self.k1 * self.k2:
            raise StructureError(
                f"caching array has {cells.shape[1]} columns, expected K1*K2 = "
                f"{self.k1 * self.k2}")
        if not np.isin(cells, (STAR, NULL)).all():
            raise StructureError("caching array cells must be stars or nulls")
        cols = _check_labels(self.cols, self.k1, self.k2)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_positions", {lab: c for c, lab in enumerate(cols)})

    def _key(self):
        return (self.k1, self.k2, self.z, self.cols)

    def star_rows(self, cache) -> list[int]:
        """1-based rows holding a star in the column of ``cache``."""
        col = self.cells[:, self.position(cache)]
        return [int(f) + 1 for f in np.flatnonzero(col == STAR)]


@dataclass(frozen=True, eq=False)
class DeliveryArray(_LabeledArray):
    """A ``(C, r, L, S)`` delivery array; column ``c`` serves user ``cols[c]``.

    ``parent`` is the caching array the stars were derived from. It is not
    part of equality and is not serialized.
    """

    k1: int
    k2: int
    r: int
    l: int
    s: int
    cells: np.ndarray
    cols: tuple
    parent: CachingArray | None = None
    _positions: dict = field(init=False, repr=False)

    def __post_init__(self):
        cells = _frozen_grid(self.cells)
        object.__setattr__(self, "cells", cells)
        if cells.shape[0] < 1:
            raise StructureError("delivery array needs at least one row")
        if cells.shape[1] != self.k1 * self.k2:
            raise StructureError(
                f"delivery array has {cells.shape[1]} columns, expected K1*K2 = "
                f"{self.k1 * self.k2}")
        if (cells == NULL).any() or (cells < STAR).any():
            raise StructureError("delivery array cells must be stars or positive integers")
        if self.r < 1 or self.l < 1 or self.s < 0:
            raise StructureError("delivery array parameters r >= 1, L >= 1, S >= 0 required")
        cols = _check_labels(self.cols, self.k1, self.k2)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_positions", {lab: c for c, lab in enumerate(cols)})

    def _key(self):
        return (self.k1, self.k2, self.r, self.l, self.s, self.cols)

    def user_index(self, position: int) -> int:
        """Flat 1-based user index of the 0-based column ``position``."""
        i, j = self.cols[position]
        return (i - 1) * self.k2 + j


@dataclass
class ConditionReport:
    """Verdict per named condition plus the first counterexample of each failure."""

    kind: str
    conditions: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def failed(self) -> list[str]:
        return [name for name, ok in self.conditions.items() if not ok]

    def counterexample(self, name: str) -> dict | None:
        for ce in self.counterexamples:
            if ce["condition"] == name:
                return ce
        return None

    def _record(self, name, example=None):
        self.conditions[name] = example is None
        if example is not None:
            self.counterexamples.append({"condition": name, **example})

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "conditions": dict(self.conditions),
            "counterexamples": list(self.counterexamples),
            "notes": list(self.notes),
        }


class SubArray(NamedTuple):
    rows: tuple
    cols: tuple
    cells: np.ndarray


def subarray(a, s: int) -> SubArray:
    """Rows and columns of ``a`` (EPDA or delivery array) that contain ``s``.

    Returned row and column indices are 1-based positions.
    """
    if not 1 <= s <= a.s:
        raise ValueError(f"integer {s} outside [1, {a.s}]")
    hit = a.cells == s
    rows = np.flatnonzero(hit.any(axis=1))
    cols = np.flatnonzero(hit.any(axis=0))
    return SubArray(tuple(int(x) + 1 for x in rows), tuple(int(x) + 1 for x in cols),
                    a.cells[np.ix_(rows, cols)])


def _cell(row, col, labels):
    ce = {"row": int(row) + 1, "col": int(col) + 1}
    if labels is not None:
        ce["label"] = list(labels[col])
    return ce


def _star_count(report, name, cells, z, labels):
    counts = (cells == STAR).sum(axis=0)
    bad = np.flatnonzero(counts != z)
    if bad.size:
        col = int(bad[0])
        ce = {"col": col + 1, "stars": int(counts[col]), "expected": z}
        if labels is not None:
            ce["label"] = list(labels[col])
        report._record(name, ce)
    else:
        report._record(name)


def _integer_conditions(report, prefix, cells, l, s, labels):
    """Conditions 2-4 shared by EPDAs and delivery arrays."""
    # 2: every integer of [S] occurs, and nothing outside [S] does.
    outside = np.argwhere(cells > s)
    present = np.zeros(s + 1, dtype=bool)
    vals = cells[(cells >= 1) & (cells <= s)]
    present[vals] = True
    missing = [v for v in range(1, s + 1) if not present[v]]
    if outside.size:
        row, col = outside[0]
        report._record(f"{prefix}2", {**_cell(row, col, labels), "value": int(cells[row, col]),
                                       "detail": f"integer outside [1, {s}]"})
    elif missing:
        report._record(f"{prefix}2", {"s": missing[0], "detail": "integer never occurs"})
        report.notes.append(f"unused integers: {missing}")
    else:
        report._record(f"{prefix}2")

    # 3: no integer twice in a column; report the second occurrence.
    seen = [set() for _ in range(cells.shape[1])]
    dup = None
    for row in range(cells.shape[0]):
        for col in range(cells.shape[1]):
            v = int(cells[row, col])
            if v > 0:
                if v in seen[col]:
                    dup = {**_cell(row, col, labels), "value": v}
                    break
                seen[col].add(v)
        if dup:
            break
    report._record(f"{prefix}3", dup)

    # 4: in the sub-array of s, each row holds at most L integers.
    report._record(f"{prefix}4", _row_occupancy_violation(cells, l, s))


def _row_occupancy_violation(cells, l, s):
    if s == 0:
        return None
    ints = (cells > 0).astype(np.int64)
    onehot = cells[..., None] == np.arange(1, s + 1)        # F x K x S
    col_has = onehot.any(axis=0)                             # K x S
    row_has = onehot.any(axis=1)                             # F x S
    counts = ints @ col_has.astype(np.int64)                 # F x S
    bad = np.argwhere(row_has & (counts > l))
    if not bad.size:
        return None
    row, sidx = bad[0]
    return {"row": int(row) + 1, "s": int(sidx) + 1, "count": int(counts[row, sidx]),
            "limit": l}


def verify_epda(a: Epda) -> ConditionReport:
    """Check conditions C1-C4 of a ``(K, L, F, Z, S)`` EPDA."""
    report = ConditionReport("EPDA")
    _star_count(report, "C1", a.cells, a.z, None)
    _integer_conditions(report, "C", a.cells, a.l, a.s, None)
    return report


def verify_caching_array(c: CachingArray) -> ConditionReport:
    report = ConditionReport("CACHING")
    _star_count(report, "Z", c.cells, c.z, c.cols)
    return report


def stars_from_caching(c: CachingArray, r: int) -> np.ndarray:
    """Boolean star mask forced on a delivery array over ``c`` with radius ``r``.

    Column ``p`` of the mask belongs to the user at grid position ``c.cols[p]``:
    it is starred wherever any cache in that user's access window has a star.
    """
    star = c.cells == STAR
    mask = np.zeros_like(star)
    for p, user in enumerate(c.cols):
        for cache in access_set(user, c.k1, c.k2, r):
            mask[:, p] |= star[:, c.position(cache)]
    return mask


def verify_delivery_array(b: DeliveryArray, c: CachingArray | None = None) -> ConditionReport:
    """Check conditions D1-D4 of ``b`` against its caching array.

    Raises :class:`StructureError` when the two arrays do not describe the
    same grid; condition failures are reported, not raised.
    """
    if c is None:
        c = b.parent
    if c is None:
        raise StructureError("delivery array has no caching array to verify against")
    if (b.k1, b.k2) != (c.k1, c.k2):
        raise StructureError(
            f"grid mismatch: delivery {b.k1}x{b.k2}, caching {c.k1}x{c.k2}")
    if b.f != c.f:
        raise StructureError(f"row mismatch: delivery F={b.f}, caching F={c.f}")

    report = ConditionReport("DELIVERY")
    forced = stars_from_caching(c, b.r)
    order = [c.position(lab) for lab in b.cols]
    forced = forced[:, order]
    actual = b.cells == STAR
    diff = np.argwhere(forced != actual)
    if diff.size:
        row, col = diff[0]
        report._record("D1", {**_cell(row, col, b.cols),
                              "expected": "*" if forced[row, col] else "integer"})
    else:
        report._record("D1")
    _integer_conditions(report, "D", b.cells, b.l, b.s, b.cols)
    return report
