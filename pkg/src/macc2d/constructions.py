"""Caching/delivery array constructions and a small exhaustive EPDA search."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .arrays import NULL, STAR, CachingArray, DeliveryArray, Epda, stars_from_caching
from .errors import ParameterError, SearchBudgetError
from .grid import NetworkParams, cyc, grid_positions
from .kernels import search_kernel

__all__ = [
    "Lemma1Layout", "lemma1_layout", "lemma1_construct", "optimal_construct",
    "generalized_construct", "search_epda", "man_epda", "epda_scheme_parameters",
    "DEFAULT_SEARCH_BUDGET",
]

DEFAULT_SEARCH_BUDGET = 36


def _fill_top_to_bottom(star_mask: np.ndarray) -> np.ndarray:
    """Number the non-star cells of each column 1, 2, ... from the top."""
    cells = np.full(star_mask.shape, STAR, dtype=np.int64)
    for col in range(star_mask.shape[1]):
        free = np.flatnonzero(~star_mask[:, col])
        cells[free, col] = np.arange(1, free.size + 1)
    return cells


def _single_star_pair(p, labels, star_row, n_rows, s):
    """Caching array with one star per column at ``star_row(label)`` plus its
    delivery array filled top to bottom."""
    cells = np.full((n_rows, len(labels)), NULL, dtype=np.int64)
    for col, lab in enumerate(labels):
        cells[star_row(*lab) - 1, col] = STAR
    c = CachingArray(p.k1, p.k2, 1, cells, labels)
    mask = stars_from_caching(c, p.r)
    counts = (~mask).sum(axis=0)
    if (counts != s).any():
        raise ParameterError(
            f"access windows overlap on a cached row: columns hold {sorted(set(counts))} "
            f"uncached rows, expected {s}")
    b = DeliveryArray(p.k1, p.k2, p.r, p.l, s, _fill_top_to_bottom(mask), labels, parent=c)
    return c, b


def optimal_construct(p: NetworkParams) -> tuple[CachingArray, DeliveryArray]:
    """One-star-per-row caching array for M/N = 1/(K1 K2) and L = K1 K2 - r^2.

    Column labels are lexicographic ((1,1), (1,2), ...); cache ``(k1, k2)``
    stores row ``(k1 - 1) K2 + k2``. Every column of the delivery array then
    holds r^2 stars and the integers 1..L from top to bottom, so S = L.
    """
    n = p.n_users
    if p.mu != Fraction(1, n):
        raise ParameterError(f"optimal construction requires M/N = 1/(K1*K2) = 1/{n}, got {p.mu}")
    if p.l != n - p.r ** 2:
        raise ParameterError(
            f"optimal construction requires r^2 + L = K1*K2 (L = {n - p.r ** 2}), got L = {p.l}")
    labels = grid_positions(p.k1, p.k2, "row")
    return _single_star_pair(p, labels, lambda a, b: (a - 1) * p.k2 + b, n, p.l)


def generalized_construct(p: NetworkParams) -> tuple[CachingArray, DeliveryArray]:
    """Single-star caching array with F = K1 K2 / t rows for integer t = K1 K2 M/N.

    Needs r^2 t + L = K1 K2 and either (t | K1, r <= K1/t) or (t | K2, r <= K2/t).
    In the first case caches are labelled lexicographically and cache
    ``(k1, k2)`` stores row ``<(k1-1) K2 + k2>_F``; in the second, labels run
    k1-fastest and the row is ``<(k2-1) K1 + k1>_F``. Either way the t caches
    sharing a row are at least r apart along one axis, so each user sees r^2
    distinct cached rows and S = L / t integers fill every column.
    """
    t = p.t
    if t.denominator != 1:
        raise ParameterError(f"generalized construction requires integer t = K1*K2*M/N, got {t}")
    t = int(t)
    n = p.n_users
    if p.l != n - p.r ** 2 * t:
        raise ParameterError(
            f"generalized construction requires r^2*t + L = K1*K2 (L = {n - p.r ** 2 * t}), "
            f"got L = {p.l}")
    f = n // t
    if p.k1 % t == 0 and p.r <= p.k1 // t:
        labels = grid_positions(p.k1, p.k2, "row")

        def star_row(a, b):
            return cyc((a - 1) * p.k2 + b, f)
    elif p.k2 % t == 0 and p.r <= p.k2 // t:
        labels = grid_positions(p.k1, p.k2, "col")

        def star_row(a, b):
            return cyc((b - 1) * p.k1 + a, f)
    else:
        raise ParameterError(
            f"generalized construction requires t|K1 and r <= K1/t, or t|K2 and r <= K2/t "
            f"(got t={t}, r={p.r}, K1={p.k1}, K2={p.k2})")
    return _single_star_pair(p, labels, star_row, f, p.l // t)


@dataclass(frozen=True)
class Lemma1Layout:
    """Block geometry of the EPDA lifting.

    Bands (row blocks) and groups (column blocks) are both indexed by a
    residue pair ``(u, v)`` in ``[r] x [r]``, ordered lexicographically.
    ``offsets[(band, group)]`` is the integer shift of that block and
    ``sources[(band, group)][p]`` the 0-based EPDA column placed at block
    column ``p``.
    """

    r: int
    grid: tuple          # (K1/r, K2/r): shape of the coarse (x, y) grid
    residues: tuple
    offsets: dict
    sources: dict

    @property
    def n_blocks(self) -> int:
        return len(self.residues)


def lemma1_layout(p: NetworkParams, s: int) -> Lemma1Layout:
    r = p.r
    if p.k1 % r or p.k2 % r:
        raise ParameterError(
            f"lemma1 construction requires r|K1 and r|K2 (got r={r}, K1={p.k1}, K2={p.k2})")
    gx, gy = p.k1 // r, p.k2 // r
    residues = tuple((u, v) for u in range(1, r + 1) for v in range(1, r + 1))
    offsets, sources = {}, {}
    for g, (u, v) in enumerate(residues):
        for b, (ub, vb) in enumerate(residues):
            offsets[(b, g)] = (g * r * r + b) * s
            # A user of group (u, v) reaches band (ub, vb) through the cache
            # (ub - u) mod r rows down and (vb - v) mod r columns right; that
            # cache sits in the next coarse row/column exactly when it wraps.
            dx, dy = int(ub < u), int(vb < v)
            sources[(b, g)] = tuple(
                (cyc(x + dx, gx) - 1) * gy + cyc(y + dy, gy) - 1
                for x in range(1, gx + 1) for y in range(1, gy + 1))
    return Lemma1Layout(r, (gx, gy), residues, offsets, sources)


def lemma1_construct(a: Epda, p: NetworkParams) -> tuple[CachingArray, DeliveryArray]:
    """Lift a ``(K1 K2 / r^2, L, F, Z, S)`` EPDA to a caching/delivery pair.

    The caching array is ``r^2`` diagonal copies of the EPDA's star pattern,
    giving a ``(K1, K2, r^2 F, Z)`` caching array; the delivery array has
    ``r^4 S`` integers, one disjoint range per block.
    """
    layout = lemma1_layout(p, a.s)
    r = p.r
    if a.k != p.n_users // (r * r):
        raise ParameterError(
            f"lemma1 construction needs an EPDA with K1*K2/r^2 = {p.n_users // (r * r)} "
            f"columns, got {a.k}")
    if a.l > p.l:
        raise ParameterError(f"EPDA serves L = {a.l} users per row, network has L = {p.l}")
    mu = Fraction(a.z, r * r * a.f)
    if mu != p.mu:
        raise ParameterError(f"EPDA gives M/N = Z/(r^2 F) = {mu}, network has {p.mu}")

    gx, gy = layout.grid
    kk, f = a.k, a.f
    labels = []
    for u, v in layout.residues:
        labels.extend(((x - 1) * r + u, (y - 1) * r + v)
                      for x in range(1, gx + 1) for y in range(1, gy + 1))
    nb = layout.n_blocks
    c_cells = np.full((nb * f, nb * kk), NULL, dtype=np.int64)
    b_cells = np.empty((nb * f, nb * kk), dtype=np.int64)
    tilde = a.tilde()
    for g in range(nb):
        c_cells[g * f:(g + 1) * f, g * kk:(g + 1) * kk] = tilde
        for b in range(nb):
            block = a.cells[:, layout.sources[(b, g)]]
            b_cells[b * f:(b + 1) * f, g * kk:(g + 1) * kk] = np.where(
                block == STAR, STAR, block + layout.offsets[(b, g)])
    c = CachingArray(p.k1, p.k2, a.z, c_cells, labels)
    bd = DeliveryArray(p.k1, p.k2, r, p.l, nb * nb * a.s, b_cells, labels, parent=c)
    return c, bd


def man_epda(k: int, t: int, l: int = 1) -> Epda:
    """Subset-indexed EPDA: rows are t-subsets of [K], a column is starred on
    the rows containing it, and cell (T, j) holds the index of T + {j} among
    the (t+1)-subsets. Every row of each sub-array holds a single integer, so
    the array is valid for any ``l >= 1``.
    """
    if not 1 <= t < k:
        raise ParameterError(f"need 1 <= t < K, got t={t}, K={k}")
    rows = list(combinations(range(k), t))
    index = {sub: n + 1 for n, sub in enumerate(combinations(range(k), t + 1))}
    cells = np.empty((len(rows), k), dtype=np.int64)
    for i, sub in enumerate(rows):
        for j in range(k):
            cells[i, j] = STAR if j in sub else index[tuple(sorted(sub + (j,)))]
    return Epda(k, l, len(rows), comb(k - 1, t - 1), comb(k, t + 1), cells)


def epda_scheme_parameters(k1: int, k2: int, r: int, l: int, t: int) -> dict:
    """Parameters of the caching/delivery pair obtained by lifting the
    ``(K, L, (t+L)C(K,t+L), t C(K-1,t+L-1), (K-t)C(K,t+L))`` EPDA family with
    ``K = K1 K2 / r^2``. Pure bookkeeping with exact integers."""
    if k1 % r or k2 % r:
        raise ParameterError(f"requires r|K1 and r|K2 (got r={r}, K1={k1}, K2={k2})")
    k = k1 * k2 // (r * r)
    if t < 0 or l < 1 or t + l > k:
        raise ParameterError(f"requires t + L <= K = {k}")
    f = (t + l) * comb(k, t + l)
    z = t * comb(k - 1, t + l - 1)
    s = (k - t) * comb(k, t + l)
    return {"K": k, "F": f, "Z": z, "S": s, "caching_rows": r * r * f,
            "delivery_integers": r ** 4 * s, "ndt": Fraction(r ** 4 * s, r * r * f)}


def search_epda(k: int, l: int, f: int, z: int, s_max: int,
                budget: int = DEFAULT_SEARCH_BUDGET, backend: str | None = None) -> Epda | None:
    """Exhaustively search a ``(k, l, f, z, S)`` EPDA with the smallest S <= s_max.

    Returns None when no such array exists. Raises
    :class:`~macc2d.errors.SearchBudgetError` when ``k * f`` exceeds ``budget``.
    """
    for name, value in (("k", k), ("l", l), ("f", f)):
        if value < 1:
            raise ParameterError(f"{name} must be positive, got {value}")
    if z < 0 or z > f or s_max < 0:
        raise ParameterError(f"need 0 <= z <= f and s_max >= 0 (z={z}, f={f}, s_max={s_max})")
    if k * f > budget:
        raise SearchBudgetError(f"search size k*f = {k * f} exceeds budget {budget}")
    if z == f:
        return Epda(k, l, f, z, 0, np.full((f, k), STAR, dtype=np.int64))
    # every column holds f - z distinct integers and every cell an integer
    for s in range(f - z, min(s_max, k * (f - z)) + 1):
        grid, _ = search_kernel(f, k, z, l, s, backend)
        if grid is not None:
            return Epda(k, l, f, z, s, grid)
    return None
