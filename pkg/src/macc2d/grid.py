"""Cyclic wrap-around grid geometry.

Caches and users both live on a ``k1 x k2`` torus. Every coordinate in this
module is 1-based; user ``(i, j)`` has flat index ``(i - 1) * k2 + j`` and
reads the ``r x r`` block of caches whose top-left corner is ``(i, j)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import ParameterError

__all__ = ["NetworkParams", "CacheId", "UserId", "cyc", "access_set",
           "accessing_users", "grid_positions", "as_fraction"]


def cyc(x: int, m: int) -> int:
    """Reduce ``x`` modulo ``m`` into ``[1, m]`` (a zero residue maps to m)."""
    if m < 1:
        raise ParameterError(f"modulus must be positive, got {m}")
    return (x - 1) % m + 1


_RATIONAL = re.compile(r"([+-]?[0-9]+)(?:/([0-9]+))?")


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction or ``"p/q"`` string.

    Floats are refused: cache fractions must never pass through binary
    floating point.
    """
    if isinstance(value, float):
        raise ParameterError(f"cache fraction must be exact, got float {value!r}")
    if isinstance(value, str):
        m = _RATIONAL.fullmatch(value.strip())
        if not m or int(m.group(2) or 1) == 0:
            raise ParameterError(f"expected an exact rational 'p/q', got {value!r}")
        return Fraction(int(m.group(1)), int(m.group(2) or 1))
    return Fraction(value)


class CacheId(NamedTuple):
    row: int
    col: int


class UserId(NamedTuple):
    i: int
    j: int

    def flat(self, k2: int) -> int:
        return (self.i - 1) * k2 + self.j

    @classmethod
    def from_flat(cls, k: int, k2: int) -> "UserId":
        return cls((k - 1) // k2 + 1, (k - 1) % k2 + 1)


@dataclass(frozen=True)
class NetworkParams:
    """Scalar parameters of a ``(K1, K2, r, L, M, N)`` network.

    ``mu`` is the normalized cache size M/N, held as an exact Fraction.
    """

    k1: int
    k2: int
    r: int
    l: int
    mu: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        object.__setattr__(self, "mu", as_fraction(self.mu))
        for name in ("k1", "k2", "r", "l"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        if self.k2 < self.k1:
            raise ParameterError(f"requires K2 >= K1 (got K1={self.k1}, K2={self.k2})")
        if self.r >= self.k1:
            raise ParameterError(f"requires r < K1 (got r={self.r}, K1={self.k1})")
        if not 0 < self.mu <= 1:
            raise ParameterError(f"requires 0 < M/N <= 1 (got {self.mu})")

    @property
    def n_users(self) -> int:
        return self.k1 * self.k2

    @property
    def t(self) -> Fraction:
        """Cache load K1*K2*M/N; integral only for some constructions."""
        return self.k1 * self.k2 * self.mu

    def user(self, k: int) -> UserId:
        if not 1 <= k <= self.n_users:
            raise ParameterError(f"user index {k} outside [1, {self.n_users}]")
        return UserId.from_flat(k, self.k2)


def _check_position(pos, k1, k2, what):
    a, b = pos
    if not (1 <= a <= k1 and 1 <= b <= k2):
        raise ParameterError(f"{what} {tuple(pos)} outside the {k1}x{k2} grid")


def grid_positions(k1: int, k2: int, order: str = "row") -> list[tuple[int, int]]:
    """All grid positions, ``order="row"`` with k2 fastest, ``"col"`` with k1 fastest."""
    if order == "row":
        return [(a, b) for a in range(1, k1 + 1) for b in range(1, k2 + 1)]
    if order == "col":
        return [(a, b) for b in range(1, k2 + 1) for a in range(1, k1 + 1)]
    raise ValueError(f"unknown order {order!r}")


def access_set(user, k1, k2=None, r=None) -> list[CacheId]:
    """Caches read by ``user``.

    Accepts either ``access_set(user, params)`` or ``access_set(user, k1, k2, r)``.
    The user may be a :class:`UserId`, an ``(i, j)`` pair or a flat int index.
    The result lists the r*r caches in (row offset, column offset) order.
    """
    if isinstance(k1, NetworkParams):
        k1, k2, r = k1.k1, k1.k2, k1.r
    if isinstance(user, int):
        user = UserId.from_flat(user, k2)
    i, j = user
    _check_position((i, j), k1, k2, "user")
    return [CacheId(cyc(i + a, k1), cyc(j + b, k2))
            for a in range(r) for b in range(r)]


def accessing_users(cache, k1, k2, r) -> list[UserId]:
    """Users whose access window contains ``cache`` (the inverse access map)."""
    c1, c2 = cache
    _check_position((c1, c2), k1, k2, "cache")
    return [UserId(cyc(c1 - a, k1), cyc(c2 - b, k2))
            for a in range(r) for b in range(r)]
