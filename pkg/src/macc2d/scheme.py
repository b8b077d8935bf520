"""Placement, zero-forcing delivery and noiseless decoding for an array pair.

Every subfile is modelled as one complex symbol. The channel is noiseless
(high-SNR regime), so a correct scheme recovers each symbol up to rounding.
Transposes follow the channel model ``y_k = h_k^T x``: "v is orthogonal to
h" means ``h^T v == 0`` (no conjugation).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction

import numpy as np

from .arrays import STAR, CachingArray, DeliveryArray
from .errors import DegenerateChannelError, ParameterError, StructureError
from .grid import CacheId, NetworkParams, access_set

__all__ = [
    "Placement", "Demand", "ChannelRealization", "Transmission", "Schedule", "TransmissionPlan",
    "NdtReport", "DecodeReport", "build_placement", "draw_channel", "delivery_schedule",
    "build_plan", "simulate_decode", "compute_ndt", "run_trials",
    "NULLING_TOL", "GAIN_FLOOR", "DECODE_TOL",
]

NULLING_TOL = 1e-9
GAIN_FLOOR = 1e-3
DECODE_TOL = 1e-6


@dataclass(frozen=True)
class Placement:
    """Which subfile rows each cache stores (for every file alike)."""

    n_files: int
    subfiles_per_file: int
    k1: int
    k2: int
    cache_contents: dict
    _masks: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def read_mask(self, r: int) -> np.ndarray:
        """``mask[k-1, f-1]``: user k can read subfile row f from its caches."""
        if r not in self._masks:
            n_users = self.k1 * self.k2
            mask = np.zeros((n_users, self.subfiles_per_file), dtype=bool)
            for k in range(1, n_users + 1):
                mask[k - 1, [f - 1 for f in self.accessible_rows(k, r)]] = True
            mask.flags.writeable = False
            self._masks[r] = mask
        return self._masks[r]

    def accessible_rows(self, user, r: int) -> frozenset:
        rows = set()
        for cache in access_set(user, self.k1, self.k2, r):
            rows |= self.cache_contents[cache]
        return frozenset(rows)

    @property
    def mu(self) -> Fraction:
        sizes = {len(v) for v in self.cache_contents.values()}
        if len(sizes) != 1:
            raise StructureError(f"caches store different numbers of subfiles: {sorted(sizes)}")
        return Fraction(sizes.pop(), self.subfiles_per_file)


def build_placement(c: CachingArray, n_files: int) -> Placement:
    """Cache ``(k1, k2)`` stores subfile ``f`` of every file iff ``c`` has a star there."""
    if n_files < c.k1 * c.k2:
        raise ParameterError(f"requires N >= K1*K2 = {c.k1 * c.k2}, got N = {n_files}")
    contents = {CacheId(*lab): frozenset(c.star_rows(lab)) for lab in c.cols}
    return Placement(n_files, c.f, c.k1, c.k2, contents)


@dataclass(frozen=True)
class Demand:
    files: tuple

    def __post_init__(self):
        object.__setattr__(self, "files", tuple(int(x) for x in self.files))

    def validate(self, n_users: int, n_files: int) -> None:
        if len(self.files) != n_users:
            raise ParameterError(f"demand has {len(self.files)} entries, need {n_users}")
        bad = [x for x in self.files if not 1 <= x <= n_files]
        if bad:
            raise ParameterError(f"demanded files {bad} outside [1, {n_files}]")

    @classmethod
    def distinct(cls, n_users: int) -> "Demand":
        return cls(tuple(range(1, n_users + 1)))

    @classmethod
    def random(cls, n_users: int, n_files: int, rng) -> "Demand":
        return cls(tuple(rng.integers(1, n_files + 1, size=n_users)))


@dataclass(frozen=True)
class ChannelRealization:
    """``h[:, k - 1]`` is the channel vector of user k (L antennas)."""

    h: np.ndarray
    seed: object = None

    def __post_init__(self):
        if not np.isfinite(self.h).all():
            raise ParameterError("channel matrix has non-finite entries")

    @property
    def l(self) -> int:
        return self.h.shape[0]


def draw_channel(l: int, n_users: int, seed) -> ChannelRealization:
    """i.i.d. circularly-symmetric standard complex normal channel."""
    rng = np.random.default_rng(seed)
    h = (rng.standard_normal((l, n_users)) + 1j * rng.standard_normal((l, n_users))) / np.sqrt(2)
    return ChannelRealization(h, seed)


@dataclass(frozen=True)
class Transmission:
    """All occurrences of one integer ``s``.

    ``rows`` are 0-based subfile rows, ``users`` 1-based flat user indices,
    ``hears[a, b]`` tells whether the user of occurrence ``b`` lacks row
    ``rows[a]`` (so must be shielded from it) and ``interference[a]`` lists
    those users.
    """

    s: int
    rows: np.ndarray
    cols: np.ndarray
    users: np.ndarray
    hears: np.ndarray
    precoder: np.ndarray | None = None
    residual: np.ndarray | None = None
    gain: np.ndarray | None = None

    @property
    def eta(self) -> int:
        return len(self.rows)

    @property
    def interference(self) -> tuple:
        return tuple(tuple(int(u) for u in self.users[m]) for m in self.hears)


class Schedule:
    """Channel-independent part of a plan.

    Iterates over one :class:`Transmission` per integer. Occurrences are also
    flattened in integer-major order, batched by the multiplicity ``eta`` and
    grouped by hearing set (the own user plus the interfered ones), since one
    decomposition per hearing set serves all of its occurrences.
    """

    def __init__(self, transmissions: list[Transmission]):
        self.transmissions = list(transmissions)
        etas = np.array([t.eta for t in self.transmissions], dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(etas)])
        self.n_occ = int(starts[-1])
        cat = (lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64))
        self.users = cat([t.users for t in self.transmissions])
        self.rows = cat([t.rows for t in self.transmissions])
        self.s = np.repeat(np.arange(1, len(etas) + 1), etas)
        self.max_interference = max((int(t.hears.sum(axis=1).max()) for t in self.transmissions
                                     if t.eta), default=0)
        self.batches = {}
        for eta in sorted(set(etas.tolist()) - {0}):
            idx = np.flatnonzero(etas == eta)
            occ = starts[idx][:, None] + np.arange(eta)
            hears = np.stack([self.transmissions[i].hears for i in idx])
            self.batches[eta] = (occ, hears)
        keyed = {}
        for t, start in zip(self.transmissions, starts):
            for a in range(t.eta):
                key = tuple(sorted([int(t.users[a]), *t.users[t.hears[a]].tolist()]))
                keyed.setdefault(key, []).append((start + a, key.index(int(t.users[a]))))
        by_size = {}
        for key, members in keyed.items():
            by_size.setdefault(len(key), []).append((key, members))
        self.groups = {}
        for u, items in by_size.items():
            sets = np.array([key for key, _ in items], dtype=np.int64) - 1
            flat = [(o, si, j) for si, (_, members) in enumerate(items) for o, j in members]
            occ, si, j = (np.array(x, dtype=np.int64) for x in zip(*flat))
            self.groups[u] = (sets, occ, si, j)

    def __iter__(self):
        return iter(self.transmissions)

    def __len__(self):
        return len(self.transmissions)

    def __getitem__(self, i):
        return self.transmissions[i]


def delivery_schedule(b: DeliveryArray) -> Schedule:
    """Occurrences and interference sets of every integer of ``b``."""
    cells = b.cells
    out = []
    for s in range(1, b.s + 1):
        rows, cols = np.nonzero(cells == s)
        users = np.array([b.user_index(c) for c in cols], dtype=np.int64)
        # user of occurrence beta is interfered by alpha unless it caches row f_alpha
        hears = cells[np.ix_(rows, cols)] != STAR          # [alpha, beta]
        np.fill_diagonal(hears, False)
        out.append(Transmission(s, rows, cols, users, hears))
    return Schedule(out)


@dataclass
class TransmissionPlan:
    """Precoders for a schedule, stored per flattened occurrence."""

    k1: int
    k2: int
    r: int
    l: int
    f: int
    schedule: Schedule
    precoders: np.ndarray           # n_occ x L, unit-norm rows
    residual: np.ndarray            # max |h^T v| over the interfered users
    gain: np.ndarray                # h_k^T v for the intended user
    demand: Demand

    @cached_property
    def transmissions(self) -> list[Transmission]:
        out, start = [], 0
        for t in self.schedule:
            sl = slice(start, start + t.eta)
            out.append(Transmission(t.s, t.rows, t.cols, t.users, t.hears,
                                    precoder=self.precoders[sl].T.copy(),
                                    residual=self.residual[sl], gain=self.gain[sl]))
            start += t.eta
        return out

    @property
    def max_interference(self) -> int:
        return self.schedule.max_interference

    @property
    def max_residual(self) -> float:
        return float(self.residual.max(initial=0.0))

    @property
    def min_gain(self) -> float:
        return float(np.abs(self.gain).min(initial=np.inf))


def _null_projection(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Project each ``a[n]`` onto the null space of ``g[n]`` (rows ``h^T``).

    Batched reduced QR of ``g^H``; any block whose R diagonal reveals rank
    deficiency is redone with an SVD and an explicit rank cut.
    """
    n, m, l = g.shape
    if m == 0:
        return a.copy()
    gh = np.conj(np.swapaxes(g, 1, 2))                     # n x L x m
    q, rr = np.linalg.qr(gh)
    diag = np.abs(np.diagonal(rr, axis1=1, axis2=2))
    scale = np.abs(g).max(axis=(1, 2))
    deficient = diag.min(axis=1) <= 1e-10 * np.maximum(scale, 1e-300)
    proj = a - np.einsum("nlm,nm->nl", q, np.einsum("nlm,nl->nm", np.conj(q), a))
    for idx in np.flatnonzero(deficient):
        _, sv, vh = np.linalg.svd(g[idx], full_matrices=True)
        rank = int((sv > 1e-10 * max(sv.max(initial=0.0), 1e-300)).sum())
        basis = vh[rank:]                                   # rows are v^H
        proj[idx] = np.conj(basis).T @ (basis @ a[idx])
    return proj


def _zero_forcing_group(hm, sets):
    """Zero-forcing vectors for a batch of equal-size hearing sets.

    With ``M = conj(H_U) = Q R`` of full column rank, column ``j`` of
    ``Q R^{-H}`` is orthogonal (under ``h^T v``) to every member of U but the
    j-th and has ``h_j^T`` of it equal to 1; normalized, it is the projection
    of ``conj(h_j)`` onto the null space of the others. Returns the vectors
    (unnormalized) and a mask of sets whose R diagonal reveals rank loss.
    """
    m = np.conj(hm[:, sets]).transpose(1, 0, 2)         # n x L x u
    q, rr = np.linalg.qr(m)
    diag = np.abs(np.diagonal(rr, axis1=1, axis2=2))
    scale = np.abs(m).max(axis=(1, 2))
    ok = diag.min(axis=1) > 1e-10 * np.maximum(scale, 1e-300)
    rinv = np.zeros_like(rr)
    if ok.any():
        rinv[ok] = np.linalg.inv(rr[ok])
    return q @ np.conj(np.swapaxes(rinv, 1, 2)), ok


def _cross_gains(hm, sched, occ, v):
    """``[n, a, b] = h_{k_a}^T v_b`` within each transmission of a batch."""
    hk = hm.T[sched.users[occ] - 1]                        # n x eta x L
    return hk @ np.swapaxes(v[occ], 1, 2)


def build_plan(b: DeliveryArray, h: ChannelRealization, d: Demand,
               schedule: Schedule | None = None, gain_floor: float = GAIN_FLOOR) -> TransmissionPlan:
    """Zero-forcing precoders for every integer of ``b``.

    Column ``a`` of ``V^(s)`` is the unit-norm projection of ``conj(h_k)`` onto
    the null space of the interfered users' channels, which maximizes the
    intended coefficient ``h_k^T v`` within that space.
    """
    n_users = b.k1 * b.k2
    if h.h.shape != (b.l, n_users):
        raise ParameterError(f"channel must be {b.l} x {n_users}, got {h.h.shape}")
    sched = schedule if schedule is not None else delivery_schedule(b)
    if sched.max_interference > b.l - 1:
        raise StructureError(f"an occurrence interferes with {sched.max_interference} users, "
                             f"more than L-1 = {b.l - 1}")

    hm = h.h
    v = np.empty((sched.n_occ, b.l), dtype=complex)
    fallback = []
    for sets, occ, si, j in sched.groups.values():
        cols, ok = _zero_forcing_group(hm, sets)
        v[occ] = cols[si, :, j]
        fallback.extend(occ[~ok[si]].tolist())
    users = sched.users
    for o in fallback:
        t = sched.s[o] - 1
        tr = sched[t]
        a = int(np.flatnonzero(tr.users == users[o])[0])
        g = hm.T[tr.users[tr.hears[a]] - 1]
        hk = np.conj(hm[:, users[o] - 1])
        proj = _null_projection(g[None], hk[None])[0]
        # a vanishing projection is rounding noise; normalizing it would fake a gain
        v[o] = proj if np.linalg.norm(proj) > 1e-10 * np.linalg.norm(hk) else 0.0

    norm = np.linalg.norm(v, axis=1)
    v /= np.where(norm > 0, norm, 1.0)[:, None]
    gain = np.einsum("nl,nl->n", hm.T[users - 1], v)
    low = np.flatnonzero(np.abs(gain) <= gain_floor)
    if low.size:
        o = low[np.argmin(np.abs(gain[low]))]
        raise DegenerateChannelError(
            f"integer {int(sched.s[o])}: no precoder with |h^T v| > {gain_floor} for user "
            f"{int(users[o])}; redraw the channel")
    resid = np.zeros(sched.n_occ)
    for occ, hears in sched.batches.values():
        cross = np.abs(_cross_gains(hm, sched, occ, v))
        resid[occ] = np.where(hears, np.swapaxes(cross, 1, 2), 0.0).max(axis=2)
    return TransmissionPlan(b.k1, b.k2, b.r, b.l, b.f, sched, v, resid, gain, d)


@dataclass
class DecodeReport:
    ok: bool
    max_error: dict                 # user -> max relative error over its subfiles
    recovered: dict                 # user -> number of subfiles decoded
    failures: list = field(default_factory=list)
    max_residual: float = 0.0
    min_gain: float = float("inf")
    max_interference: int = 0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "users": [{"user": k, "max_rel_error": self.max_error[k],
                       "recovered": self.recovered[k]} for k in sorted(self.max_error)],
            "failures": list(self.failures),
            "max_nulling_residual": self.max_residual,
            "min_desired_gain": self.min_gain,
            "max_interference_set": self.max_interference,
        }


def simulate_decode(plan: TransmissionPlan, placement: Placement, h: ChannelRealization,
                    d: Demand | None = None, seed=0, tol: float = DECODE_TOL) -> DecodeReport:
    """Run every transmission through the channel and decode at each user.

    A user subtracts the terms whose subfile rows it can read from its caches,
    divides by its own coefficient and compares against the true symbol. Users
    must end up holding every row of their file, from cache or from the air.
    """
    d = d or plan.demand
    n_users = plan.k1 * plan.k2
    d.validate(n_users, placement.n_files)
    if placement.subfiles_per_file != plan.f:
        raise ParameterError("placement and plan disagree on the number of subfiles")
    rng = np.random.default_rng(seed)
    library = (rng.standard_normal((placement.n_files, plan.f))
               + 1j * rng.standard_normal((placement.n_files, plan.f)))
    files = np.array(d.files, dtype=np.int64) - 1
    can_read = placement.read_mask(plan.r)

    sched = plan.schedule
    err = np.zeros(sched.n_occ)
    hm = h.h
    for occ in (o for o, _ in sched.batches.values()):
        u = sched.users[occ] - 1                           # n x eta
        rows = sched.rows[occ]
        w = library[files[u], rows]
        coeff = _cross_gains(hm, sched, occ, plan.precoders)
        y = np.einsum("nab,nb->na", coeff, w)
        known = can_read[u[:, :, None], rows[:, None, :]]   # [n, a, b]: user a reads row b
        eta = occ.shape[1]
        known[:, np.arange(eta), np.arange(eta)] = False
        diag = np.diagonal(coeff, axis1=1, axis2=2)
        est = (y - np.einsum("nab,nb->na", coeff * known, w)) / diag
        err[occ] = np.abs(est - w) / np.abs(w)

    max_err = np.zeros(n_users)
    np.maximum.at(max_err, sched.users - 1, err)
    delivered = np.zeros((n_users, plan.f), dtype=bool)
    delivered[sched.users - 1, sched.rows] = True
    failures = [{"user": int(sched.users[o]), "s": int(sched.s[o]), "row": int(sched.rows[o]) + 1,
                 "rel_error": float(err[o]), "reason": "residual above tolerance"}
                for o in np.flatnonzero(~(err < tol))]
    for k, row in zip(*np.nonzero(~(delivered | can_read))):
        failures.append({"user": int(k) + 1, "s": None, "row": int(row) + 1, "rel_error": None,
                         "reason": "subfile neither cached nor delivered"})
    return DecodeReport(not failures, {k + 1: float(e) for k, e in enumerate(max_err)},
                        {k + 1: int(n) for k, n in enumerate(delivered.sum(axis=1))}, failures,
                        plan.max_residual, plan.min_gain, plan.max_interference)


@dataclass(frozen=True)
class NdtReport:
    achieved: Fraction
    formula_remark1: Fraction
    formula_corollary1: Fraction
    lower_bound: Fraction
    optimal_flag: bool
    mu: Fraction

    def to_dict(self) -> dict:
        return {"achieved": self.achieved, "formula_remark1": self.formula_remark1,
                "formula_corollary1": self.formula_corollary1, "lower_bound": self.lower_bound,
                "optimal_flag": self.optimal_flag, "mu": self.mu}


def compute_ndt(b: DeliveryArray, p: NetworkParams, c: CachingArray | None = None) -> NdtReport:
    """Exact NDT ``S/F`` of the pair, next to the closed forms and the converse bound."""
    c = c or b.parent
    if c is None:
        raise StructureError("delivery array has no caching array; pass it explicitly")
    mu = Fraction(c.z, c.f)
    if mu != p.mu:
        raise ParameterError(f"arrays give M/N = Z/F = {mu}, parameters say {p.mu}")
    if (b.k1, b.k2, b.r, b.l) != (p.k1, p.k2, p.r, p.l):
        raise ParameterError("delivery array parameters disagree with the network parameters")
    n = p.n_users
    uncached = n * (1 - p.r ** 2 * mu)
    achieved = Fraction(b.s, b.f)
    remark1 = uncached / (p.l + n * mu)
    corollary = uncached / (p.l + n * p.r ** 2 * mu)
    bound = max(corollary, Fraction(0))
    return NdtReport(achieved, remark1, corollary, bound, achieved == bound, mu)


def run_trials(c: CachingArray, b: DeliveryArray, n_files: int | None = None, trials: int = 100,
               seed: int = 0, demand="distinct") -> dict:
    """Monte-Carlo decode check over ``trials`` seeded channels and demands.

    ``demand`` is ``"distinct"`` (d_k = k), ``"random"`` or an explicit
    sequence. Each trial's channel, demand and symbols come from
    ``SeedSequence([seed, trial])``.
    """
    n_users = c.k1 * c.k2
    n_files = n_files or n_users
    placement = build_placement(c, n_files)
    schedule = delivery_schedule(b)
    summary = {"trials": trials, "seed": seed, "failed_trials": [], "max_rel_error": 0.0,
               "max_nulling_residual": 0.0, "min_desired_gain": float("inf"),
               "max_interference_set": 0, "degenerate_channels": 0}
    for trial in range(trials):
        ch_seed, dm_seed, sym_seed = np.random.SeedSequence([seed, trial]).spawn(3)
        if demand == "distinct":
            d = Demand.distinct(n_users)
        elif demand == "random":
            d = Demand.random(n_users, n_files, np.random.default_rng(dm_seed))
        else:
            d = Demand(demand)
        d.validate(n_users, n_files)
        h = draw_channel(b.l, n_users, ch_seed)
        try:
            plan = build_plan(b, h, d, schedule)
        except DegenerateChannelError:
            summary["degenerate_channels"] += 1
            summary["failed_trials"].append(trial)
            continue
        rep = simulate_decode(plan, placement, h, d, seed=sym_seed)
        if not rep.ok:
            summary["failed_trials"].append(trial)
        summary["max_rel_error"] = max(summary["max_rel_error"], max(rep.max_error.values()))
        summary["max_nulling_residual"] = max(summary["max_nulling_residual"], rep.max_residual)
        summary["min_desired_gain"] = min(summary["min_desired_gain"], rep.min_gain)
        summary["max_interference_set"] = max(summary["max_interference_set"],
                                              rep.max_interference)
    summary["ok"] = not summary["failed_trials"]
    return summary
