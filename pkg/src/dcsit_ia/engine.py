"""Slot-level transmission machinery shared by the IC and X schemes.

The two-transmitter block (TX_i1 sends ``n+1`` combinations of ``n+1``
symbols while TX_i2 sends ``n+1`` combinations of ``n`` symbols) and the
grouping of the side information it creates are identical in phase m-I of
the interference channel and phase m of the X channel, so they live here.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from itertools import combinations

import numpy as np

from . import linalg
from .channel import CsitView, make_streams, cn01, FadingProcess
from .symbols import GroundRegistry


COEFF_MODES = ("orthonormal", "iid")


class SchemeError(RuntimeError):
    """A scheme step failed: bad pool, range violation or rank failure."""


@dataclass
class SlotRecord:
    t: int
    phase: str
    active: dict  # tx -> (list of Symbol, coefficient vector)
    h: np.ndarray  # n_rx x n_tx
    y: np.ndarray  # received values, noise free


@dataclass
class Block:
    """One two-transmitter block for a fixed demand set ``S`` and leader ``i1``."""

    phase: str
    S: frozenset
    i1: int
    i2: int
    u1: list
    u2: list
    slots: list
    c1: np.ndarray
    c2: np.ndarray
    omega: dict = field(default_factory=dict)  # j' -> null vector of Q_{j' i2}
    side_coef: dict = field(default_factory=dict)  # j' -> Q_{j' i1}^T omega
    side: dict = field(default_factory=dict)  # j' -> side-information Symbol


@dataclass
class Group:
    """Side information of leader ``i1`` that is re-encoded for the set ``S``."""

    S: frozenset
    i1: int
    members: dict  # j' -> Symbol  u^[i1 | S minus j' ; j']
    alpha: np.ndarray  # rows: combinations, columns: sorted members
    outputs: list  # higher-order symbols u^[i1|S]
    one_m: object = None  # IC only: u^[i1 | i1 ; S minus i1]

    @property
    def member_keys(self):
        return sorted(self.members)


@dataclass
class PhaseReport:
    phase: str
    slots: list = field(default_factory=list)
    symbols_consumed: list = field(default_factory=list)
    generated_next_order: list = field(default_factory=list)
    generated_one_m: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def slots_used(self):
        return len(self.slots)

    def merge(self, other):
        for name in ("slots", "symbols_consumed", "generated_next_order",
                     "generated_one_m", "blocks", "groups"):
            getattr(self, name).extend(getattr(other, name))
        for k, v in other.extra.items():
            self.extra.setdefault(k, []).extend(v if isinstance(v, list) else [v])
        return self


class Link:
    """One experiment: channel, pre-shared coefficient stream and data registry."""

    def __init__(self, n_rx, n_tx, seed=0, coeff_mode="orthonormal"):
        if coeff_mode not in COEFF_MODES:
            raise ValueError(f"coeff_mode must be one of {COEFF_MODES}")
        chan, coeff, data = make_streams(seed)
        self.seed = seed
        self.coeff_mode = coeff_mode
        self.n_rx = n_rx
        self.n_tx = n_tx
        self.channel = FadingProcess(n_rx, n_tx, seed, rng=chan)
        self.coeff_rng = coeff
        self.registry = GroundRegistry(data)
        self.slots = []
        self.margins = []  # (tag, sigma_min / ||.||_F) of every null-space input

    @property
    def now(self):
        return self.channel.current_slot

    def coeffs(self, *shape):
        """Pre-shared random combining coefficients.

        Matrices are CN(0, 1) draws, orthonormalized unless ``coeff_mode`` is
        ``"iid"``; this keeps the chained receiver solves well conditioned.
        """
        a = cn01(self.coeff_rng, shape)
        if self.coeff_mode == "orthonormal" and len(shape) == 2:
            a = linalg.orthonormalize(a)
        return a

    def transmit(self, phase, active):
        """Send one slot; ``active`` maps tx to ``(symbols, coefficients)``."""
        x = np.zeros(self.n_tx, dtype=complex)
        norm_active = {}
        for tx, (syms, c) in active.items():
            c = np.asarray(c, dtype=complex).reshape(-1)
            if len(c) != len(syms):
                raise SchemeError("coefficient vector does not match symbol list")
            if any(s.tx != tx for s in syms):
                raise SchemeError(f"TX{tx} asked to send another transmitter's symbol")
            x[tx - 1] = np.dot(c, [s.value for s in syms])
            norm_active[tx] = (list(syms), c)
        h = self.channel.draw_slot()
        rec = SlotRecord(self.now, phase, norm_active, h, h @ x)
        self.slots.append(rec)
        return rec

    def view(self):
        """Delayed CSIT available right now (all completed slots)."""
        return self.channel.csit_view(self.now + 1)


def cyclic_pairs(S):
    """``(i1, i2)`` with ``i2`` the cyclic successor of ``i1`` in sorted ``S``."""
    s = sorted(S)
    return [(s[k], s[(k + 1) % len(s)]) for k in range(len(s))]


def subsets(K, m):
    return [frozenset(c) for c in combinations(range(1, K + 1), m)]


def side_information(view: CsitView, slots, c1, c2, i1, i2, jp, link=None):
    """Null vector of ``Q_{j'i2}`` and the side-information weights on ``u1``.

    Transmitter-side computation: it only sees the delayed CSIT view.
    """
    q2 = view.gains(jp, i2, slots)[:, None] * c2
    q1 = view.gains(jp, i1, slots)[:, None] * c1
    if link is not None:
        link.margins.append((f"Q{jp}{i2}", linalg.relative_sigma_min(q2)))
    try:
        w = linalg.left_null_vector(q2)
    except linalg.LinalgError as e:
        raise SchemeError(f"rank failure building side information: {e}") from e
    return w, q1.T @ w


def run_block(link, phase, S, i1, i2, u1, u2, outside):
    """Transmit one block and create side information for every RX in ``outside``."""
    T = len(u1)
    if len(u2) != T - 1:
        raise SchemeError(f"pool shape mismatch: {len(u1)} and {len(u2)} symbols")
    c1 = link.coeffs(T, T)
    c2 = link.coeffs(T, T - 1)
    recs = [link.transmit(phase, {i1: (u1, c1[t]), i2: (u2, c2[t])}) for t in range(T)]
    blk = Block(phase, frozenset(S), i1, i2, list(u1), list(u2), recs, c1, c2)
    view = link.view()
    slot_ids = [r.t for r in recs]
    for jp in sorted(outside):
        w, coef = side_information(view, slot_ids, c1, c2, i1, i2, jp, link)
        blk.omega[jp] = w
        blk.side_coef[jp] = coef
        blk.side[jp] = link.registry.new_symbol(i1, S, {jp}, parents=u1, weights=coef)
    return blk


def form_groups(link, blocks, n_out, with_one_m):
    """Re-encode the side information of one round for every ``S_{m+1}``.

    ``n_out`` random combinations become ``S_{m+1}``-symbols; with
    ``with_one_m`` one more combination becomes the order-(1, m) symbol
    ``u^[i1 | i1 ; S_{m+1} minus i1]`` (IC only).
    """
    buckets = {}
    for blk in blocks:
        for jp, sym in blk.side.items():
            key = (blk.S | {jp}, blk.i1)
            members = buckets.setdefault(key, {})
            if jp in members:
                raise SchemeError(f"duplicate side information for {key} / {jp}")
            members[jp] = sym
    groups = []
    for (S, i1), members in sorted(buckets.items(), key=lambda kv: (sorted(kv[0][0]), kv[0][1])):
        keys = sorted(members)
        parents = [members[k] for k in keys]
        rows = n_out + (1 if with_one_m else 0)
        alpha = link.coeffs(rows, len(keys))
        outs = [link.registry.new_symbol(i1, S, parents=parents, weights=alpha[r])
                for r in range(n_out)]
        one = None
        if with_one_m:
            one = link.registry.new_symbol(i1, {i1}, S - {i1}, parents=parents, weights=alpha[n_out])
        groups.append(Group(S, i1, members, alpha, outs, one))
    return groups


def run_tdma(link, phase, symbols):
    """One symbol per slot, sent by its owner alone."""
    return [link.transmit(phase, {s.tx: ([s], np.ones(1))}) for s in symbols]


def pop_pool(pool, key, count):
    avail = pool.get(key, [])
    if len(avail) < count:
        raise SchemeError(f"pool shape mismatch: need {count} symbols for {key}, have {len(avail)}")
    taken = avail[:count]
    del avail[:count]
    return taken


def push_pool(pool, symbols):
    for s in symbols:
        pool.setdefault((s.spec.demand, s.tx), []).append(s)


@dataclass
class EndToEndReport:
    """Outcome of one full scheduled run."""

    channel: str
    K: int
    seed: int
    schedule: object
    total_slots: int
    total_data_symbols: int
    max_error: float
    min_margin: float
    phases: list = field(default_factory=list, repr=False)
    link: object = field(default=None, repr=False, compare=False)
    tol: float = 1e-6

    @property
    def passed(self):
        return (self.max_error <= self.tol
                and self.total_slots == self.schedule.total_slots
                and self.total_data_symbols == self.schedule.total_data_symbols)

    def summary(self):
        return {
            "channel": self.channel,
            "K": self.K,
            "seed": self.seed,
            "passed": self.passed,
            "slots": self.total_slots,
            "data_symbols": self.total_data_symbols,
            "max_rel_error": self.max_error,
            "min_sigma_ratio": self.min_margin,
        }


def lcm_schedule(ratios):
    """Smallest positive integers ``r`` with ``r[k+1] / r[k] == ratios[k]``."""
    rel = [Fraction(1)]
    for q in ratios:
        rel.append(rel[-1] * q)
    base = lcm(*(f.denominator for f in rel))
    reps = [int(f * base) for f in rel]
    if any(r < 1 for r in reps):
        raise SchemeError("schedule has an empty phase")
    return reps
