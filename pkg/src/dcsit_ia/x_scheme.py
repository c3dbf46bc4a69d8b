"""Multiphase delayed-CSIT scheme for the 2 x K SISO X channel.

Phase m (1 <= m <= K-1) runs the two-transmitter block for every ``S_m``,
first with ``(i1, i2) = (1, 2)`` and then with the roles swapped, and turns
the overheard side information into order-(m+1) symbols of both
transmitters.  Phase K is time division.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .engine import (EndToEndReport, Link, PhaseReport, SchemeError, form_groups,
                     lcm_schedule, pop_pool, push_pool, run_block, run_tdma, subsets)
from .receiver import Level, ReceiverState, recovery_error, reverse_decode

DEFAULT_CAP = 5
ROLE_ORDERS = ((1, 2), (2, 1))


def _check_k(K):
    if K < 2:
        raise SchemeError("X scheme requires K ≥ 2")


def fresh_pool_x(link, K, m):
    """Fresh order-m symbols of both transmitters, one round of phase m."""
    pool = {}
    for S in subsets(K, m):
        for i in (1, 2):
            push_pool(pool, link.registry.data_symbols(i, S, 2 * (K - m) + 1))
    return pool


def phase_m_x(link, K, m, pool):
    """One round of phase m, both role orders."""
    _check_k(K)
    if not 1 <= m <= K - 1:
        raise SchemeError(f"phase m needs 1 ≤ m ≤ K-1, got m={m}")
    rep = PhaseReport(str(m))
    everyone = set(range(1, K + 1))
    for i1, i2 in ROLE_ORDERS:
        for S in subsets(K, m):
            u1 = pop_pool(pool, (S, i1), K - m + 1)
            u2 = pop_pool(pool, (S, i2), K - m)
            blk = run_block(link, rep.phase, S, i1, i2, u1, u2, everyone - S)
            rep.blocks.append(blk)
            rep.slots.extend(blk.slots)
            rep.symbols_consumed.extend(u1 + u2)
    rep.groups = form_groups(link, rep.blocks, m, with_one_m=False)
    for g in rep.groups:
        rep.generated_next_order.extend(g.outputs)
    return rep


def phase_K_x(link, K, symbols):
    """Time division of the order-K symbols."""
    rep = PhaseReport(str(K))
    rep.slots = run_tdma(link, rep.phase, symbols)
    rep.symbols_consumed = list(symbols)
    return rep


@dataclass
class ScheduleX:
    """Minimal integer repetition counts for the 2 x K X-channel scheme."""

    K: int
    reps: dict = field(default_factory=dict)
    slots: dict = field(default_factory=dict)

    @property
    def total_slots(self):
        return sum(self.slots.values())

    @property
    def total_data_symbols(self):
        return self.reps["1"] * 2 * (2 * self.K - 1) * self.K

    @property
    def ratio(self):
        return Fraction(self.total_data_symbols, self.total_slots)


def schedule_x(K):
    """Rounds per phase with ``r_{m+1} / r_m = m / (2K-2m-1)``."""
    _check_k(K)
    r = lcm_schedule([Fraction(m, 2 * K - 2 * m - 1) for m in range(1, K - 1)])
    sch = ScheduleX(K)
    for m in range(1, K):
        sch.reps[str(m)] = r[m - 1]
        sch.slots[str(m)] = r[m - 1] * 2 * (K - m + 1) * comb(K, m)
    sch.reps[str(K)] = r[K - 2]
    sch.slots[str(K)] = r[K - 2] * 2 * (K - 1)
    return sch


def run_x(K, seed=0, cap=DEFAULT_CAP, tol=1e-6, coeff_mode="orthonormal"):
    """Execute the full schedule and decode at every receiver."""
    _check_k(K)
    sch = schedule_x(K)
    if K > cap:
        raise SchemeError(f"K={K} exceeds the simulation cap {cap} "
                          f"(schedule needs {sch.total_slots} slots)")
    link = Link(K, 2, seed, coeff_mode)
    pool = {}
    levels = {m: Level(m) for m in range(1, K)}
    reports, data = [], []
    for m in range(1, K):
        for _ in range(sch.reps[str(m)]):
            if m == 1:
                fresh = fresh_pool_x(link, K, 1)
                data.extend(s for q in fresh.values() for s in q)
                for key, q in fresh.items():
                    pool.setdefault(key, []).extend(q)
            rep = phase_m_x(link, K, m, pool)
            push_pool(pool, rep.generated_next_order)
            levels[m].blocks.extend(rep.blocks)
            levels[m].groups.extend(rep.groups)
            reports.append(rep)
    top = []
    for key in sorted((k for k in pool if len(k[0]) == K), key=lambda k: k[1]):
        top.extend(pool.pop(key))
    rep = phase_K_x(link, K, top)
    reports.append(rep)
    if any(pool.values()):
        raise SchemeError("schedule left undelivered symbols")
    worst, margin = 0.0, min((v for _, v in link.margins), default=np.inf)
    for j in range(1, K + 1):
        st = reverse_decode(ReceiverState(j, keep_banks=False), levels, rep.slots)
        targets = [s for s in data if s.spec.demand == {j}]
        worst = max(worst, recovery_error(st.known, targets))
        margin = min(margin, st.margin)
    return EndToEndReport("x", K, seed, sch, len(link.slots), len(data), worst, margin,
                          reports, link, tol)
