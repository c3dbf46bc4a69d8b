"""Multiphase delayed-CSIT scheme for the K-user SISO interference channel.

Phase 1 sends fresh data and turns overheard interference into order-2
symbols; phase m-I (2 <= m <= K-1) turns order-m symbols into order-(m+1)
and order-(1, m) symbols; phase m-II delivers the order-(1, m-1) symbols
with one slot per receiver set; phase K-I is plain time division.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import linalg
from .engine import (EndToEndReport, Link, PhaseReport, SchemeError, cyclic_pairs,
                     form_groups, lcm_schedule, pop_pool, push_pool, run_block,
                     run_tdma, subsets)
from .receiver import Level, ReceiverState, recovery_error, reverse_decode

DEFAULT_CAP = 5


def _check_k(K):
    if K < 3:
        raise SchemeError("IC scheme requires K ≥ 3")


@dataclass
class Phase1Record:
    """What one phase-1 round leaves for the receivers."""

    K: int
    round: int
    slots: list
    data: dict  # i -> list of data Symbols u^[i]
    coef: dict  # i -> C^[i], ((K-1)^2 + 1) x (K-1)^2
    omega: dict  # (j, i) -> left null vector of Q_ji
    weights: dict  # (j, i, i') -> Q_ji'^T omega_ji
    order2: dict  # (j, i, i') -> u^[i'|i',j]


def phase1_ic(link, K, round_idx=0):
    """One round of phase 1: every transmitter sends ``(K-1)^2`` fresh symbols."""
    _check_k(K)
    n = (K - 1) ** 2
    T = n + 1
    reg = link.registry
    data = {i: reg.data_symbols(i, {i}, n) for i in range(1, K + 1)}
    coef = {i: link.coeffs(T, n) for i in range(1, K + 1)}
    recs = [link.transmit("1", {i: (data[i], coef[i][t]) for i in data}) for t in range(T)]
    view = link.view()
    slot_ids = [r.t for r in recs]
    omega, weights, order2 = {}, {}, {}
    for j in range(1, K + 1):
        q = {i: view.gains(j, i, slot_ids)[:, None] * coef[i] for i in data}
        for i in data:
            if i == j:
                continue
            link.margins.append((f"Q{j}{i}", linalg.relative_sigma_min(q[i])))
            try:
                w = linalg.left_null_vector(q[i])
            except linalg.LinalgError as e:
                raise SchemeError(f"rank failure in phase 1: {e}") from e
            omega[(j, i)] = w
            for ip in data:
                weights[(j, i, ip)] = q[ip].T @ w
    for j in range(1, K + 1):
        for i in range(1, K + 1):
            if i == j:
                continue
            for ip in range(1, K + 1):
                if ip in (i, j):
                    continue
                order2[(j, i, ip)] = reg.new_symbol(ip, {ip, j}, parents=data[ip],
                                                    weights=weights[(j, i, ip)])
    rec1 = Phase1Record(K, round_idx, recs, data, coef, omega, weights, order2)
    return PhaseReport("1", slots=recs,
                       symbols_consumed=[s for i in data for s in data[i]],
                       generated_next_order=list(order2.values()),
                       extra={"phase1": [rec1]})


def fresh_pool_ic(link, K, m):
    """Fresh order-m symbols, exactly one round's worth for phase m-I."""
    pool = {}
    for S in subsets(K, m):
        for i in sorted(S):
            push_pool(pool, link.registry.data_symbols(i, S, 2 * (K - m) + 1))
    return pool


def phase_mI_ic(link, K, m, pool):
    """One round of phase m-I over every ``S_m`` and its cyclic pairs."""
    _check_k(K)
    if not 2 <= m <= K - 1:
        raise SchemeError(f"phase m-I needs 2 ≤ m ≤ K-1, got m={m}")
    rep = PhaseReport(f"{m}-I")
    everyone = set(range(1, K + 1))
    for S in subsets(K, m):
        for i1, i2 in cyclic_pairs(S):
            u1 = pop_pool(pool, (S, i1), K - m + 1)
            u2 = pop_pool(pool, (S, i2), K - m)
            blk = run_block(link, rep.phase, S, i1, i2, u1, u2, everyone - S)
            rep.blocks.append(blk)
            rep.slots.extend(blk.slots)
            rep.symbols_consumed.extend(u1 + u2)
    rep.groups = form_groups(link, rep.blocks, m - 1, with_one_m=True)
    for g in rep.groups:
        rep.generated_next_order.extend(g.outputs)
        rep.generated_one_m.append(g.one_m)
    return rep


def phase_mII_ic(link, m, pool):
    """Deliver order-(1, m-1) symbols: one slot per ``S_m``, all of it at once.

    ``pool`` maps ``S_m`` to a FIFO list of such symbols; each slot takes one
    symbol from every transmitter in ``S_m``.
    """
    rep = PhaseReport(f"{m}-II")
    for S in sorted(pool, key=sorted):
        queue = pool[S]
        while queue:
            batch = {}
            for s in list(queue):
                if s.tx not in batch:
                    batch[s.tx] = s
            if set(batch) != set(S):
                raise SchemeError(f"pool shape mismatch in phase {m}-II for {sorted(S)}")
            for s in batch.values():
                queue.remove(s)
            rec = link.transmit(rep.phase, {i: ([s], np.ones(1)) for i, s in sorted(batch.items())})
            rep.slots.append(rec)
            rep.symbols_consumed.extend(batch[i] for i in sorted(batch))
    return rep


def phase_KI_ic(link, K, symbols):
    """Time division of the order-K symbols."""
    rep = PhaseReport(f"{K}-I")
    rep.slots = run_tdma(link, rep.phase, symbols)
    rep.symbols_consumed = list(symbols)
    return rep


@dataclass
class ScheduleIC:
    """Minimal integer repetition counts for the K-user IC scheme."""

    K: int
    reps: dict = field(default_factory=dict)  # phase label -> rounds
    slots: dict = field(default_factory=dict)  # phase label -> slots

    @property
    def total_slots(self):
        return sum(self.slots.values())

    @property
    def total_data_symbols(self):
        return self.reps["1"] * self.K * (self.K - 1) ** 2

    @property
    def ratio(self):
        return Fraction(self.total_data_symbols, self.total_slots)


def schedule_ic(K):
    """Rounds per phase such that every phase consumes exactly what it is fed.

    Rounds of phase m-I satisfy ``r_2 / r_1 = (K-2)/(2K-3)`` and
    ``r_{m+1} / r_m = (m-1)/(2K-2m-1)``; phase m-II runs once per ``S_m``
    per round of phase (m-1)-I.
    """
    _check_k(K)
    ratios = [Fraction(K - 2, 2 * K - 3)]
    ratios += [Fraction(m - 1, 2 * K - 2 * m - 1) for m in range(2, K - 1)]
    r = lcm_schedule(ratios)  # r[m-1] = rounds of phase m-I
    sch = ScheduleIC(K)
    sch.reps["1"] = r[0]
    sch.slots["1"] = r[0] * ((K - 1) ** 2 + 1)
    for m in range(2, K):
        sch.reps[f"{m}-I"] = r[m - 1]
        sch.slots[f"{m}-I"] = r[m - 1] * m * (K - m + 1) * comb(K, m)
    sch.reps[f"{K}-I"] = r[K - 2]
    sch.slots[f"{K}-I"] = r[K - 2] * K * (K - 2)
    for m in range(3, K + 1):
        sch.reps[f"{m}-II"] = r[m - 2]
        sch.slots[f"{m}-II"] = r[m - 2] * comb(K, m)
    return sch


def execution_order(K):
    """1, 2-I, 3-I, 3-II, 4-I, 4-II, ..., K-I, K-II."""
    order = ["1", "2-I"]
    for m in range(3, K + 1):
        order += [f"{m}-I", f"{m}-II"]
    return order


def run_ic(K, seed=0, cap=DEFAULT_CAP, tol=1e-6, coeff_mode="orthonormal"):
    """Execute the full schedule and decode at every receiver."""
    _check_k(K)
    sch = schedule_ic(K)
    if K > cap:
        raise SchemeError(f"K={K} exceeds the simulation cap {cap} "
                          f"(schedule needs {sch.total_slots} slots)")
    link = Link(K, K, seed, coeff_mode)
    pool, one_m_pool = {}, {}
    levels = {m: Level(m) for m in range(2, K)}
    phase1, reports, tdma = [], [], []
    for label in execution_order(K):
        if label == "1":
            for r in range(sch.reps["1"]):
                rep = phase1_ic(link, K, r)
                phase1.extend(rep.extra["phase1"])
                push_pool(pool, rep.generated_next_order)
                reports.append(rep)
        elif label == f"{K}-I":
            rep = phase_KI_ic(link, K, _drain(pool, K))
            tdma = rep.slots
            reports.append(rep)
        elif label.endswith("-II"):
            m = int(label.split("-")[0])
            rep = phase_mII_ic(link, m, one_m_pool.pop(m, {}))
            levels[m - 1].mII_slots = rep.slots
            reports.append(rep)
        else:
            m = int(label.split("-")[0])
            for _ in range(sch.reps[label]):
                rep = phase_mI_ic(link, K, m, pool)
                push_pool(pool, rep.generated_next_order)
                for s in rep.generated_one_m:
                    one_m_pool.setdefault(m + 1, {}).setdefault(s.spec.demand | s.spec.knowledge, []).append(s)
                levels[m].blocks.extend(rep.blocks)
                levels[m].groups.extend(rep.groups)
                reports.append(rep)
    if any(pool.values()):
        raise SchemeError("schedule left undelivered symbols")
    worst, margin = 0.0, min((v for _, v in link.margins), default=np.inf)
    for j in range(1, K + 1):
        st = reverse_decode(ReceiverState(j, keep_banks=False), levels, tdma, phase1)
        targets = [s for rec1 in phase1 for s in rec1.data[j]]
        worst = max(worst, recovery_error(st.known, targets))
        margin = min(margin, st.margin)
    n_data = sum(len(rec1.data[i]) for rec1 in phase1 for i in rec1.data)
    return EndToEndReport("ic", K, seed, sch, len(link.slots), n_data, worst, margin,
                          reports, link, tol)


def _drain(pool, K):
    out = []
    for key in sorted((k for k in pool if len(k[0]) == K), key=lambda k: k[1]):
        out.extend(pool.pop(key))
    return out
