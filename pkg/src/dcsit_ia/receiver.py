"""Per-receiver equation banks, P/G matrix assembly and decoding.

A receiver only ever uses its own observations ``y_j(t)``, the channel
coefficients (instantaneous for its own row, delayed for the rest) and the
pre-shared combining coefficients.  Values of symbols it resolves are kept
in :attr:`ReceiverState.known`; comparison with the planted truth happens
afterwards in :func:`recovery_error`.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg


class DecodeError(RuntimeError):
    """The assembled square system is not invertible at tolerance."""


@dataclass
class EquationRow:
    coeffs: np.ndarray
    value: complex
    tag: str = ""


@dataclass
class EquationBank:
    """Linear equations of one receiver over an ordered list of unknowns."""

    receiver: int
    kind: str
    variables: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, coeffs, value, tag=""):
        coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        if len(coeffs) != len(self.variables):
            raise ValueError("row length does not match the variable list")
        self.rows.append(EquationRow(coeffs, complex(value), tag))

    def matrix(self):
        return np.array([r.coeffs for r in self.rows], dtype=complex)

    def values(self):
        return np.array([r.value for r in self.rows], dtype=complex)

    def consistency_error(self):
        """Max relative mismatch between observed values and the planted truth."""
        truth = np.array([v.value for v in self.variables], dtype=complex)
        worst = 0.0
        for r in self.rows:
            expect = np.dot(r.coeffs, truth)
            scale = np.abs(r.coeffs) @ np.abs(truth) + 1e-300
            worst = max(worst, abs(expect - r.value) / scale)
        return worst


def build_p_matrix(bank, K):
    """``P^[j]``: columns are the phase-1 equation coefficients on ``u^[j]``."""
    n = (K - 1) ** 2
    if bank.kind != "phase1" or len(bank.variables) != n or len(bank.rows) != n:
        raise ValueError(f"bank does not hold exactly the {n} phase-1 equations of RX{bank.receiver}")
    return bank.matrix().T


def build_g_matrix(bank, K, m, duplicate_column=False):
    """``G^[j]`` of one block: ``[[Q_ji1^T | side columns], [Q_ji2^T | 0]]``.

    ``duplicate_column`` overwrites the second column with the first; it is
    a fault-injection hook for the verification sweeps.
    """
    n = 2 * (K - m) + 1
    if bank.kind != "block" or len(bank.variables) != n or len(bank.rows) != n:
        raise ValueError(f"incomplete block: expected {n} unknowns and {n} equations")
    g = bank.matrix().T
    if duplicate_column:
        g[:, 1] = g[:, 0]
    return g


def decode(bank, targets=None, rel_tol=None):
    """Solve the leading square subsystem (rows in insertion order)."""
    n = len(bank.variables)
    if len(bank.rows) < n:
        raise DecodeError(f"undecodable at tolerance: {len(bank.rows)} equations for {n} unknowns")
    a = bank.matrix()[:n]
    b = bank.values()[:n]
    try:
        x = linalg.solve(a, b, rel_tol)
    except linalg.LinalgError as e:
        raise DecodeError(f"undecodable at tolerance (RX{bank.receiver}, {bank.kind}): {e}") from e
    out = dict(zip(bank.variables, x))
    if targets is None:
        return out
    return {t: out[t] for t in targets}


class ReceiverState:
    """What RX_j has resolved so far, plus the banks it assembled."""

    def __init__(self, j, keep_banks=True):
        self.j = j
        self.known = {}
        self.banks = []
        self.keep_banks = keep_banks
        self.margin = np.inf

    def _solve(self, bank):
        out = decode(bank)
        n = len(bank.variables)
        self.margin = min(self.margin, linalg.relative_sigma_min(bank.matrix()[:n]))
        if self.keep_banks:
            self.banks.append(bank)
        self.known.update(out)
        return out

    # -- observations -------------------------------------------------------

    def slot_row(self, rec, variables):
        """Coefficients of ``y_j(t)`` on ``variables`` (all active symbols)."""
        pos = {s: k for k, s in enumerate(variables)}
        row = np.zeros(len(variables), dtype=complex)
        for tx, (syms, c) in rec.active.items():
            hj = rec.h[self.j - 1, tx - 1]
            for s, ck in zip(syms, c):
                row[pos[s]] += hj * ck
        return row

    def absorb_side_info(self, blocks):
        """Form ``y_j^T omega_{j i2}`` for every block in which RX_j was outside."""
        for blk in blocks:
            w = blk.omega.get(self.j)
            if w is None:
                continue
            y = np.array([r.y[self.j - 1] for r in blk.slots])
            self.known[blk.side[self.j]] = complex(y @ w)

    def absorb_tdma(self, slots):
        for rec in slots:
            (tx, (syms, c)), = rec.active.items()
            self.known[syms[0]] = rec.y[self.j - 1] / (rec.h[self.j - 1, tx - 1] * c[0])

    def absorb_simultaneous(self, rec):
        """Phase m-II slot: cancel the known symbols, keep the own one."""
        own = None
        acc = rec.y[self.j - 1]
        for tx, (syms, c) in rec.active.items():
            (s,) = syms
            coef = rec.h[self.j - 1, tx - 1] * c[0]
            if tx == self.j:
                own = (s, coef)
                continue
            if s not in self.known:
                raise DecodeError(f"side information missing at RX{self.j}: {s!r}")
            acc -= coef * self.known[s]
        if own is None:
            raise DecodeError(f"RX{self.j} has no symbol in this slot")
        self.known[own[0]] = acc / own[1]
        return own[0]

    # -- structured solves --------------------------------------------------

    def resolve_group(self, g):
        """Recover the side-information members of a group from its outputs."""
        keys = g.member_keys
        members = [g.members[k] for k in keys]
        unknown = [k for k, s in enumerate(members) if s not in self.known]
        out = self._solve_members(g, members, unknown) if unknown else {}
        if g.one_m is not None and g.one_m not in self.known:
            vals = np.array([self.known[s] for s in members])
            self.known[g.one_m] = complex(g.alpha[len(g.outputs)] @ vals)
        return out

    def _solve_members(self, g, members, unknown):
        bank = EquationBank(self.j, "group", [members[k] for k in unknown],
                            meta={"S": g.S, "i1": g.i1})
        eqs = [(g.alpha[r], g.outputs[r]) for r in range(len(g.outputs))]
        if g.one_m is not None and g.one_m in self.known:
            eqs.append((g.alpha[len(g.outputs)], g.one_m))
        for coeffs, sym in eqs:
            if sym not in self.known:
                raise DecodeError(f"RX{self.j} lacks {sym!r} for group {sorted(g.S)}/{g.i1}")
            value = self.known[sym]
            for k, s in enumerate(members):
                if k not in unknown:
                    value -= coeffs[k] * self.known[s]
            bank.add(coeffs[unknown], value, repr(sym))
        return self._solve(bank)

    def block_bank(self, blk):
        """Direct observations first, then the delivered side information."""
        variables = blk.u1 + blk.u2
        bank = EquationBank(self.j, "block", variables,
                            meta={"S": blk.S, "i1": blk.i1, "i2": blk.i2, "phase": blk.phase})
        for rec in blk.slots:
            bank.add(self.slot_row(rec, variables), rec.y[self.j - 1], f"y(t={rec.t})")
        pad = np.zeros(len(blk.u2), dtype=complex)
        for jp in sorted(blk.side):
            s = blk.side[jp]
            if s not in self.known:
                raise DecodeError(f"side information missing at RX{self.j}: {s!r}")
            bank.add(np.concatenate([blk.side_coef[jp], pad]), self.known[s], repr(s))
        return bank

    def decode_block(self, blk):
        return self._solve(self.block_bank(blk))

    def phase1_bank(self, rec1):
        """The (K-1)^2 equations of RX_j on its own data after phase 1."""
        j, K = self.j, rec1.K
        u = rec1.data[j]
        bank = EquationBank(j, "phase1", list(u), meta={"round": rec1.round})
        y = np.array([r.y[j - 1] for r in rec1.slots])
        others = [i for i in range(1, K + 1) if i != j]
        for i in others:
            value = complex(y @ rec1.omega[(j, i)])
            for ip in others:
                if ip == i:
                    continue
                s = rec1.order2[(j, i, ip)]
                if s not in self.known:
                    raise DecodeError(f"order-2 symbol missing at RX{j}: {s!r}")
                value -= self.known[s]
            bank.add(rec1.weights[(j, i, j)], value, f"y^T w({j},{i})")
        for i2 in others:
            for i3 in others:
                if i3 == i2:
                    continue
                s = rec1.order2[(i2, i3, j)]
                if s not in self.known:
                    raise DecodeError(f"order-2 symbol missing at RX{j}: {s!r}")
                bank.add(s.weights, self.known[s], repr(s))
        return bank

    def decode_phase1(self, rec1):
        return self._solve(self.phase1_bank(rec1))


def recovery_error(known, symbols):
    """``max |x_hat - x| / max |x|`` over ``symbols``; inf if one is missing."""
    if not symbols:
        return 0.0
    truth = np.array([s.value for s in symbols])
    if any(s not in known for s in symbols):
        return np.inf
    est = np.array([known[s] for s in symbols])
    return float(np.max(np.abs(est - truth)) / np.max(np.abs(truth)))


@dataclass
class Level:
    """Everything one phase m-I (IC) or phase m (X) left behind."""

    m: int
    blocks: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    mII_slots: list = field(default_factory=list)  # phase (m+1)-II, IC only


def reverse_decode(state, levels, tdma_slots, phase1=()):
    """Structured decoding at one receiver, highest order first.

    ``levels`` maps ``m`` to :class:`Level`.  For each ``m`` from the top
    down the receiver (a) resolves the groups led by other transmitters,
    which also yields their order-(1, m) symbols, (b) reads the phase
    (m+1)-II slots, (c) resolves its own groups and (d) solves every block
    whose demand set contains it.  IC runs finish with the phase-1 solves.
    """
    j = state.j
    for lv in levels.values():
        state.absorb_side_info(lv.blocks)
    state.absorb_tdma(tdma_slots)
    for m in sorted(levels, reverse=True):
        lv = levels[m]
        mine = [g for g in lv.groups if j in g.S]
        for g in mine:
            if g.i1 != j or g.one_m is None:
                state.resolve_group(g)
        for rec in lv.mII_slots:
            if j in rec.active:
                state.absorb_simultaneous(rec)
        for g in mine:
            if g.i1 == j and g.one_m is not None:
                state.resolve_group(g)
        for blk in lv.blocks:
            if j in blk.S:
                state.decode_block(blk)
    for rec1 in phase1:
        state.decode_phase1(rec1)
    return state


def oracle_level(level, n_rx, keep_banks=False):
    """Per-phase decodability with the deferred symbols delivered by an oracle.

    Each receiver is handed the true values of the outputs (and order-(1, m)
    symbols) of every group it belongs to, then runs steps (a), (c), (d) of
    :func:`reverse_decode`.  Returns ``(max relative error, min margin,
    states)``.
    """
    worst, margin, states = 0.0, np.inf, []
    for j in range(1, n_rx + 1):
        st = ReceiverState(j, keep_banks)
        for g in level.groups:
            if j in g.S:
                for s in g.outputs:
                    st.known[s] = s.value
                if g.one_m is not None:
                    st.known[g.one_m] = g.one_m.value
        reverse_decode(st, {level.m: Level(level.m, level.blocks, level.groups)}, [])
        targets = [s for blk in level.blocks if j in blk.S for s in blk.u1 + blk.u2]
        worst = max(worst, recovery_error(st.known, targets))
        margin = min(margin, st.margin)
        states.append(st)
    return worst, margin, states


def oracle_phase1(rec1, keep_banks=False):
    """Phase-1 IC decodability with every order-2 value delivered."""
    worst, margin, states = 0.0, np.inf, []
    for j in range(1, rec1.K + 1):
        st = ReceiverState(j, keep_banks)
        for s in rec1.order2.values():
            if j in s.spec.demand:
                st.known[s] = s.value
        st.decode_phase1(rec1)
        worst = max(worst, recovery_error(st.known, rec1.data[j]))
        margin = min(margin, st.margin)
        states.append(st)
    return worst, margin, states
