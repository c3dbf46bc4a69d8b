"""Per-phase verification: counts against the formulas, oracle decodability
and genericity margins of the P and G matrices."""

from dataclasses import dataclass, field

import numpy as np

from . import analytics, linalg
from .engine import Link
from .ic_scheme import fresh_pool_ic, phase1_ic, phase_mI_ic
from .receiver import (Level, build_g_matrix, build_p_matrix, oracle_level,
                       oracle_phase1)
from .x_scheme import fresh_pool_x, phase_m_x

GENERICITY_FLOOR = 1e-8


@dataclass
class PhaseCheck:
    channel: str
    K: int
    m: int
    seed: int
    counts: dict
    expected: dict
    max_error: float
    min_margin: float
    tol: float = 1e-6
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return (self.counts == self.expected and self.max_error <= self.tol
                and self.min_margin > GENERICITY_FLOOR and not self.failures)

    def as_dict(self):
        return {"channel": self.channel, "K": self.K, "m": self.m, "seed": self.seed,
                "passed": self.passed, "counts": self.counts, "expected": self.expected,
                "max_rel_error": self.max_error, "min_sigma_ratio": self.min_margin,
                "failures": self.failures}


def _g_margins(states, K, m, inject_fault=False):
    worst, failures = np.inf, []
    for st in states:
        for bank in st.banks:
            if bank.kind != "block":
                continue
            g = build_g_matrix(bank, K, m, duplicate_column=inject_fault)
            r = linalg.relative_sigma_min(g)
            worst = min(worst, r)
            if r <= GENERICITY_FLOOR:
                failures.append({"receiver": st.j, "matrix": "G", "S": sorted(bank.meta["S"]),
                                 "i1": bank.meta["i1"], "fingerprint": linalg.fingerprint(g)})
    return worst, failures


def check_phase1_ic(K, seed, tol=1e-6, coeff_mode="orthonormal"):
    link = Link(K, K, seed, coeff_mode)
    rep = phase1_ic(link, K)
    rec1 = rep.extra["phase1"][0]
    counts = {"N_consumed": len(rep.symbols_consumed), "T_slots": rep.slots_used,
              "N_next": len(rep.generated_next_order)}
    err, _, states = oracle_phase1(rec1, keep_banks=True)
    margin, failures = np.inf, []
    for st in states:
        p = build_p_matrix(st.banks[0], K)
        r = linalg.relative_sigma_min(p)
        margin = min(margin, r)
        if r <= GENERICITY_FLOOR:
            failures.append({"receiver": st.j, "matrix": "P", "fingerprint": linalg.fingerprint(p)})
    return PhaseCheck("ic", K, 1, seed, counts, analytics.phase1_counts_ic(K), err, margin,
                      tol, failures)


def check_phase(channel, K, m, seed, tol=1e-6, inject_fault=False, coeff_mode="orthonormal"):
    """Run one round of phase m on fresh symbols and verify it end to end."""
    if channel == "ic":
        link = Link(K, K, seed, coeff_mode)
        rep = phase_mI_ic(link, K, m, fresh_pool_ic(link, K, m))
    elif channel == "x":
        link = Link(K, 2, seed, coeff_mode)
        rep = phase_m_x(link, K, m, fresh_pool_x(link, K, m))
    else:
        raise ValueError(f"unknown channel {channel!r}")
    counts = {"N_consumed": len(rep.symbols_consumed), "T_slots": rep.slots_used,
              "N_next": len(rep.generated_next_order)}
    if channel == "ic":
        counts["N_one_m"] = len(rep.generated_one_m)
    orders_ok = (all(s.spec.order == (m + 1, 0) for s in rep.generated_next_order)
                 and all(s.spec.order == (1, m) for s in rep.generated_one_m))
    err, margin, states = oracle_level(Level(m, rep.blocks, rep.groups), link.n_rx,
                                       keep_banks=True)
    g_margin, failures = _g_margins(states, K, m, inject_fault)
    if not orders_ok:
        failures.append({"order": "generated symbol has the wrong order pair"})
    tx_margin = min(v for _, v in link.margins)
    return PhaseCheck(channel, K, m, seed, counts, analytics.phase_counts(channel, K, m),
                      err, min(margin, g_margin, tx_margin), tol, failures)
