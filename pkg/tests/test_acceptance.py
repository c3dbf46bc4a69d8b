"""The ten acceptance criteria, each at its stated tolerance and time budget.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are also
collected and repeated in the terminal summary.
"""

import time
from contextlib import contextmanager
from fractions import Fraction
from math import log

import numpy as np
import pytest

from dcsit_ia import analytics as an
from dcsit_ia import linalg
from dcsit_ia.ic_scheme import run_ic, schedule_ic
from dcsit_ia.sweeps import GENERICITY_FLOOR, check_phase, check_phase1_ic
from dcsit_ia.x_scheme import run_x, schedule_x

from conftest import ACCEPTANCE_LINES

TOL = 1e-6


class StrictBoundError(AssertionError):
    """A sandwich inequality holds only with equality."""


@contextmanager
def criterion(n, title, budget):
    t0 = time.perf_counter()
    note = {"detail": ""}
    try:
        yield note
        elapsed = time.perf_counter() - t0
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
    except AssertionError as e:
        line = f"[{n:2d}] FAIL  {title}: {e}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"[{n:2d}] PASS  {title} ({elapsed:.2f}s){note['detail']}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def test_01_ic_table():
    with criterion(1, "IC table, K = 2..5", 1):
        got = [an.dof_ic_closed(K, 1) for K in range(2, 6)]
        assert got == [1, Fraction(36, 31), Fraction(45, 38), Fraction(1400, 1171)]


def test_02_x_table():
    with criterion(2, "X table, K = 2..5 and K = 3 higher phases", 1):
        got = [an.dof_x_closed(K, 1) for K in range(2, 6)]
        assert got == [Fraction(6, 5), Fraction(9, 7), Fraction(105, 79), Fraction(1575, 1163)]
        assert an.dof_x_closed(3, 2) == Fraction(9, 8)
        assert an.dof_x_closed(3, 3) == 1


def test_03_closed_form_equals_recursion():
    with criterion(3, "closed form equals recursion, 1 <= m <= K <= 64", 30) as note:
        bad, n = [], 0
        for K in range(2, 65):
            for m in range(1, K + 1):
                n += 1
                if an.dof_ic_closed(K, m) != an.dof_ic_recursive(K, m):
                    bad.append(("ic", K, m))
                if an.dof_x_closed(K, m) != an.dof_x_recursive(K, m):
                    bad.append(("x", K, m))
        assert not bad, f"mismatches {bad[:5]}"
        note["detail"] = f", {2 * n} pairs"


def _e2e(run, K, seeds, slots, data):
    worst = 0.0
    for s in seeds:
        rep = run(K, s)
        assert (rep.total_slots, rep.total_data_symbols) == (slots, data), f"seed {s}"
        assert rep.max_error <= TOL, f"seed {s}: error {rep.max_error:.2e}"
        worst = max(worst, rep.max_error)
    return worst


def test_04_ic_three_users_end_to_end():
    with criterion(4, "IC K=3, 100 seeds, 31 slots / 36 symbols", 10) as note:
        worst = _e2e(run_ic, 3, range(100), 31, 36)
        note["detail"] = f", max rel error {worst:.1e}"


def test_05_x_end_to_end():
    with criterion(5, "X K=2 and K=3, 100 seeds each", 10) as note:
        w2 = _e2e(run_x, 2, range(100), 10, 12)
        w3 = _e2e(run_x, 3, range(100), 70, 90)
        note["detail"] = f", max rel error {max(w2, w3):.1e}"


def test_06_larger_schedules():
    with criterion(6, "K=4,5 schedules and 10-seed simulations, both channels", 300) as note:
        worst = 0.0
        for K in (4, 5):
            assert schedule_ic(K).ratio == an.dof_ic_closed(K)
            assert schedule_x(K).ratio == an.dof_x_closed(K)
            for run, sch in ((run_ic, schedule_ic(K)), (run_x, schedule_x(K))):
                worst = max(worst, _e2e(run, K, range(10), sch.total_slots,
                                        sch.total_data_symbols))
        note["detail"] = f", max rel error {worst:.1e}"


def test_07_per_phase_sweeps():
    with criterion(7, "per-phase sweeps, IC 3..8 and X 2..8, 20 seeds", 300) as note:
        n, worst, bad = 0, 0.0, []
        for seed in range(20):
            for channel, k_lo, m_lo in (("ic", 3, 2), ("x", 2, 1)):
                for K in range(k_lo, 9):
                    for m in range(m_lo, K):
                        c = check_phase(channel, K, m, seed, TOL)
                        n += 1
                        worst = max(worst, c.max_error)
                        if not c.passed:
                            bad.append((channel, K, m, seed))
        assert not bad, f"failing phases {bad[:5]}"
        note["detail"] = f", {n} phase runs, max rel error {worst:.1e}"


def _product_margin(rng, m, n):
    a = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    b = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))
    return linalg.relative_sigma_min(a @ b)


def _bordered_margin(rng, m, n):
    def g(*s):
        return rng.standard_normal(s) + 1j * rng.standard_normal(s)
    big = np.block([[g(m, n), g(m, m)], [g(n, n), np.zeros((n, m))]])
    return linalg.relative_sigma_min(big)


def test_08_genericity():
    with criterion(8, "genericity margins > 1e-8, 100 seeds, K <= 6", 120) as note:
        margins = {"P": np.inf, "G": np.inf, "AB": np.inf, "bordered": np.inf}
        for seed in range(100):
            for K in range(3, 7):
                c = check_phase1_ic(K, seed)
                assert c.passed, f"P, K={K}, seed {seed}: {c.failures}"
                margins["P"] = min(margins["P"], c.min_margin)
                for m in range(2, K):
                    c = check_phase("ic", K, m, seed)
                    assert c.passed, f"G, K={K}, m={m}, seed {seed}: {c.failures}"
                    margins["G"] = min(margins["G"], c.min_margin)
            rng = np.random.default_rng(seed)
            for m in range(1, 7):
                for n in range(m, 7):
                    margins["AB"] = min(margins["AB"], _product_margin(rng, m, n))
                    margins["bordered"] = min(margins["bordered"], _bordered_margin(rng, m, n))
        low = {k: v for k, v in margins.items() if not v > GENERICITY_FLOOR}
        assert not low, f"margins below floor {low}"
        note["detail"] = ", min " + ", ".join(f"{k} {v:.1e}" for k, v in margins.items())


def _asymptotics_except_strictness():
    lim = an.limits()
    ic = [an.dof_ic_closed(K) for K in range(2, 76)]
    x = [an.dof_x_closed(K) for K in range(2, 76)]
    assert all(a < b for a, b in zip(ic, ic[1:])), "IC DoF not increasing"
    assert all(a < b for a, b in zip(x, x[1:])), "X DoF not increasing"
    assert all(float(v) < lim["ic"] - 1e-12 for v in ic)
    assert all(float(v) < lim["x"] - 1e-12 for v in x)
    assert abs(lim["ic"] - 4 / (6 * log(2) - 1)) < 1e-15
    g75 = abs(an.dof_ic_float(75) - lim["ic"])
    g2000 = abs(an.dof_ic_float(2000) - lim["ic"])
    assert g2000 < g75
    assert g2000 < an.IC_GAP_THRESHOLD_K2000, f"gap {g2000:.3e}"
    weak = []
    for K in range(2, 61):
        b = an.bounds_check(K, exact=True)
        for kind in ("psi", "phi"):
            if kind in b:
                s = b[kind]
                assert s["lower"] < s["value"] <= s["upper"], f"{kind} K={K} violated"
                if not s["holds"]:
                    weak.append((kind, K))
    return weak


@pytest.mark.xfail(raises=StrictBoundError, strict=True,
                   reason="Phi upper bound is attained with equality at K = 3")
def test_09_asymptotics():
    with criterion(9, "asymptotics: strict sandwiches to K=60, monotone, bounded, gap", 60):
        weak = _asymptotics_except_strictness()
        if weak:
            raise StrictBoundError(f"equality instead of strict inequality at {weak}")


def test_09_asymptotics_weak_form():
    # everything in criterion 9 other than strictness, plus the exact equality case
    weak = _asymptotics_except_strictness()
    assert weak == [("phi", 3)]
    b = an.bounds_check(3)["phi"]
    assert b["value"] == b["upper"] == Fraction(2, 9)


def test_10_cross_reference():
    with criterion(10, "X DoF above 4/3 - 2/(3(3K-1)), 3 <= K <= 75", 1):
        for K in range(3, 76):
            assert an.dof_x_closed(K) > Fraction(4, 3) - Fraction(2, 3 * (3 * K - 1)), f"K={K}"
