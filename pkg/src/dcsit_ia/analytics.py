"""Exact DoF formulas, recursions, phase counts and asymptotic series.

Everything below ``RATIONAL_CAP`` is evaluated with :class:`fractions.Fraction`;
the float path exists for the large-K asymptotics, where product terms of
the form ``prod l/(2l+1)`` underflow harmlessly to zero.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, log

RATIONAL_CAP = 64

# X-channel DoF of the prior K x K delayed-CSIT scheme, K = 2..5, quoted as
# reference constants next to our values.
PRIOR_X_REFERENCE = {2: Fraction(6, 5), 3: Fraction(5, 4), 4: Fraction(14, 11), 5: Fraction(9, 7)}

# |DoF_IC(2000, 1) - limit| evaluated with 60-digit arithmetic is 2.77514e-4.
IC_GAP_THRESHOLD_K2000 = 2.8e-4


def _check(K, m, k_min=2):
    if K < k_min or not 1 <= m <= K:
        raise ValueError(f"need K ≥ {k_min} and 1 ≤ m ≤ K, got K={K}, m={m}")


def _tail_product(lo, hi):
    """``prod_{l=lo}^{hi} l / (2l + 1)`` (empty product is 1)."""
    p = Fraction(1)
    for l in range(lo, hi + 1):
        p *= Fraction(l, 2 * l + 1)
    return p


def _tail_products(i):
    """``[prod_{j=l+1}^{i} j/(2j+1) for l in 0..i]`` in one backward sweep."""
    out = [Fraction(1)] * (i + 1)
    for l in range(i - 1, -1, -1):
        out[l] = out[l + 1] * Fraction(l + 1, 2 * l + 3)
    return out


# -- partial-fraction coefficients ---------------------------------------------

def appendix_coefficients(kind, K, i, l):
    """Partial-fraction coefficients ``a^[K-i]_{K-l}`` or ``b^[K-i]_{K-l}``.

    ``a``: defined for ``0 <= l <= i <= K-2``; ``l == i`` is the diagonal
    ``-i(i-1)/(2(4i^2-1))``.  ``b``: defined for ``0 <= l < i <= K-1``.
    """
    if kind == "a":
        if not 0 <= l <= i <= K - 2:
            raise ValueError("a-coefficients need 0 ≤ l ≤ i ≤ K-2")
        if l == i:
            return Fraction(-i * (i - 1), 2 * (4 * i * i - 1))
        return (Fraction((i - l + 1) * (3 * l * l + l - 1), 2 * (4 * l * l - 1))
                * _tail_product(l + 1, i))
    if kind == "b":
        if not 0 <= l < i <= K - 1:
            raise ValueError("b-coefficients need 0 ≤ l < i ≤ K-1")
        return Fraction((i - l) * (l + 1), 2 * l + 1) * _tail_product(l + 1, i)
    raise ValueError(f"unknown coefficient family {kind!r}")


def a_sum(K, i):
    """``A_{K-i}(K) = sum_l a^[K-i]_{K-l} / (K-l)``, ``0 <= i <= K-2``."""
    tails = _tail_products(i)
    total = Fraction(-i * (i - 1), 2 * (4 * i * i - 1) * (K - i))
    for l in range(i):
        total += Fraction((i - l + 1) * (3 * l * l + l - 1),
                          2 * (K - l) * (4 * l * l - 1)) * tails[l]
    return total


def b_sum(K, i):
    """``B_{K-i}(K) = sum_l b^[K-i]_{K-l} / (K-l)``, ``0 <= i <= K-1``."""
    tails = _tail_products(i)
    return sum((Fraction((i - l) * (l + 1), (K - l) * (2 * l + 1)) * tails[l]
                for l in range(i)), Fraction(0))


def a2(K):
    """``A_2(K)`` that enters the IC phase-1 closed form (K >= 3)."""
    if K < 3:
        raise ValueError("A_2 needs K ≥ 3")
    return a_sum(K, K - 2)


# -- DoF: closed forms and recursions -----------------------------------------

def dof_ic_closed(K, m=1):
    _check(K, m)
    if K == 2:
        return Fraction(1)
    if m == 1:
        inv = 1 - Fraction(K - 2, K * (K - 1) ** 2) - Fraction(K - 2, K - 1) * a2(K)
        return 1 / inv
    return 1 / (1 - a_sum(K, K - m))


def dof_ic_recursive(K, m=1):
    """Backward recursion from ``DoF_K = 1``; phase-1 accounting for ``m = 1``."""
    _check(K, m)
    if K == 2:
        return Fraction(1)
    d = Fraction(1)
    for mm in range(K - 1, max(m, 2) - 1, -1):
        d = Fraction(mm * (2 * (K - mm) + 1)) / (
            mm * (K - mm + 1) + Fraction(K - mm, mm + 1) + Fraction((mm - 1) * (K - mm)) / d)
    if m == 1:
        d = Fraction((K - 1) ** 2 * K) / ((K - 1) ** 2 + 1 + Fraction(K * (K - 1) * (K - 2)) / d)
    return d


def dof_x_closed(K, m=1):
    _check(K, m)
    return 1 / (1 - b_sum(K, K - m))


def dof_x_recursive(K, m=1):
    _check(K, m)
    d = Fraction(1)
    for mm in range(K - 1, m - 1, -1):
        d = Fraction((mm + 1) * (2 * (K - mm) + 1)) / (
            (mm + 1) * (K - mm + 1) + Fraction(mm * (K - mm)) / d)
    return d


def phase_counts(kind, K, m):
    """Per-round symbol and slot counts of one phase.

    ``ic``: ``N_consumed, T_slots, N_next, N_one_m`` of phase m-I
    (2 <= m <= K-1).  ``x``: ``N_consumed, T_slots, N_next`` of phase m
    (1 <= m <= K-1).
    """
    if kind == "ic":
        if K < 3 or not 2 <= m <= K - 1:
            raise ValueError("ic counts need K ≥ 3 and 2 ≤ m ≤ K-1")
        return {"N_consumed": m * (2 * (K - m) + 1) * comb(K, m),
                "T_slots": m * (K - m + 1) * comb(K, m),
                "N_next": (m * m - 1) * comb(K, m + 1),
                "N_one_m": (m + 1) * comb(K, m + 1)}
    if kind == "x":
        if K < 2 or not 1 <= m <= K - 1:
            raise ValueError("x counts need K ≥ 2 and 1 ≤ m ≤ K-1")
        return {"N_consumed": 2 * (2 * (K - m) + 1) * comb(K, m),
                "T_slots": 2 * (K - m + 1) * comb(K, m),
                "N_next": 2 * m * comb(K, m + 1)}
    raise ValueError(f"unknown channel kind {kind!r}")


def phase1_counts_ic(K):
    if K < 3:
        raise ValueError("IC phase 1 needs K ≥ 3")
    return {"N_consumed": K * (K - 1) ** 2, "T_slots": (K - 1) ** 2 + 1,
            "N_next": K * (K - 1) * (K - 2)}


# -- asymptotic series ---------------------------------------------------------

@dataclass(frozen=True)
class SeriesValue:
    kind: str
    k: int
    value: float
    exact: Fraction = None
    p: int = None


SERIES_KINDS = ("psi", "phi", "gamma", "lambda")


def _series_terms(kind, K, p, num):
    """Yield the summands; ``num`` is Fraction or float."""
    if kind in ("psi", "phi"):
        top = K - 2 if kind == "psi" else K - 1
        tail = num(1)
        terms = []
        for l in range(top - 1, -1, -1):
            tail = tail * num(l + 1) / num(2 * l + 3)
            if kind == "psi":
                c = num((K - l - 1) * (3 * l * l + l - 1)) / num(2 * (K - l) * (4 * l * l - 1))
            else:
                c = num((K - l - 1) * (l + 1)) / num((K - l) * (2 * l + 1))
            terms.append(c * tail)
        return terms
    terms = []
    for l in range(0, K - p + 1):
        n = K - l
        w = num(1) / num(2) ** n if num is Fraction else 2.0 ** -n
        if kind == "gamma":
            terms.append(num(n - 1) / num(n) * w)
        else:
            terms.append(num(l * (n - 1)) / num(K * n) * w)
    return terms


def series(kind, K, p=None, exact=None):
    """Evaluate Psi (K >= 3), Phi (K >= 2), Gamma_p or Lambda_p (p >= 1).

    ``exact=None`` uses the rational path for ``K <= RATIONAL_CAP``.
    """
    if kind not in SERIES_KINDS:
        raise ValueError(f"unknown series {kind!r}")
    if kind == "psi" and K < 3:
        raise ValueError("Psi needs K ≥ 3")
    if kind == "phi" and K < 2:
        raise ValueError("Phi needs K ≥ 2")
    if kind in ("gamma", "lambda"):
        if p is None or p < 1:
            raise ValueError("Gamma_p and Lambda_p need p ≥ 1")
        if K < 1:
            raise ValueError("need K ≥ 1")
    if exact is None:
        exact = K <= RATIONAL_CAP
    if exact:
        v = sum(_series_terms(kind, K, p, Fraction), Fraction(0))
        return SeriesValue(kind, K, float(v), v, p)
    # smallest terms first
    v = float(sum(sorted(_series_terms(kind, K, p, float), key=abs)))
    return SeriesValue(kind, K, v, None, p)


def dof_ic_float(K):
    """``DoF_1^IC(K)`` in double precision, usable for very large K."""
    if K < 3:
        return float(dof_ic_closed(K))
    i = K - 2
    psi = series("psi", K, exact=False).value
    a = psi - i * (i - 1) / (4 * (4 * i * i - 1))
    return 1.0 / (1.0 - (K - 2) / (K * (K - 1) ** 2) - (K - 2) / (K - 1) * a)


def dof_x_float(K):
    return 1.0 / (1.0 - series("phi", K, exact=False).value)


def limits():
    ln2 = log(2.0)
    return {"ic": 4 / (6 * ln2 - 1), "x": 1 / ln2,
            "psi": 21 / 16 - 1.5 * ln2, "phi": 1 - ln2}


def gamma_limit(p):
    return -log(2.0) + 2.0 ** (1 - p) + sum(1 / (n * 2.0 ** n) for n in range(1, p))


def bounds_check(K, exact=None):
    """Evaluate both sandwich inequalities; returns a dict of booleans and sides."""
    if exact is None:
        exact = K <= RATIONAL_CAP
    num = Fraction if exact else float

    def val(kind, p=None):
        s = series(kind, K, p, exact)
        return s.exact if exact else s.value

    out = {"K": K, "exact": exact}
    if K >= 3:
        lo = num(3 * K) / num(2 * K - 3) * val("lambda", 3)
        hi = num(3) / num(2) * val("gamma", 3) + num(K - 2) / (num(5 * (K - 1)) * num(2) ** K)
        mid = val("psi")
        out["psi"] = {"lower": lo, "value": mid, "upper": hi, "holds": lo < mid < hi}
    if K >= 2:
        lo = num(2 * K) / num(2 * K - 1) * val("lambda", 2)
        hi = (val("gamma", 3) + num((K - 1) ** 2) / num(2 * (2 * K - 1) * (2 * K - 3))
              + num(K - 1) / (num(15 * K) * num(2) ** K))
        mid = val("phi")
        out["phi"] = {"lower": lo, "value": mid, "upper": hi, "holds": lo < mid < hi}
    out["holds"] = all(v["holds"] for k, v in out.items() if k in ("psi", "phi"))
    return out
