"""High-precision distance of the IC DoF at K = 2000 from its limit.

Used once to fix ``IC_GAP_THRESHOLD_K2000``; needs mpmath (``pip install
artifact[scripts]``).
"""

import argparse

import mpmath as mp

from dcsit_ia import analytics


def psi(K):
    tail, total = mp.mpf(1), mp.mpf(0)
    for l in range(K - 3, -1, -1):
        tail *= mp.mpf(l + 1) / (2 * l + 3)
        total += mp.mpf((K - l - 1) * (3 * l * l + l - 1)) / (2 * (K - l) * (4 * l * l - 1)) * tail
    return total


def dof_ic(K):
    i = K - 2
    a = psi(K) - mp.mpf(i * (i - 1)) / (4 * (4 * i * i - 1))
    return 1 / (1 - mp.mpf(K - 2) / (K * (K - 1) ** 2) - mp.mpf(K - 2) / (K - 1) * a)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=2000)
    p.add_argument("--digits", type=int, default=60)
    a = p.parse_args()
    mp.mp.dps = a.digits
    limit = 4 / (6 * mp.log(2) - 1)
    gap = abs(dof_ic(a.k) - limit)
    print(f"K={a.k}  gap={mp.nstr(gap, 12)}  float path={abs(analytics.dof_ic_float(a.k) - float(limit)):.6e}")
    print(f"threshold in use: {analytics.IC_GAP_THRESHOLD_K2000}")
