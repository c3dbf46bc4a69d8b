"""I.i.d. fast-fading channel process and the delayed-CSIT view of it.

Receivers and transmitters are labelled ``1..n`` and slots ``t = 1, 2, ...``
as in the model: ``y_j(t) = sum_i h_ji(t) x_i(t)`` with ``h_ji(t)`` i.i.d.
CN(0, 1) across ``t``, ``j`` and ``i``.
"""

import csv
from dataclasses import dataclass

import numpy as np

# SeedSequence spawn keys; each stream is an independent PCG64 generator so
# draws from one never perturb another.
CHANNEL_STREAM = 0
COEFF_STREAM = 1
DATA_STREAM = 2


class CausalityError(LookupError):
    """Raised when channel state is requested before it is available."""


def make_streams(seed):
    """Return ``(channel, coeff, data)`` generators derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.Generator(np.random.PCG64(s)) for s in children)


def cn01(rng, size):
    """Circularly-symmetric CN(0, 1) samples via Box-Muller.

    Each complex sample consumes two uniforms; real and imaginary parts are
    N(0, 1/2) each, so ``E|h|^2 = 1``.
    """
    size = tuple(np.atleast_1d(size))
    n = int(np.prod(size))
    u1 = 1.0 - rng.random(n)  # (0, 1]
    u2 = rng.random(n)
    r = np.sqrt(-2.0 * np.log(u1))
    z = r * (np.cos(2 * np.pi * u2) + 1j * np.sin(2 * np.pi * u2)) / np.sqrt(2.0)
    return z.reshape(size)


@dataclass(frozen=True)
class CsitView:
    """Channel matrices of slots ``1..now-1``, the only CSI a transmitter may use."""

    now: int
    visible: tuple

    def h(self, t):
        """Full matrix ``H(t)``; ``t`` must be strictly before ``now``."""
        if not 1 <= t < self.now:
            raise CausalityError(f"slot {t} is not visible at the start of slot {self.now}")
        return self.visible[t - 1]

    def gains(self, j, i, slots):
        """Vector ``[h_ji(t) for t in slots]``, i.e. the diagonal of ``D_ji``."""
        return np.array([self.h(t)[j - 1, i - 1] for t in slots], dtype=complex)

    def __len__(self):
        return len(self.visible)


class FadingProcess:
    """Single-owner generator of the per-slot channel matrices ``H(t)``."""

    def __init__(self, n_rx, n_tx, seed=0, rng=None):
        if n_rx < 1 or n_tx < 1:
            raise ValueError("need at least one receiver and one transmitter")
        self.n_rx = n_rx
        self.n_tx = n_tx
        self.seed = seed
        self._rng = rng if rng is not None else make_streams(seed)[CHANNEL_STREAM]
        self.history = []

    @property
    def current_slot(self):
        return len(self.history)

    def draw_slot(self):
        h = cn01(self._rng, (self.n_rx, self.n_tx))
        h.setflags(write=False)
        self.history.append(h)
        return h

    def csit_view(self, t):
        """Delayed CSIT at the start of slot ``t``: slots ``1..t-1``."""
        if t < 1:
            raise ValueError("slots are numbered from 1")
        if t > self.current_slot + 1:
            raise CausalityError("future CSIT requested")
        return CsitView(now=t, visible=tuple(self.history[: t - 1]))

    def rx_csi_row(self, j, t):
        """Row ``j`` of ``H(t)``: what RX_j knows about slot ``t`` during it."""
        if not 1 <= j <= self.n_rx:
            raise IndexError(f"receiver {j} out of range 1..{self.n_rx}")
        if not 1 <= t <= self.current_slot:
            raise CausalityError(f"slot {t} has not been drawn")
        return self.history[t - 1][j - 1].copy()

    def dump_csv(self, path):
        """Write the trace as rows ``(t, j, i, re, im)``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "j", "i", "re", "im"])
            for t, h in enumerate(self.history, start=1):
                for j in range(self.n_rx):
                    for i in range(self.n_tx):
                        z = h[j, i]
                        w.writerow([t, j + 1, i + 1, repr(float(z.real)), repr(float(z.imag))])
