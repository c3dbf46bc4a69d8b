"""Transmitted scalars as linear functionals of the ground data symbols.

A symbol ``u^[i|S_m;S_n]`` is available at TX_i, known at every receiver in
``S_n`` and wanted by every receiver in ``S_m``.  Its identity here is a
:class:`SymbolSpec` plus a :class:`LinearForm` over the planted data, so a
decoded value can always be checked against the truth.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .channel import cn01


class OwnershipError(ValueError):
    """A combination would mix data of different transmitters."""


@dataclass(frozen=True)
class SymbolSpec:
    tx: int
    demand: frozenset
    knowledge: frozenset = frozenset()
    serial: int = 0

    def __post_init__(self):
        if not self.demand:
            raise ValueError("demand set must be nonempty")

    @property
    def order(self):
        return (len(self.demand), len(self.knowledge))

    @property
    def key(self):
        """Class identity without the serial number."""
        return (self.tx, self.demand, self.knowledge)

    def label(self):
        d = ",".join(map(str, sorted(self.demand)))
        if self.knowledge:
            d += ";" + ",".join(map(str, sorted(self.knowledge)))
        return f"u^[{self.tx}|{d}]_{self.serial}"


@dataclass(frozen=True, eq=False)
class LinearForm:
    """Sparse coefficient vector over the global ground-symbol index.

    ``idx`` is sorted and unique; the support lies in ``owner_tx``'s block.
    """

    owner_tx: int
    idx: np.ndarray
    coef: np.ndarray

    @classmethod
    def unit(cls, owner_tx, index):
        return cls(owner_tx, np.array([index], dtype=np.int64), np.ones(1, dtype=complex))

    @classmethod
    def zero(cls, owner_tx):
        return cls(owner_tx, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=complex))

    def dense(self, size):
        v = np.zeros(size, dtype=complex)
        v[self.idx] = self.coef
        return v

    def is_zero(self, atol=0.0):
        return bool(np.all(np.abs(self.coef) <= atol))


def combine(forms, coeffs):
    """Exact linear combination ``sum_k coeffs[k] * forms[k]``."""
    forms = list(forms)
    coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
    if not forms:
        raise ValueError("nothing to combine")
    if len(forms) != len(coeffs):
        raise ValueError("forms and coefficients differ in length")
    owner = forms[0].owner_tx
    if any(f.owner_tx != owner for f in forms):
        raise OwnershipError("cross-transmitter combination forbidden")
    idx = np.concatenate([f.idx for f in forms])
    coef = np.concatenate([c * f.coef for f, c in zip(forms, coeffs)])
    uniq, inv = np.unique(idx, return_inverse=True)
    acc = np.zeros(len(uniq), dtype=complex)
    np.add.at(acc, inv, coef)
    return LinearForm(owner, uniq, acc)


@dataclass(eq=False)
class Symbol:
    """A named scalar: spec, ground functional and the value its owner holds."""

    uid: int
    spec: SymbolSpec
    form: LinearForm
    value: complex
    parents: tuple = ()
    weights: np.ndarray = None

    @property
    def tx(self):
        return self.spec.tx

    def __repr__(self):
        return f"Symbol({self.uid}, {self.spec.label()})"


@dataclass
class GroundRegistry:
    """Planted data symbols of every transmitter plus the symbol table.

    Values are drawn once from the data stream when registered and never
    change afterwards.
    """

    rng: np.random.Generator
    owners: list = field(default_factory=list)
    values: list = field(default_factory=list)
    symbols: list = field(default_factory=list)
    _serials: Counter = field(default_factory=Counter)
    frozen: bool = False

    @property
    def size(self):
        return len(self.values)

    def fresh_block(self, tx, count):
        """Register ``count`` new data symbols of ``tx``; return unit forms."""
        if count < 1:
            raise ValueError("count must be at least 1")
        if self.frozen:
            raise RuntimeError("registry is frozen")
        start = len(self.values)
        self.values.extend(cn01(self.rng, count).tolist())
        self.owners.extend([tx] * count)
        return [LinearForm.unit(tx, start + k) for k in range(count)]

    def freeze(self):
        self.frozen = True

    def planted(self, indices):
        return np.array([self.values[k] for k in indices], dtype=complex)

    def check_support(self, f):
        if len(f.idx) and (f.idx[-1] >= len(self.values) or f.idx[0] < 0):
            raise KeyError("form refers to an unregistered ground symbol")
        if any(self.owners[k] != f.owner_tx for k in f.idx):
            raise OwnershipError(f"support leaves TX{f.owner_tx}'s data block")

    def evaluate(self, f):
        """Inner product of the form with the planted values."""
        self.check_support(f)
        if not len(f.idx):
            return 0j
        vals = np.fromiter((self.values[k] for k in f.idx), dtype=complex, count=len(f.idx))
        return complex(np.dot(f.coef, vals))

    # -- symbol table -----------------------------------------------------

    def new_symbol(self, tx, demand, knowledge=(), form=None, parents=(), weights=None):
        """Create a symbol; with ``parents`` the form is their combination."""
        demand = frozenset(demand)
        knowledge = frozenset(knowledge)
        key = (tx, demand, knowledge)
        serial = self._serials[key]
        self._serials[key] += 1
        if form is None:
            weights = np.asarray(weights, dtype=complex)
            form = combine([p.form for p in parents], weights)
        if form.owner_tx != tx:
            raise OwnershipError(f"symbol of TX{tx} built from TX{form.owner_tx} data")
        spec = SymbolSpec(tx, demand, knowledge, serial)
        s = Symbol(len(self.symbols), spec, form, self.evaluate(form), tuple(parents), weights)
        self.symbols.append(s)
        return s

    def data_symbols(self, tx, demand, count):
        """Fresh data symbols wrapped as order-|demand| symbols of ``tx``."""
        return [self.new_symbol(tx, demand, form=f) for f in self.fresh_block(tx, count)]


def evaluate(reg, f):
    return reg.evaluate(f)


def fresh_block(reg, tx, count):
    return reg.fresh_block(tx, count)
