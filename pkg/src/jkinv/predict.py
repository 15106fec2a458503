"""Closed-form predictions for ``sl(n) x| (C^n)^k`` and comparison with computed data."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from jkinv.pencil import KroneckerStructure


class Source(str, Enum):
    THEOREM = "Theorem"
    CONJECTURE = "Conjecture"
    EXTERNALLY_KNOWN = "ExternallyKnown"
    UNSUPPORTED = "Unsupported"


class UnsupportedPredictionError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    n: int
    k: int
    d: int
    r: int

    @property
    def dim(self) -> int:
        return self.n * self.n - 1 + self.n * self.k


@dataclass(frozen=True)
class Prediction:
    params: Params
    source: Source
    index: int | None = None
    block_sizes: tuple[int, ...] = ()
    l: int | None = None
    b: int | None = None


@dataclass(frozen=True)
class ComparisonReport:
    params: Params
    prediction: Prediction
    computed: KroneckerStructure
    index_computed: int
    match_index: bool
    match_sizes: bool
    kronecker_type: bool
    seed: int | None = None
    prime: int | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def all_match(self) -> bool:
        return self.match_index and self.match_sizes and self.kronecker_type


def decompose(n: int, k: int) -> Params:
    if n < 2 or k < 1:
        raise ValueError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    d, r = divmod(n, k)
    return Params(n, k, d, r)


def index_formula(n: int, k: int) -> int:
    r = n % k
    return k * r - r * r + 1


def predicted_invariants(n: int, k: int) -> Prediction:
    par = decompose(n, k)
    if k > n or (k < n and par.r == 0):
        return Prediction(par, Source.EXTERNALLY_KNOWN)
    if k == n or k < 2:
        return Prediction(par, Source.UNSUPPORTED)
    d, r = par.d, par.r
    if r in (1, k - 1):
        return Prediction(par, Source.THEOREM, k, (((d + 1) * (n + r) - 1),) * k)
    ind = index_formula(n, k)
    l, b = divmod((par.dim + ind) // 2, ind)
    sizes = (2 * l + 1,) * b + (2 * l - 1,) * (ind - b)
    return Prediction(par, Source.CONJECTURE, ind, sizes, l, b)


def compare(
    pred: Prediction,
    comp: KroneckerStructure,
    index_computed: int,
    prime: int | None = None,
) -> ComparisonReport:
    if pred.source in (Source.UNSUPPORTED,):
        raise UnsupportedPredictionError(f"no prediction for n={pred.params.n}, k={pred.params.k}")
    if pred.source is Source.EXTERNALLY_KNOWN:
        match_index = match_sizes = True
        notes = ("known from prior work; not compared",)
    else:
        match_index = pred.index == index_computed
        match_sizes = Counter(pred.block_sizes) == Counter(comp.block_sizes)
        notes = ()
        if pred.source is Source.CONJECTURE and not (match_index and match_sizes and comp.is_kronecker_type):
            notes = ("conjecture violated (or sampling failure)",)
    return ComparisonReport(
        pred.params, pred, comp, index_computed, match_index, match_sizes,
        comp.is_kronecker_type, comp.seed, prime, notes,
    )
