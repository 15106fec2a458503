"""Lie algebras given by structure constants, and their Lie-Poisson matrices.

Basis conventions used by the builders (0-based positions):

* ``sl(n)``: upper elementary matrices ``E_ab`` (a < b, lexicographic), then
  ``H_a = E_aa - E_{a+1,a+1}`` for a = 1..n-1, then lower ``E_ab`` (a > b,
  lexicographic). For n = 2 this is ``(E12, H1, E21)``.
* ``sl(n) x| (C^n)^k``: the sl(n) basis, followed by k blocks of n vectors;
  position ``n*n - 1 + c*n + a`` holds ``v^(c)_a`` (copy c, coordinate a).

A dual point is the flat vector of values ``x_s = <x, e_s>``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numba
import numpy as np

from jkinv.exactla import PrimeField, SeededRng, _mulmod, mat_rank, random_vector


class InvalidParameterError(ValueError):
    pass


class AlgebraFormatError(ValueError):
    pass


Coeff = int | Fraction


class LieAlgebra:
    """Structure constants ``[e_i, e_j] = sum_s c_ij^s e_s`` stored for i < j.

    Coefficients are exact ints (or Fractions for loaded files). Instances are
    treated as immutable.
    """

    def __init__(
        self,
        dim: int,
        brackets: Mapping[tuple[int, int], Mapping[int, Coeff]],
        labels=None,
        family: tuple | None = None,
    ):
        if dim < 0:
            raise InvalidParameterError("dim must be non-negative")
        labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(dim))
        if len(labels) != dim:
            raise InvalidParameterError(f"{len(labels)} labels for dimension {dim}")
        clean: dict[tuple[int, int], Mapping[int, Coeff]] = {}
        for (i, j), terms in brackets.items():
            if not (0 <= i < j < dim):
                raise InvalidParameterError(f"bracket index pair ({i}, {j}) must satisfy 0 <= i < j < dim")
            row = {}
            for s, c in terms.items():
                if not 0 <= s < dim:
                    raise InvalidParameterError(f"term index {s} out of range")
                c = _normalize(c)
                if c != 0:
                    row[s] = c
            if row:
                clean[(i, j)] = MappingProxyType(row)
        self.dim = dim
        self.labels = labels
        self.brackets: Mapping[tuple[int, int], Mapping[int, Coeff]] = MappingProxyType(clean)
        # ("semidirect", n, k) or ("sl", n) when produced by a builder
        self.family = family
        self._reduced: dict[int, tuple] = {}

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, family={self.family})"

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.labels == other.labels
            and {k: dict(v) for k, v in self.brackets.items()} == {k: dict(v) for k, v in other.brackets.items()}
        )

    def structure_constant(self, i: int, j: int, s: int) -> Coeff:
        """``c_ij^s`` for any ordered pair, using antisymmetry."""
        if i == j:
            return 0
        if i < j:
            return self.brackets.get((i, j), {}).get(s, 0)
        return -self.brackets.get((j, i), {}).get(s, 0)

    def bracket_basis(self, i: int, j: int) -> dict[int, Coeff]:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {s: -c for s, c in self.brackets.get((j, i), {}).items()}

    def bracket(self, u: Mapping[int, Coeff], v: Mapping[int, Coeff]) -> dict[int, Coeff]:
        """Bracket of two sparse vectors ``{index: coefficient}``."""
        out: dict[int, Coeff] = {}
        for i, a in u.items():
            for j, b in v.items():
                for s, c in self.bracket_basis(i, j).items():
                    out[s] = out.get(s, 0) + a * b * c
        return {s: c for s, c in out.items() if c != 0}

    def is_semidirect(self) -> bool:
        return bool(self.family) and self.family[0] == "semidirect"

    def reduced_terms(self, F: PrimeField) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Flat arrays (I, J, S, C) of the upper-triangular terms, C reduced mod p."""
        cached = self._reduced.get(F.p)
        if cached is None:
            I, J, S, C = [], [], [], []
            for (i, j), terms in self.brackets.items():
                for s, c in terms.items():
                    I.append(i)
                    J.append(j)
                    S.append(s)
                    C.append(_reduce(c, F))
            cached = tuple(np.array(a, dtype=np.int64) for a in (I, J, S, C))
            self._reduced[F.p] = cached
        return cached


def _normalize(c) -> Coeff:
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    if isinstance(c, (int, np.integer)):
        return int(c)
    raise InvalidParameterError(f"structure constants must be exact, got {type(c).__name__}")


def _reduce(c: Coeff, F: PrimeField) -> int:
    if isinstance(c, Fraction):
        return F.mul(c.numerator % F.p, F.inv(c.denominator))
    return c % F.p


# builders


def _sl_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    def fmt(a, b):
        return f"E{a}{b}" if n < 10 else f"E{a},{b}"

    mats, labels = [], []
    for a in range(n):
        for b in range(a + 1, n):
            m = np.zeros((n, n), dtype=np.int64)
            m[a, b] = 1
            mats.append(m)
            labels.append(fmt(a + 1, b + 1))
    for a in range(n - 1):
        m = np.zeros((n, n), dtype=np.int64)
        m[a, a] = 1
        m[a + 1, a + 1] = -1
        mats.append(m)
        labels.append(f"H{a + 1}")
    for a in range(n):
        for b in range(a):
            m = np.zeros((n, n), dtype=np.int64)
            m[a, b] = 1
            mats.append(m)
            labels.append(fmt(a + 1, b + 1))
    return mats, labels


def sl_offdiag_positions(n: int) -> dict[tuple[int, int], int]:
    """Map (row, col) of an elementary matrix to its basis position (0-based)."""
    pos = {}
    idx = 0
    for a in range(n):
        for b in range(a + 1, n):
            pos[(a, b)] = idx
            idx += 1
    idx += n - 1
    for a in range(n):
        for b in range(a):
            pos[(a, b)] = idx
            idx += 1
    return pos


def sl_cartan_offset(n: int) -> int:
    return n * (n - 1) // 2


def _expand_traceless(Z: np.ndarray, n: int, offdiag: dict[tuple[int, int], int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for (a, b), s in offdiag.items():
        if Z[a, b]:
            out[s] = int(Z[a, b])
    h0 = sl_cartan_offset(n)
    acc = 0
    for a in range(n - 1):
        acc += int(Z[a, a])
        if acc:
            out[h0 + a] = acc
    if acc + int(Z[n - 1, n - 1]) != 0:
        raise AssertionError("commutator left sl(n)")
    return out


def _sl_brackets(n: int, mats: list[np.ndarray]) -> dict[tuple[int, int], dict[int, int]]:
    offdiag = sl_offdiag_positions(n)
    brackets = {}
    for i, j in combinations(range(len(mats)), 2):
        Z = mats[i] @ mats[j] - mats[j] @ mats[i]
        if Z.any():
            brackets[(i, j)] = _expand_traceless(Z, n, offdiag)
    return brackets


def build_sl(n: int) -> LieAlgebra:
    if n < 2:
        raise InvalidParameterError(f"sl(n) needs n >= 2, got {n}")
    mats, labels = _sl_basis(n)
    return LieAlgebra(n * n - 1, _sl_brackets(n, mats), labels, family=("sl", n))


def build_semidirect(n: int, k: int) -> LieAlgebra:
    """``sl(n)`` acting on k copies of C^n by the standard representation."""
    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    if k < 1:
        raise InvalidParameterError(f"need k >= 1, got {k}")
    mats, labels = _sl_basis(n)
    brackets = _sl_brackets(n, mats)
    base = n * n - 1
    for c in range(k):
        for a in range(n):
            labels.append(f"v{c + 1}_{a + 1}")
    for i, X in enumerate(mats):
        for c in range(k):
            for a in range(n):
                # X e_a = sum_b X[b, a] e_b
                terms = {base + c * n + b: int(X[b, a]) for b in range(n) if X[b, a]}
                if terms:
                    brackets[(i, base + c * n + a)] = terms
    return LieAlgebra(base + n * k, brackets, labels, family=("semidirect", n, k))


def build_abelian(dim: int) -> LieAlgebra:
    return LieAlgebra(dim, {}, family=("abelian", dim))


# validation and evaluation


def check_jacobi(L: LieAlgebra) -> bool:
    """Exact check of the Jacobi identity on every basis triple."""
    for i, j, s in combinations(range(L.dim), 3):
        total: dict[int, Coeff] = {}
        for a, b, c in ((i, j, s), (j, s, i), (s, i, j)):
            inner = L.bracket_basis(b, c)
            if not inner:
                continue
            for t, coeff in L.bracket({a: 1}, inner).items():
                total[t] = total.get(t, 0) + coeff
        if any(v != 0 for v in total.values()):
            return False
    return True


@numba.njit(cache=True)
def _poisson_kernel(I, J, S, C, x, dim, p, mode):
    A = np.zeros((dim, dim), dtype=np.int64)
    for t in range(I.shape[0]):
        v = A[I[t], J[t]] + _mulmod(C[t], x[S[t]], p, mode)
        if v >= p:
            v -= p
        A[I[t], J[t]] = v
    for i in range(dim):
        for j in range(i + 1, dim):
            if A[i, j] != 0:
                A[j, i] = p - A[i, j]
    return A


def poisson_matrix(L: LieAlgebra, x, F: PrimeField) -> np.ndarray:
    """``(A_x)_ij = sum_s c_ij^s x_s`` over F_p; skew-symmetric by construction."""
    x = np.asarray(x)
    if x.shape != (L.dim,):
        raise ValueError(f"dual point of length {x.shape} for an algebra of dimension {L.dim}")
    x = F.asarray(x) if x.dtype == object else np.ascontiguousarray(x % F.p, dtype=np.int64)
    I, J, S, C = L.reduced_terms(F)
    return _poisson_kernel(I, J, S, C, x, L.dim, F.p, F.mode)


def index_of(L: LieAlgebra, trials: int, rng: SeededRng, F: PrimeField) -> int:
    """``dim - max rank A_x`` over ``trials`` random dual points.

    Randomness can only lower a sampled rank, so the maximum is the best
    estimate; the seed to reproduce the samples is ``rng.seed``.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be at least 1")
    best = 0
    for _ in range(trials):
        x = random_vector(L.dim, rng, F) if L.dim else np.zeros(0, dtype=np.int64)
        best = max(best, mat_rank(poisson_matrix(L, x, F), F))
    return L.dim - best


# file format


def algebra_to_dict(L: LieAlgebra) -> dict:
    out = []
    for (i, j) in sorted(L.brackets):
        terms = []
        for s in sorted(L.brackets[(i, j)]):
            c = Fraction(L.brackets[(i, j)][s])
            terms.append({"s": s, "num": c.numerator, "den": c.denominator})
        out.append({"i": i, "j": j, "terms": terms})
    return {"dim": L.dim, "labels": list(L.labels), "brackets": out}


def algebra_from_dict(data: dict) -> LieAlgebra:
    try:
        dim = int(data["dim"])
        labels = data.get("labels")
        raw = data["brackets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraFormatError(f"malformed algebra document: {exc}") from exc
    brackets: dict[tuple[int, int], dict[int, Coeff]] = {}
    for entry in raw:
        i, j = int(entry["i"]), int(entry["j"])
        if i >= j:
            raise AlgebraFormatError(f"bracket entries need i < j, got ({i}, {j})")
        if not (0 <= i and j < dim):
            raise AlgebraFormatError(f"bracket indices ({i}, {j}) out of range for dim {dim}")
        if (i, j) in brackets:
            raise AlgebraFormatError(f"duplicate bracket entry ({i}, {j})")
        terms: dict[int, Coeff] = {}
        for term in entry["terms"]:
            s = int(term["s"])
            if not 0 <= s < dim:
                raise AlgebraFormatError(f"term index {s} out of range for dim {dim}")
            den = int(term.get("den", 1))
            if den == 0:
                raise AlgebraFormatError(f"zero denominator in bracket ({i}, {j})")
            terms[s] = terms.get(s, 0) + Fraction(int(term["num"]), den)
        brackets[(i, j)] = terms
    try:
        return LieAlgebra(dim, brackets, labels)
    except InvalidParameterError as exc:
        raise AlgebraFormatError(str(exc)) from exc


def save_algebra(L: LieAlgebra, path) -> None:
    Path(path).write_text(json.dumps(algebra_to_dict(L), indent=1) + "\n")


def load_algebra(path) -> LieAlgebra:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(f"{path}: not valid JSON ({exc})") from exc
    return algebra_from_dict(data)
