"""Explicit coadjoint invariants of ``sl(n) x| (C^n)^k``.

A dual point splits into a traceless ``Y`` (via ``<Y, X> = tr(YX)``) and the
columns ``l_1..l_k``. For ``n = kd + r`` and an r-subset ``sel`` of
``{1..k}`` the invariant is

    f_sel = det( L, Y^T L, ..., (Y^T)^(d-1) L, (Y^T)^d l_i for i in sel )

of degree ``(d+1)(n+r)/2``. Selectors are 1-based, sorted tuples.

All arithmetic runs on :class:`~jkinv.exactla.Jet` values so the same code
yields values and directional derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from jkinv.exactla import Jet, PrimeField, SeededRng, jet_det, mat_rank, random_vector
from jkinv.liealg import LieAlgebra, poisson_matrix, sl_cartan_offset, sl_offdiag_positions
from jkinv.predict import decompose


class NotSemidirectError(ValueError):
    pass


class InconclusiveError(RuntimeError):
    pass


@dataclass
class CoadjointCoords:
    """``Y`` (n x n) and ``L`` (n x k) as nested lists of jets."""

    Y: list[list[Jet]]
    L: list[list[Jet]]
    p: int

    @property
    def n(self) -> int:
        return len(self.Y)

    @property
    def k(self) -> int:
        return len(self.L[0]) if self.L else 0

    def column(self, i: int) -> list[Jet]:
        """``l_i`` for a 1-based copy index."""
        return [row[i - 1] for row in self.L]


@dataclass(frozen=True)
class InvariantValue:
    value: int
    degree: int
    tangent: int = 0


def _semidirect_params(L: LieAlgebra) -> tuple[int, int]:
    if not L.is_semidirect():
        raise NotSemidirectError(f"{L!r} is not a semi-direct sum built by build_semidirect")
    return L.family[1], L.family[2]


def invariant_degree(n: int, k: int) -> int:
    par = decompose(n, k)
    deg = k * par.d * (par.d + 1) // 2 + par.r * (par.d + 1)
    assert 2 * deg == (par.d + 1) * (n + par.r)
    return deg


def selectors(n: int, k: int) -> list[tuple[int, ...]]:
    """All r-subsets of ``{1..k}`` in lexicographic order, ``r = n mod k``."""
    r = n % k
    return list(combinations(range(1, k + 1), r))


def _as_jets(x, p: int, direction: int | None = None) -> list[Jet]:
    vals = [int(v) % p for v in np.asarray(x).ravel()]
    return [Jet(v, 1 if s == direction else 0, p) for s, v in enumerate(vals)]


def split_point(L: LieAlgebra, x, F: PrimeField, direction: int | None = None) -> CoadjointCoords:
    """Reconstruct ``(Y, L)`` from the flat coordinates of ``x``.

    ``direction`` seeds a unit tangent on that coordinate.
    """
    n, k = _semidirect_params(L)
    p = F.p
    xs = x if isinstance(x, list) and x and isinstance(x[0], Jet) else _as_jets(x, p, direction)
    if len(xs) != L.dim:
        raise ValueError(f"dual point of length {len(xs)} for dimension {L.dim}")
    zero = Jet(0, 0, p)
    Y = [[zero] * n for _ in range(n)]
    for (a, b), s in sl_offdiag_positions(n).items():
        # tr(Y E_ab) = Y_ba
        Y[b][a] = xs[s]
    h0 = sl_cartan_offset(n)
    u = [zero]
    for a in range(n - 1):
        # tr(Y H_a) = Y_aa - Y_{a+1,a+1}
        u.append(u[-1] - xs[h0 + a])
    mean = sum(u[1:], zero) * pow(n, -1, p)
    for a in range(n):
        Y[a][a] = u[a] - mean
    base = n * n - 1
    Lm = [[xs[base + c * n + a] for c in range(k)] for a in range(n)]
    return CoadjointCoords(Y, Lm, p)


def join_point(L: LieAlgebra, c: CoadjointCoords) -> list[Jet]:
    """Inverse of :func:`split_point`."""
    n, k = _semidirect_params(L)
    out: list[Jet] = [Jet(0, 0, c.p)] * L.dim
    for (a, b), s in sl_offdiag_positions(n).items():
        out[s] = c.Y[b][a]
    h0 = sl_cartan_offset(n)
    for a in range(n - 1):
        out[h0 + a] = c.Y[a][a] - c.Y[a + 1][a + 1]
    base = n * n - 1
    for ci in range(k):
        for a in range(n):
            out[base + ci * n + a] = c.L[a][ci]
    return out


def _apply(Y: list[list[Jet]], v: list[Jet], transpose: bool) -> list[Jet]:
    n = len(Y)
    if transpose:
        return [sum((Y[b][a] * v[b] for b in range(n)), Jet(0, 0, v[0].p)) for a in range(n)]
    return [sum((Y[a][b] * v[b] for b in range(n)), Jet(0, 0, v[0].p)) for a in range(n)]


def build_My(c: CoadjointCoords, sel: tuple[int, ...], transpose: bool = True) -> list[list[Jet]]:
    """Square matrix with columns ``L, Y^T L, ..., (Y^T)^(d-1) L, (Y^T)^d l_sel``.

    ``transpose=False`` uses ``Y`` in place of ``Y^T``.
    """
    n, k = c.n, c.k
    d, r = divmod(n - len(sel), k)
    if r != 0 or len(sel) >= k and k > 0:
        raise ValueError(f"selector of size {len(sel)} does not fit n={n}, k={k}")
    if any(not 1 <= i <= k for i in sel) or list(sel) != sorted(set(sel)):
        raise ValueError(f"selector {sel} must be a sorted subset of 1..{k}")
    columns: list[list[Jet]] = []
    current = [c.column(i) for i in range(1, k + 1)]
    for _ in range(d):
        columns.extend(current)
        current = [_apply(c.Y, v, transpose) for v in current]
    columns.extend(current[i - 1] for i in sel)
    return [[col[a] for col in columns] for a in range(n)]


def _check_selector(n: int, k: int, sel: tuple[int, ...]) -> None:
    if len(sel) != n % k:
        raise ValueError(f"selector {sel} must have n mod k = {n % k} elements")


def eval_invariant(L: LieAlgebra, x, sel, F: PrimeField, direction: int | None = None, transpose: bool = True) -> InvariantValue:
    n, k = _semidirect_params(L)
    sel = tuple(sel)
    _check_selector(n, k, sel)
    c = split_point(L, x, F, direction)
    det = jet_det(build_My(c, sel, transpose), F.p)
    return InvariantValue(det.primal, invariant_degree(n, k), det.tangent)


def homogeneity_check(L: LieAlgebra, sel, rng: SeededRng, F: PrimeField, degree: int | None = None) -> bool:
    """``f(t x) == t^D f(x)`` at a random point and scalar.

    ``degree`` defaults to the formula; a nonvanishing sample is required, with
    one resample allowed.
    """
    n, k = _semidirect_params(L)
    D = invariant_degree(n, k) if degree is None else degree
    for _ in range(2):
        x = random_vector(L.dim, rng, F)
        fx = eval_invariant(L, x, sel, F).value
        if fx == 0:
            continue
        t = rng.nonzero_residue(F)
        ftx = eval_invariant(L, F.asarray(np.asarray(x, dtype=object) * t), sel, F).value
        return ftx == F.mul(F.pow(t, D), fx)
    raise InconclusiveError(f"invariant for selector {tuple(sel)} vanished at two random points")


def gradient(L: LieAlgebra, x, sel, F: PrimeField, transpose: bool = True) -> np.ndarray:
    """Partial derivatives by one jet evaluation per coordinate."""
    return np.array(
        [eval_invariant(L, x, sel, F, direction=s, transpose=transpose).tangent for s in range(L.dim)],
        dtype=np.int64,
    )


def independence_rank(L: LieAlgebra, x, F: PrimeField, sels=None) -> int:
    """Rank of the gradient matrix of the selector family at ``x``.

    Without ``sels`` the family is every r-subset, which for r in {1, k-1}
    is exactly k invariants.
    """
    n, k = _semidirect_params(L)
    if sels is None:
        r = n % k
        if r not in (1, k - 1):
            raise ValueError(f"r = {r} is not 1 or k-1; pass the selectors explicitly")
        sels = selectors(n, k)
    G = np.stack([gradient(L, x, sel, F) for sel in sels])
    return mat_rank(G, F)


def ad_invariance_residual(L: LieAlgebra, x, sel, F: PrimeField, transpose: bool = True) -> np.ndarray:
    """``A_x grad f(x)``; identically zero for a coadjoint invariant."""
    A = poisson_matrix(L, np.asarray(x), F)
    return F.matvec(A, gradient(L, x, sel, F, transpose))


def degree_sum_check(n: int, k: int) -> bool:
    """``k * deg f = (dim + ind) / 2`` with ``ind = k``, in exact integers."""
    dim = n * n - 1 + n * k
    return 2 * k * invariant_degree(n, k) == dim + k


def check_transpose_convention(F: PrimeField, rng: SeededRng, n: int = 3, k: int = 2) -> bool:
    """True when ``Y^T`` (not ``Y``) yields coadjoint invariants for a small case."""
    from jkinv.liealg import build_semidirect

    L = build_semidirect(n, k)
    x = random_vector(L.dim, rng, F)
    sel = selectors(n, k)[0]
    with_t = not ad_invariance_residual(L, x, sel, F, transpose=True).any()
    without_t = not ad_invariance_residual(L, x, sel, F, transpose=False).any()
    if with_t == without_t:
        raise InconclusiveError("transpose convention test did not separate Y^T from Y")
    return with_t
