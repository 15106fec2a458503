"""Kronecker structure of skew-symmetric pencils ``A + lambda*B`` over F_p.

Minimal indices are read off the dimensions ``s_j`` of the spaces of
polynomial kernel vectors of degree <= j. Those are nullities of the
block-Toeplitz matrices T_j, and satisfy ``s_j = sum_i max(0, j + 1 - eps_i)``,
so ``s_j - s_{j-1}`` counts the indices ``eps_i <= j``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from jkinv.exactla import PrimeField, SeededRng, mat_nullspace, mat_rank, random_invertible, random_vector
from jkinv.liealg import LieAlgebra, poisson_matrix

log = logging.getLogger(__name__)


class NonGenericSampleError(RuntimeError):
    """Rank profile never reached the expected corank; resample and retry."""


class StructureError(RuntimeError):
    """Computed data violates an invariant that holds for every skew pencil."""


@dataclass
class SkewPencil:
    A: np.ndarray
    B: np.ndarray
    field: PrimeField = field(default_factory=PrimeField)

    def __post_init__(self):
        self.A = np.ascontiguousarray(self.A, dtype=np.int64) % self.field.p
        self.B = np.ascontiguousarray(self.B, dtype=np.int64) % self.field.p
        if self.A.shape != self.B.shape or self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"pencil blocks must be equal square matrices, got {self.A.shape}, {self.B.shape}")
        p = self.field.p
        for name, M in (("A", self.A), ("B", self.B)):
            if not np.array_equal((M + M.T) % p, np.zeros_like(M)):
                raise ValueError(f"{name} is not skew-symmetric")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def at(self, lam: int) -> np.ndarray:
        F = self.field
        return F.madd(self.A, F.scale(self.B, lam))

    def congruent(self, Q: np.ndarray) -> "SkewPencil":
        """The pencil ``Q^T P Q``."""
        F = self.field
        Qt = np.ascontiguousarray(Q.T)
        return SkewPencil(F.matmul(F.matmul(Qt, self.A), Q), F.matmul(F.matmul(Qt, self.B), Q), F)


@dataclass(frozen=True)
class KroneckerStructure:
    minimal_indices: tuple[int, ...]
    generic_rank: int
    jordan_dim: int
    m: int
    trials: int = 1
    seed: int | None = None

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(2 * e + 1 for e in self.minimal_indices)

    @property
    def is_kronecker_type(self) -> bool:
        return self.jordan_dim == 0


@dataclass(frozen=True)
class CanonicalSpec:
    """Block data of a canonical skew pencil.

    ``jordan_blocks`` holds ``(eigenvalue, half_size)`` pairs; an eigenvalue of
    ``None`` stands for infinity.
    """

    kronecker_eps: tuple[int, ...] = ()
    jordan_blocks: tuple[tuple[int | None, int], ...] = ()

    @property
    def m(self) -> int:
        return sum(2 * e + 1 for e in self.kronecker_eps) + sum(2 * h for _, h in self.jordan_blocks)

    @property
    def jordan_dim(self) -> int:
        return sum(2 * h for _, h in self.jordan_blocks)


def generic_rank(P: SkewPencil, trials: int, rng: SeededRng) -> int:
    """Max of ``rank(A + lambda*B)`` over random lambda."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    F = P.field
    best = 0
    for _ in range(trials):
        best = max(best, mat_rank(P.at(rng.residue(F)), F))
    if best % 2:
        raise StructureError(f"odd rank {best} for a skew-symmetric matrix")
    return best


def toeplitz_matrix(P: SkewPencil, j: int) -> np.ndarray:
    """``(j+2)m x (j+1)m`` matrix: A on the block diagonal, B just below it."""
    m = P.m
    T = np.zeros(((j + 2) * m, (j + 1) * m), dtype=np.int64)
    for i in range(j + 1):
        T[i * m:(i + 1) * m, i * m:(i + 1) * m] = P.A
        T[(i + 1) * m:(i + 2) * m, i * m:(i + 1) * m] = P.B
    return T


def toeplitz_solution_dim(P: SkewPencil, j: int) -> int:
    return (j + 1) * P.m - mat_rank(toeplitz_matrix(P, j), P.field)


def toeplitz_solution_dims(P: SkewPencil, j_max: int) -> list[int]:
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    return [toeplitz_solution_dim(P, j) for j in range(j_max + 1)]


def polynomial_kernel_oracle(P: SkewPencil, j: int) -> int:
    """Dimension of ``{v(lambda), deg <= j : P(lambda) v(lambda) = 0}``.

    Builds the coefficient map column by column from its action on monomial
    vectors ``lambda^i e_c`` and returns the size of an explicit kernel basis,
    each member checked against the map.
    """
    F = P.field
    m = P.m
    cols = []
    for i in range(j + 1):
        for c in range(m):
            image = np.zeros((j + 2) * m, dtype=np.int64)
            # P(lambda) lambda^i e_c = lambda^i A e_c + lambda^(i+1) B e_c
            image[i * m:(i + 1) * m] = P.A[:, c]
            image[(i + 1) * m:(i + 2) * m] = P.B[:, c]
            cols.append(image)
    M = np.stack(cols, axis=1) if cols else np.zeros(((j + 2) * m, 0), dtype=np.int64)
    basis = mat_nullspace(M, F)
    for v in basis:
        if F.matvec(M, v).any():
            raise StructureError("kernel basis vector is not annihilated")
    return len(basis)


def minimal_indices(P: SkewPencil, trials: int, rng: SeededRng, rank: int | None = None) -> tuple[int, ...]:
    """Sorted column minimal indices.

    ``rank`` may carry an already computed generic rank.
    """
    if rank is None:
        rank = generic_rank(P, trials, rng)
    q = P.m - rank
    if q == 0:
        return ()
    indices: list[int] = []
    prev_s = 0
    prev_count = 0
    for j in range(P.m + 1):
        s = toeplitz_solution_dim(P, j)
        count = s - prev_s
        if count < prev_count or count > q:
            raise NonGenericSampleError(f"rank profile not monotone at j={j}: {prev_count} -> {count} (q={q})")
        indices.extend([j] * (count - prev_count))
        log.debug("j=%d s_j=%d #{eps<=j}=%d of %d", j, s, count, q)
        if count == q:
            return tuple(indices)
        prev_s, prev_count = s, count
    raise NonGenericSampleError(f"only {prev_count} of {q} minimal indices found up to j={P.m}")


def jk_structure(P: SkewPencil, trials: int, rng: SeededRng) -> KroneckerStructure:
    seed = rng.seed
    rank = generic_rank(P, trials, rng)
    eps = minimal_indices(P, trials, rng, rank=rank)
    if len(eps) != P.m - rank:
        raise StructureError(f"{len(eps)} minimal indices for corank {P.m - rank}")
    jordan = P.m - sum(2 * e + 1 for e in eps)
    if jordan < 0 or jordan % 2:
        raise StructureError(f"impossible Jordan dimension {jordan} (m={P.m}, eps={eps})")
    return KroneckerStructure(eps, rank, jordan, P.m, trials, seed)


# canonical pencils


def _kronecker_block(eps: int) -> tuple[np.ndarray, np.ndarray]:
    size = 2 * eps + 1
    A = np.zeros((size, size), dtype=np.int64)
    B = np.zeros((size, size), dtype=np.int64)
    for i in range(eps):
        # E = [I | 0], F = [0 | I], both eps x (eps+1), in the upper-right corner
        A[i, eps + i] = 1
        B[i, eps + i + 1] = 1
    return A - A.T, B - B.T


def _jordan_block(eigenvalue: int | None, half: int, F: PrimeField) -> tuple[np.ndarray, np.ndarray]:
    J = np.zeros((half, half), dtype=np.int64)
    for i in range(half - 1):
        J[i, i + 1] = 1
    ident = np.eye(half, dtype=np.int64)
    if eigenvalue is not None:
        J = J + F(eigenvalue) * ident
        top, bottom = J, ident
    else:
        top, bottom = ident, J
    size = 2 * half

    def skew(X):
        M = np.zeros((size, size), dtype=np.int64)
        M[:half, half:] = X
        M[half:, :half] = (F.p - X.T) % F.p
        return M

    return skew(top), skew(bottom)


def canonical_pencil(spec: CanonicalSpec, F: PrimeField) -> SkewPencil:
    m = spec.m
    if m == 0:
        raise ValueError("canonical spec has dimension 0")
    A = np.zeros((m, m), dtype=np.int64)
    B = np.zeros((m, m), dtype=np.int64)
    at = 0
    blocks = [_kronecker_block(e) for e in spec.kronecker_eps]
    blocks += [_jordan_block(ev, h, F) for ev, h in spec.jordan_blocks]
    for a, b in blocks:
        size = a.shape[0]
        A[at:at + size, at:at + size] = a
        B[at:at + size, at:at + size] = b
        at += size
    return SkewPencil(A % F.p, B % F.p, F)


def synth_pencil(spec: CanonicalSpec, rng: SeededRng | None, F: PrimeField) -> SkewPencil:
    """Canonical pencil of ``spec`` under a random congruence (none if ``rng`` is None)."""
    P = canonical_pencil(spec, F)
    if rng is None:
        return P
    return P.congruent(random_invertible(P.m, rng, F))


def random_canonical_spec(max_dim: int, rng: SeededRng, F: PrimeField) -> CanonicalSpec:
    """Random mix of Kronecker and Jordan blocks with total size in ``[1, max_dim]``."""
    target = int(rng.integers(1, max_dim + 1))
    eps: list[int] = []
    jordan: list[tuple[int | None, int]] = []
    used = 0
    while used < target:
        room = target - used
        if room >= 2 and rng.integers(0, 3) == 0:
            half = int(rng.integers(1, room // 2 + 1))
            kind = int(rng.integers(0, 4))
            ev = None if kind == 0 else int(rng.integers(0, 4)) if kind == 1 else rng.residue(F)
            jordan.append((ev, half))
            used += 2 * half
        else:
            e = int(rng.integers(0, (room - 1) // 2 + 1))
            eps.append(e)
            used += 2 * e + 1
    return CanonicalSpec(tuple(sorted(eps)), tuple(jordan))


def lie_poisson_pencil(L: LieAlgebra, rng: SeededRng, F: PrimeField) -> SkewPencil:
    """The pencil ``A_x + lambda*A_a`` at independent random x, a."""
    x = random_vector(L.dim, rng, F)
    a = random_vector(L.dim, rng, F)
    return SkewPencil(poisson_matrix(L, x, F), poisson_matrix(L, a, F), F)


def algebra_structure(
    L: LieAlgebra, trials: int, rng: SeededRng, F: PrimeField, retries: int = 3
) -> KroneckerStructure:
    """Jordan-Kronecker structure of the Lie-Poisson pencil at a random point."""
    seed = rng.seed
    for attempt in range(retries + 1):
        P = lie_poisson_pencil(L, rng, F)
        try:
            ks = jk_structure(P, trials, rng)
        except NonGenericSampleError as exc:
            log.warning("non-generic pencil sample (attempt %d): %s", attempt + 1, exc)
            continue
        return KroneckerStructure(ks.minimal_indices, ks.generic_rank, ks.jordan_dim, ks.m, trials, seed)
    raise NonGenericSampleError(f"no generic pencil after {retries + 1} samples (seed {seed})")
