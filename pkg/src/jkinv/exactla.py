"""Exact dense linear algebra over a prime field, jets, and seeded sampling.

Matrices are plain ``numpy.int64`` arrays holding residues in ``[0, p)``.
The hot kernels are compiled with numba; three multiplication strategies are
selected by the modulus:

* ``p = 2**61 - 1``: split 31-bit products with Mersenne folding,
* ``p < 2**31``: native 64-bit products,
* any other odd prime below ``2**62``: double-and-add (slow, but exact).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

MERSENNE61 = (1 << 61) - 1
MAX_MODULUS = 1 << 62

_MODE_MERSENNE = 0
_MODE_SMALL = 1
_MODE_GENERIC = 2

_LOW31 = (1 << 31) - 1


@numba.njit(cache=True, inline="always")
def _mulmod(a, b, p, mode):
    if mode == 0:
        a_hi = a >> 31
        a_lo = a & 0x7FFFFFFF
        b_hi = b >> 31
        b_lo = b & 0x7FFFFFFF
        mid = a_hi * b_lo + a_lo * b_hi
        s = ((a_hi * b_hi) << 1) + (mid >> 30) + ((mid & 0x3FFFFFFF) << 31) + a_lo * b_lo
        s = (s & 0x1FFFFFFFFFFFFFFF) + (s >> 61)
        s = (s & 0x1FFFFFFFFFFFFFFF) + (s >> 61)
        if s >= p:
            s -= p
        return s
    if mode == 1:
        return (a * b) % p
    res = 0
    while b > 0:
        if b & 1:
            res += a
            if res >= p:
                res -= p
        a += a
        if a >= p:
            a -= p
        b >>= 1
    return res


@numba.njit(cache=True)
def _powmod(a, e, p, mode):
    res = 1
    a = a % p
    while e > 0:
        if e & 1:
            res = _mulmod(res, a, p, mode)
        a = _mulmod(a, a, p, mode)
        e >>= 1
    return res


@numba.njit(cache=True, nogil=True)
def _rank_kernel(M, p, mode):
    rows, cols = M.shape
    nz = np.empty(cols, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for cc in range(c, cols):
                t = M[r, cc]
                M[r, cc] = M[piv, cc]
                M[piv, cc] = t
        inv = _powmod(M[r, c], p - 2, p, mode)
        cnt = 0
        for cc in range(c + 1, cols):
            if M[r, cc] != 0:
                nz[cnt] = cc
                cnt += 1
        for i in range(r + 1, rows):
            if M[i, c] == 0:
                continue
            f = _mulmod(M[i, c], inv, p, mode)
            M[i, c] = 0
            for t in range(cnt):
                cc = nz[t]
                v = M[i, cc] - _mulmod(f, M[r, cc], p, mode)
                if v < 0:
                    v += p
                M[i, cc] = v
        r += 1
    return r


@numba.njit(cache=True, nogil=True)
def _rref_kernel(M, p, mode):
    rows, cols = M.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for cc in range(cols):
                t = M[r, cc]
                M[r, cc] = M[piv, cc]
                M[piv, cc] = t
        inv = _powmod(M[r, c], p - 2, p, mode)
        for cc in range(c, cols):
            M[r, cc] = _mulmod(M[r, cc], inv, p, mode)
        for i in range(rows):
            if i == r or M[i, c] == 0:
                continue
            f = M[i, c]
            for cc in range(c, cols):
                if M[r, cc] != 0:
                    v = M[i, cc] - _mulmod(f, M[r, cc], p, mode)
                    if v < 0:
                        v += p
                    M[i, cc] = v
        pivots[r] = c
        r += 1
    return pivots[:r]


@numba.njit(cache=True, nogil=True)
def _det_kernel(M, p, mode):
    n = M.shape[0]
    det = 1
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            for cc in range(c, n):
                t = M[c, cc]
                M[c, cc] = M[piv, cc]
                M[piv, cc] = t
            det = p - det if det != 0 else 0
        det = _mulmod(det, M[c, c], p, mode)
        inv = _powmod(M[c, c], p - 2, p, mode)
        for i in range(c + 1, n):
            if M[i, c] == 0:
                continue
            f = _mulmod(M[i, c], inv, p, mode)
            for cc in range(c + 1, n):
                v = M[i, cc] - _mulmod(f, M[c, cc], p, mode)
                if v < 0:
                    v += p
                M[i, cc] = v
            M[i, c] = 0
    return det


@numba.njit(cache=True, nogil=True)
def _matmul_kernel(A, B, p, mode):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a == 0:
                continue
            for j in range(m):
                b = B[t, j]
                if b != 0:
                    v = C[i, j] + _mulmod(a, b, p, mode)
                    if v >= p:
                        v -= p
                    C[i, j] = v
    return C


@dataclass(frozen=True)
class PrimeField:
    """Arithmetic context for F_p with ``p`` an odd prime below ``2**62``.

    Field elements are plain Python ints in ``[0, p)``. Primality is not
    re-checked here; the CLI validates user-supplied moduli.
    """

    p: int = MERSENNE61
    mode: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (2 < self.p < MAX_MODULUS) or self.p % 2 == 0:
            raise ValueError(f"modulus must be an odd prime below 2**62, got {self.p}")
        if self.p == MERSENNE61:
            mode = _MODE_MERSENNE
        elif self.p <= _LOW31:
            mode = _MODE_SMALL
        else:
            mode = _MODE_GENERIC
        object.__setattr__(self, "mode", mode)

    # scalar operations on residues

    def __call__(self, value) -> int:
        return int(value) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        return pow(a % self.p, e, self.p)

    # matrices

    def asarray(self, values) -> np.ndarray:
        """Reduce an integer array-like (Python ints of any size) to residues."""
        arr = np.asarray(values, dtype=object)
        flat = [int(v) % self.p for v in arr.ravel()]
        return np.array(flat, dtype=np.int64).reshape(arr.shape)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.ascontiguousarray(A, dtype=np.int64)
        B = np.ascontiguousarray(B, dtype=np.int64)
        if A.shape[1] != B.shape[0]:
            raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
        return _matmul_kernel(A, B, self.p, self.mode)

    def matvec(self, A: np.ndarray, v) -> np.ndarray:
        col = np.asarray(v, dtype=np.int64).reshape(-1, 1)
        return self.matmul(A, col).ravel()

    def madd(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        # operands < 2**62 so the int64 sum cannot overflow
        return (A + B) % self.p

    def mneg(self, A: np.ndarray) -> np.ndarray:
        return (self.p - A) % self.p

    def scale(self, A: np.ndarray, c: int) -> np.ndarray:
        """Multiply every entry by the scalar ``c``."""
        return self.asarray(np.asarray(A, dtype=object) * (int(c) % self.p))

    def rank(self, M: np.ndarray) -> int:
        return mat_rank(M, self)

    def det(self, M: np.ndarray) -> int:
        return mat_det(M, self)


def mat_rank(M: np.ndarray, F: PrimeField) -> int:
    """Rank of ``M`` over F_p. The input is copied, never modified."""
    M = np.array(M, dtype=np.int64, copy=True, order="C")
    if M.size == 0:
        return 0
    return int(_rank_kernel(M, F.p, F.mode))


def mat_rref(M: np.ndarray, F: PrimeField) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(M, dtype=np.int64, copy=True, order="C")
    if R.size == 0:
        return R, []
    pivots = _rref_kernel(R, F.p, F.mode)
    return R, [int(c) for c in pivots]


def mat_nullspace(M: np.ndarray, F: PrimeField) -> list[np.ndarray]:
    """Basis of the right kernel ``{v : M v = 0}``."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, pivots = mat_rref(M, F)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = np.zeros(cols, dtype=np.int64)
        v[free] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-int(R[row, free])) % F.p
        basis.append(v)
    return basis


def mat_det(M: np.ndarray, F: PrimeField) -> int:
    M = np.array(M, dtype=np.int64, copy=True, order="C")
    if M.shape[0] != M.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if M.shape[0] == 0:
        return 1
    return int(_det_kernel(M, F.p, F.mode))


class SeededRng:
    """Deterministic source of uniform residues.

    Backed by numpy's PCG64, whose output stream is stable across platforms
    for a fixed seed. Instances are single-owner; use :meth:`child` to hand
    an independent stream to another task.
    """

    def __init__(self, seed: int = 1):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self):
        return f"SeededRng(seed={self.seed})"

    def residues(self, F: PrimeField, size) -> np.ndarray:
        return self._gen.integers(0, F.p, size=size, dtype=np.int64)

    def residue(self, F: PrimeField) -> int:
        return int(self._gen.integers(0, F.p, dtype=np.int64))

    def nonzero_residue(self, F: PrimeField) -> int:
        return int(self._gen.integers(1, F.p, dtype=np.int64))

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)

    def shuffle(self, seq) -> None:
        self._gen.shuffle(seq)

    def child(self) -> "SeededRng":
        return SeededRng(int(self._gen.integers(0, 2**63 - 1, dtype=np.int64)))


def random_vector(dim: int, rng: SeededRng, F: PrimeField) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be at least 1")
    return rng.residues(F, dim)


def random_invertible(n: int, rng: SeededRng, F: PrimeField) -> np.ndarray:
    """Uniformly random matrix, resampled until it is invertible."""
    while True:
        Q = rng.residues(F, (n, n))
        if mat_rank(Q, F) == n:
            return Q


@dataclass(frozen=True)
class Jet:
    """First-order jet ``primal + tangent * eps`` with ``eps**2 = 0`` over F_p."""

    primal: int
    tangent: int
    p: int = MERSENNE61

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.p != self.p:
                raise ValueError("jets over different fields")
            return other
        return Jet(int(other) % self.p, 0, self.p)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet((self.primal + o.primal) % self.p, (self.tangent + o.tangent) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet((self.primal - o.primal) % self.p, (self.tangent - o.tangent) % self.p, self.p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet((-self.primal) % self.p, (-self.tangent) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet(
            self.primal * o.primal % self.p,
            (self.primal * o.tangent + self.tangent * o.primal) % self.p,
            self.p,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        if self.primal % self.p == 0:
            raise ZeroDivisionError("jet with zero primal part is not invertible")
        ia = pow(self.primal, -1, self.p)
        return Jet(ia, (-self.tangent * ia * ia) % self.p, self.p)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = Jet(1, 0, self.p)
        for _ in range(e):
            out = out * self
        return out

    def is_unit(self) -> bool:
        return self.primal % self.p != 0


def jet_det(M: list[list[Jet]], p: int) -> Jet:
    """Determinant of a square jet matrix by elimination over F_p[eps]/(eps^2).

    Pivots are units when available. A column with no unit entry is ``eps``
    times a primal column, which leaves only ``eps * det`` of the primal
    matrix with that column swapped in.
    """
    n = len(M)
    A = [list(row) for row in M]
    one = Jet(1, 0, p)
    det = one
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c].is_unit()), None)
        if piv is None:
            # remaining columns: column c is eps * t; only primal parts survive elsewhere
            sub = np.array(
                [[A[i][j].primal if j != c else A[i][j].tangent for j in range(c, n)] for i in range(c, n)],
                dtype=np.int64,
            )
            tail = mat_det(sub, PrimeField(p))
            return det * Jet(0, tail, p)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = A[c][c].inverse()
        for i in range(c + 1, n):
            f = A[i][c] * inv
            if f.primal == 0 and f.tangent == 0:
                continue
            for j in range(c, n):
                A[i][j] = A[i][j] - f * A[c][j]
    return det
