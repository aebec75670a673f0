"""Dense linear algebra over a prime field F_p.

Matrices are stored as numpy integer arrays with entries in ``[0, p)``.  The
heavy lifting is done by :class:`RowReducer`, which keeps a fully reduced row
canonical form and absorbs new rows in batches: a batch is first reduced
against the existing pivots with one matrix product, then eliminated on its
own, and finally the fresh pivots are cleared from the old rows.  Products are
computed in floating point on blocks small enough that every partial sum is an
exactly representable integer, then reduced mod p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

__all__ = [
    "ConfigurationError",
    "DimensionError",
    "FpMatrix",
    "RowReducer",
    "append_and_reduce",
    "is_prime",
    "nullspace_basis",
    "rank",
    "rcf",
    "recognize_rational",
    "symmetric_lift",
]

DEFAULT_PRIME = 101


class ConfigurationError(ValueError):
    """Raised for an unusable modulus."""


class DimensionError(ValueError):
    """Raised when matrix shapes do not agree."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


MAX_PRIME = 1 << 26  # keeps (p-1)^2 exact in float64


def check_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)):
        raise ConfigurationError(f"modulus must be an odd prime, got {p!r}")
    if p >= MAX_PRIME:
        raise ConfigurationError(f"modulus {p} too large for exact floating-point products")
    if not is_prime(int(p)) or p <= 2:
        raise ConfigurationError(f"modulus must be an odd prime, got {p!r}")


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """A dense matrix over F_p (row-major, entries in ``[0, p)``)."""

    p: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2:
            raise DimensionError("FpMatrix entries must be two-dimensional")
        a = np.mod(a.astype(np.int64, copy=False), self.p)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, n_cols: int | None = None) -> "FpMatrix":
        rows = list(rows)
        if not rows:
            return cls(p, np.zeros((0, n_cols or 0), dtype=np.int64))
        return cls(p, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, p: int) -> "FpMatrix":
        return cls(p, np.zeros((n_rows, n_cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise ConfigurationError("moduli differ")
        if self.n_cols != other.n_rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        return FpMatrix(self.p, matmul_mod(self.entries, other.entries, self.p))

    def to_tsv(self) -> str:
        lines = [f"{self.p} {self.n_rows} {self.n_cols}"]
        lines.extend("\t".join(str(int(x)) for x in row) for row in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "FpMatrix":
        lines = text.splitlines()
        p, n_rows, n_cols = (int(x) for x in lines[0].split())
        data = np.zeros((n_rows, n_cols), dtype=np.int64)
        for i, line in enumerate(lines[1 : n_rows + 1]):
            if n_cols:
                data[i] = [int(x) for x in line.split("\t")]
        return cls(p, data)


# ---------------------------------------------------------------------------
# exact modular products in floating point


def _float_dtype(p: int):
    return np.float32 if p <= 256 else np.float64


def _inner_limit(p: int, dtype) -> int:
    mantissa = 24 if dtype == np.float32 else 53
    return max(1, ((1 << mantissa) - 1) // ((p - 1) ** 2) - 1)


@numba.njit(cache=True)
def _mod_inplace(a, p):
    flat = a.reshape(-1)
    inv = 1.0 / p
    for i in range(flat.size):
        x = flat[i]
        x -= p * np.floor(x * inv)
        if x < 0:
            x += p
        elif x >= p:
            x -= p
        flat[i] = x


def _modf(a: np.ndarray, p: int) -> np.ndarray:
    if a.flags.c_contiguous:
        _mod_inplace(a, a.dtype.type(p))
        return a
    return np.remainder(a, p, out=a)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int, dtype=None) -> np.ndarray:
    """Return ``a @ b mod p`` exactly; inputs must hold residues in ``[0, p)``."""
    dtype = dtype or _float_dtype(p)
    inner = a.shape[1]
    limit = _inner_limit(p, dtype)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=dtype)
    for start in range(0, inner, limit):
        stop = min(inner, start + limit)
        part = np.asarray(a[:, start:stop], dtype=dtype) @ np.asarray(b[start:stop], dtype=dtype)
        out += part
        _modf(out, p)
    return out


def _sparse_matmul_mod(a: sp.csr_matrix, b: np.ndarray, p: int) -> np.ndarray:
    dtype = b.dtype
    counts = np.diff(a.indptr)
    if len(counts) and counts.max() > _inner_limit(p, dtype):
        return matmul_mod(a.toarray(), b, p, dtype)
    out = np.asarray(a.astype(dtype) @ b)
    return _modf(np.ascontiguousarray(out), p)


# ---------------------------------------------------------------------------
# small dense elimination kernel


@numba.njit(cache=True)
def _inverse_mod(a, p):
    result = 1
    e = p - 2
    base = a % p
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@numba.njit(cache=True)
def _rref_kernel(b, p):
    """Reduce ``b`` (int64, residues) in place; return the pivot columns."""
    n_rows, n_cols = b.shape
    pivots = np.empty(min(n_rows, n_cols), dtype=np.int64)
    nz = np.empty(n_cols, dtype=np.int64)
    inv_p = 1.0 / p
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        found = -1
        for i in range(r, n_rows):
            if b[i, col] != 0:
                found = i
                break
        if found < 0:
            continue
        if found != r:
            for j in range(col, n_cols):
                tmp = b[r, j]
                b[r, j] = b[found, j]
                b[found, j] = tmp
        inv = _inverse_mod(b[r, col], p)
        n_nz = 0
        for j in range(col, n_cols):
            if b[r, j] != 0:
                if inv != 1:
                    b[r, j] = (b[r, j] * inv) % p
                nz[n_nz] = j
                n_nz += 1
        for i in range(n_rows):
            if i != r:
                f = b[i, col]
                if f != 0:
                    g = p - f
                    for t in range(n_nz):
                        j = nz[t]
                        x = b[i, j] + g * b[r, j]
                        x -= p * np.int64(x * inv_p)
                        if x >= p:
                            x -= p
                        elif x < 0:
                            x += p
                        b[i, j] = x
        pivots[r] = col
        r += 1
    return pivots[:r]


def _rref_small(block: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    work = np.ascontiguousarray(block, dtype=np.int64)
    pivots = _rref_kernel(work, p)
    return work[: len(pivots)], pivots


def inverse_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p (``ValueError`` if singular)."""
    a = np.mod(np.asarray(a, dtype=np.int64), p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError(f"cannot invert a {a.shape} matrix")
    work = np.hstack([a, np.eye(n, dtype=np.int64)])
    rows, pivots = _rref_small(work, p)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise ValueError("matrix is singular modulo p")
    return rows[:, n:].copy()


# ---------------------------------------------------------------------------


class RowReducer:
    """Incremental row canonical form over F_p.

    Rows are stored in the order their pivots were discovered; :meth:`matrix`
    returns them sorted by pivot column.  Every stored row has a 1 in its
    pivot column and zeros in every other pivot column.
    """

    def __init__(self, n_cols: int, p: int = DEFAULT_PRIME, capacity: int | None = None):
        check_prime(p)
        self.p = p
        self.n_cols = n_cols
        self.dtype = _float_dtype(p)
        cap = capacity if capacity is not None else min(n_cols, 64)
        self._rows = np.zeros((max(cap, 1), n_cols), dtype=self.dtype)
        self._pivots: list[int] = []
        self._piv = np.zeros(0, dtype=np.int64)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._pivots)

    def _coerce(self, rows):
        if sp.issparse(rows):
            rows = sp.csr_matrix(rows)
            if rows.shape[1] != self.n_cols:
                raise DimensionError(f"expected {self.n_cols} columns, got {rows.shape[1]}")
            rows.data = np.mod(rows.data, self.p)
            rows.eliminate_zeros()
            return rows
        rows = np.asarray(rows)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.shape[1] != self.n_cols:
            raise DimensionError(f"expected {self.n_cols} columns, got {rows.shape[1]}")
        return np.mod(rows.astype(np.int64, copy=False), self.p)

    def residual(self, rows) -> np.ndarray:
        """Reduce rows against the current pivots without absorbing them."""
        rows = self._coerce(rows)
        r = self.rank
        if sp.issparse(rows):
            dense = rows.toarray().astype(self.dtype)
            if r:
                proj = _sparse_matmul_mod(rows[:, self._piv].tocsr(), self._rows[:r], self.p)
                dense -= proj
                _modf(dense, self.p)
            return dense.astype(np.int64)
        if not r:
            return rows.copy()
        proj = matmul_mod(rows[:, self._piv], self._rows[:r], self.p, self.dtype)
        out = rows.astype(self.dtype) - proj
        return _modf(out, self.p).astype(np.int64)

    def add(self, rows) -> int:
        """Absorb rows; return how much the rank grew."""
        reduced = self.residual(rows)
        nz = np.flatnonzero(reduced.any(axis=1))
        if not len(nz):
            return 0
        block, new_piv = _rref_small(reduced[nz], self.p)
        k = len(new_piv)
        r = self.rank
        if r:
            old = self._rows[:r]
            coeff = old[:, new_piv]
            if coeff.any():
                old -= matmul_mod(coeff, block, self.p, self.dtype)
                _modf(old, self.p)
        if r + k > self._rows.shape[0]:
            cap = min(self.n_cols, max(2 * self._rows.shape[0], r + k))
            grown = np.zeros((cap, self.n_cols), dtype=self.dtype)
            grown[:r] = self._rows[:r]
            self._rows = grown
        self._rows[r : r + k] = block
        self._pivots.extend(int(c) for c in new_piv)
        self._piv = np.array(self._pivots, dtype=np.int64)
        return k

    def contains(self, row) -> bool:
        return not self.residual(row).any()

    def matrix(self) -> FpMatrix:
        """The reduced rows sorted by pivot column (zero rows omitted)."""
        order = np.argsort(self._piv, kind="stable")
        return FpMatrix(self.p, self._rows[: self.rank][order].astype(np.int64))

    def row_block(self) -> tuple[np.ndarray, np.ndarray]:
        """(pivot columns, rows) in discovery order; read-only views."""
        return self._piv, self._rows[: self.rank]


def rcf(m: FpMatrix, block: int = 128) -> tuple[FpMatrix, int, list[int]]:
    """Row canonical form; zero rows are appended after the nonzero ones."""
    check_prime(m.p)
    red = RowReducer(m.n_cols, m.p)
    for start in range(0, m.n_rows, block):
        red.add(m.entries[start : start + block])
    reduced = red.matrix()
    full = np.zeros(m.shape, dtype=np.int64)
    full[: red.rank] = reduced.entries
    return FpMatrix(m.p, full), red.rank, red.pivots


def rank(m: FpMatrix) -> int:
    return rcf(m)[1]


def append_and_reduce(state: FpMatrix, new_rows) -> tuple[FpMatrix, int]:
    """Stack ``new_rows`` under an RCF ``state`` and return the new RCF and rank.

    The returned matrix keeps only nonzero rows.
    """
    new = np.asarray(new_rows if not sp.issparse(new_rows) else new_rows.toarray())
    if new.ndim == 1:
        new = new[None, :]
    if new.size and new.shape[1] != state.n_cols:
        raise DimensionError(f"expected {state.n_cols} columns, got {new.shape[1]}")
    red = RowReducer(state.n_cols, state.p, capacity=state.n_rows + len(new))
    nonzero = state.entries[state.entries.any(axis=1)]
    if len(nonzero):
        red.add(nonzero)
    if len(new):
        red.add(new)
    return red.matrix(), red.rank


def nullspace_basis(m: FpMatrix) -> list[np.ndarray]:
    """Canonical nullspace basis: one vector per free column, ordered by it."""
    reduced, r, pivots = rcf(m)
    p = m.p
    rows = reduced.entries[:r]
    free = sorted(set(range(m.n_cols)) - set(pivots))
    basis = []
    for f in free:
        v = np.zeros(m.n_cols, dtype=np.int64)
        v[f] = 1
        v[pivots] = (-rows[:, f]) % p
        basis.append(v)
    return basis


def symmetric_lift(r: int, p: int) -> int:
    """Representative of ``r mod p`` in ``(-p/2, p/2]``."""
    r %= p
    return r - p if r > p // 2 else r


def recognize_rational(r: int, p: int, num_bound: int, den_bound: int) -> tuple[int, int] | None:
    """Smallest-denominator fraction a/b with a * b^-1 = r (mod p) inside the bounds."""
    for b in range(1, den_bound + 1):
        if b % p == 0:
            continue
        a = symmetric_lift(r * b, p)
        if abs(a) <= num_bound and math.gcd(a, b) == 1:
            return a, b
    return None


def as_fraction(r: int, p: int, num_bound: int, den_bound: int) -> Fraction | None:
    pair = recognize_rational(r, p, num_bound, den_bound)
    return None if pair is None else Fraction(*pair)


def stack_rows(rows: Iterable[np.ndarray], n_cols: int) -> np.ndarray:
    rows = list(rows)
    if not rows:
        return np.zeros((0, n_cols), dtype=np.int64)
    return np.vstack(rows)
