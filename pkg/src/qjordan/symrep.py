"""Representations of S_n over F_p and per-partition identity ranks.

A multilinear term of right-commutative type k with leaf word ``w`` is the
permutation ``sigma`` with ``sigma(i) = w[i]`` (letters as 0-based indices)
applied to the basic monomial of type k.  Substituting ``x_j -> x_pi(j)``
turns it into ``pi o sigma``, so identities generate left ideals and
``rho(pi)`` must be a homomorphism for that composition.

Irreducible matrices come from Clifton matrices:
``rho(pi) = R_id^-1 R_pi``.  Ranks of block matrices whose every d-row block
carries the same left factor ``R_id^-1`` are computed from the raw Clifton
sums, which have the same row space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from .expansion import expansion_templates
from .fp_linalg import DEFAULT_PRIME, RowReducer, _rref_small, check_prime, inverse_mod, matmul_mod
from .free_magma import AssociationType, letter_indices, rc_signature, rc_types
from .polynomial import RcPolynomial

log = logging.getLogger(__name__)

Partition = tuple[int, ...]

__all__ = [
    "RankRow",
    "RepMatrixCache",
    "Tableaux",
    "all_rank_partition",
    "all_rank_full",
    "clifton_matrix",
    "clifton_matrix_reference",
    "format_partition",
    "old_rank_partition",
    "parse_partition",
    "partitions",
    "rank_row",
    "rank_table",
    "rep_matrix",
    "retained_by_partition",
    "standard_tableaux",
    "table_tsv",
]


# ---------------------------------------------------------------------------
# partitions and tableaux


def partitions(n: int) -> list[Partition]:
    """Partitions of n in reverse lexicographic order (``(n,)`` first)."""
    if n < 1:
        raise ValueError("n must be positive")

    def gen(rest, cap):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return list(gen(n, n))


def format_partition(lam: Partition) -> str:
    return "".join(str(x) for x in lam)


def parse_partition(text: str) -> Partition:
    """Parse a partition written as concatenated parts (``"431"``) or with commas."""
    parts = [int(x) for x in (text.split(",") if "," in text else text.strip())]
    if not parts or any(x < 1 for x in parts) or list(parts) != sorted(parts, reverse=True):
        raise ValueError(f"not a partition: {text!r}")
    return tuple(parts)


def _check_partition(lam: Sequence[int]) -> Partition:
    lam = tuple(int(x) for x in lam)
    if not lam or any(x < 1 for x in lam) or list(lam) != sorted(lam, reverse=True):
        raise ValueError(f"not a partition: {lam!r}")
    return lam


@lru_cache(maxsize=None)
def standard_tableaux(lam: Sequence[int]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Standard tableaux (rows of 1-based entries) sorted by row-reading word."""
    lam = _check_partition(lam)
    n = sum(lam)
    out = []
    rows = [[] for _ in lam]

    def place(k):
        if k > n:
            out.append(tuple(tuple(r) for r in rows))
            return
        for i, r in enumerate(rows):
            # k can go at the end of row i if there is room and the cell above is filled
            if len(r) < lam[i] and (i == 0 or len(rows[i - 1]) > len(r)):
                r.append(k)
                place(k + 1)
                r.pop()

    place(1)
    out.sort(key=lambda t: tuple(x for r in t for x in r))
    return tuple(out)


def hook_dimension(lam: Sequence[int]) -> int:
    lam = _check_partition(lam)
    conj = [sum(1 for x in lam if x > j) for j in range(lam[0])]
    hooks = 1
    for i, r in enumerate(lam):
        for j in range(r):
            hooks *= (r - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(sum(lam)) // hooks


@dataclass(frozen=True)
class Tableaux:
    """Array form of the standard tableaux of a partition (0-based entries)."""

    lam: Partition
    grid: np.ndarray  # (d, rows, width) entries, -1 outside the frame
    row_of: np.ndarray  # (d, n) row of each entry
    col_of: np.ndarray  # (d, n) column of each entry
    lengths: np.ndarray

    @property
    def d(self) -> int:
        return self.grid.shape[0]

    @property
    def n(self) -> int:
        return self.row_of.shape[1]


@lru_cache(maxsize=None)
def tableaux(lam: Sequence[int], reverse: bool = False) -> Tableaux:
    lam = _check_partition(lam)
    tabs = standard_tableaux(lam)
    if reverse:
        tabs = tabs[::-1]
    n, d = sum(lam), len(tabs)
    grid = np.full((d, len(lam), lam[0]), -1, dtype=np.int64)
    row_of = np.zeros((d, n), dtype=np.int64)
    col_of = np.zeros((d, n), dtype=np.int64)
    for t, tab in enumerate(tabs):
        for i, row in enumerate(tab):
            for j, x in enumerate(row):
                grid[t, i, j] = x - 1
                row_of[t, x - 1] = i
                col_of[t, x - 1] = j
    return Tableaux(lam, grid, row_of, col_of, np.array(lam, dtype=np.int64))


# ---------------------------------------------------------------------------
# Clifton matrices


def clifton_matrix_reference(lam: Sequence[int], pi: Sequence[int]) -> np.ndarray:
    """Clifton matrix by a literal reading of the tableau algorithm.

    ``pi`` is 0-based: ``pi[k]`` is the image of ``k``.  Slow; used as an oracle.
    """
    lam = _check_partition(lam)
    tabs = standard_tableaux(lam)
    n, d = sum(lam), len(tabs)
    image = {k + 1: int(pi[k]) + 1 for k in range(n)}
    out = np.zeros((d, d), dtype=np.int64)
    for j, tj in enumerate(tabs):
        moved = [[image[x] for x in row] for row in tj]  # pi applied to T_j
        jrow = {x: r for r, row in enumerate(moved) for x in row}
        for i, ti in enumerate(tabs):
            work = [list(row) for row in ti]
            entry = 1
            for number in range(1, n + 1):
                irow, icol = next((r, c) for r, row in enumerate(work) for c, x in enumerate(row) if x == number)
                target = jrow[number]
                if irow == target:
                    continue
                if icol >= lam[target]:
                    entry = 0
                    break
                if work[target][icol] < work[irow][icol]:
                    entry = 0
                    break
                entry = -entry
                work[irow][icol], work[target][icol] = work[target][icol], work[irow][icol]
            out[i, j] = entry
    return out


@numba.njit(cache=True)
def _clifton_into(pi, grid, row_of, col_of, lengths, out, coef, p):
    """``out += coef * R_pi`` (mod p) with ``pi`` 0-based."""
    d, n = row_of.shape
    pinv = np.empty(n, dtype=np.int64)
    for k in range(n):
        pinv[pi[k]] = k
    jrow = np.empty(n, dtype=np.int64)
    work = np.empty_like(grid[0])
    wrow = np.empty(n, dtype=np.int64)
    for j in range(d):
        for num in range(n):
            jrow[num] = row_of[j, pinv[num]]
        for i in range(d):
            work[:, :] = grid[i]
            for k in range(n):
                wrow[k] = row_of[i, k]
            entry = 1
            for num in range(n):
                irow = wrow[num]
                target = jrow[num]
                if irow == target:
                    continue
                icol = col_of[i, num]  # columns never change
                if icol >= lengths[target]:
                    entry = 0
                    break
                other = work[target, icol]
                if other < num:
                    entry = 0
                    break
                entry = -entry
                work[target, icol] = num
                work[irow, icol] = other
                wrow[other] = irow
                wrow[num] = target
            if entry != 0:
                v = out[i, j] + coef * entry
                v %= p
                out[i, j] = v


@numba.njit(cache=True)
def _clifton_sums(perms, coefs, targets, n_targets, grid, row_of, col_of, lengths, p):
    d = row_of.shape[0]
    out = np.zeros((n_targets, d, d), dtype=np.int64)
    for k in range(perms.shape[0]):
        _clifton_into(perms[k], grid, row_of, col_of, lengths, out[targets[k]], coefs[k], p)
    return out


def clifton_sums(
    tab: Tableaux,
    perms: np.ndarray,
    coefs: np.ndarray,
    targets: np.ndarray,
    n_targets: int,
    p: int,
) -> np.ndarray:
    """``out[t] = sum_{k: targets[k] = t} coefs[k] R_{perms[k]}`` (mod p)."""
    perms = np.ascontiguousarray(perms, dtype=np.int64).reshape(-1, tab.n)
    coefs = np.mod(np.asarray(coefs, dtype=np.int64), p)
    targets = np.asarray(targets, dtype=np.int64)
    return _clifton_sums(perms, coefs, targets, n_targets, tab.grid, tab.row_of, tab.col_of, tab.lengths, p)


def clifton_matrix(lam: Sequence[int], pi: Sequence[int], *, reverse: bool = False) -> np.ndarray:
    """Clifton matrix with entries in {-1, 0, 1}; ``pi`` is 0-based."""
    tab = tableaux(_check_partition(lam), reverse)
    big = 1 << 20  # any odd modulus larger than 2 keeps -1 recognizable
    out = clifton_sums(tab, np.asarray(pi)[None, :], np.array([1]), np.zeros(1, dtype=np.int64), 1, big + 1)[0]
    return np.where(out > big // 2, out - (big + 1), out)


class RepMatrixCache:
    """Irreducible representation ``rho(pi) = R_id^-1 R_pi`` over F_p, memoized."""

    def __init__(self, lam: Sequence[int], p: int = DEFAULT_PRIME, *, reverse: bool = False):
        check_prime(p)
        self.lam = _check_partition(lam)
        n = sum(self.lam)
        if p <= n:
            raise ValueError(f"prime {p} too small for degree {n}")
        self.p = p
        self.tab = tableaux(self.lam, reverse)
        self.d = self.tab.d
        r_id = self.raw(np.arange(n))
        self.r_id_inv = inverse_mod(r_id, p)
        self._memo: dict[tuple[int, ...], np.ndarray] = {}

    def raw(self, pi: Sequence[int]) -> np.ndarray:
        pi = np.asarray(pi, dtype=np.int64)
        return clifton_sums(self.tab, pi[None, :], np.array([1]), np.zeros(1, dtype=np.int64), 1, self.p)[0]

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        """``R_id^-1 raw`` for a Clifton sum."""
        return matmul_mod(self.r_id_inv, raw, self.p).astype(np.int64)

    def __call__(self, pi: Sequence[int]) -> np.ndarray:
        key = tuple(int(x) for x in pi)
        if key not in self._memo:
            m = self.normalize(self.raw(key))
            m.setflags(write=False)
            self._memo[key] = m
        return self._memo[key]


def rep_matrix(cache: RepMatrixCache, pi: Sequence[int]) -> np.ndarray:
    return cache(pi)


# ---------------------------------------------------------------------------
# identities as elements of (F S_n)^t


def _poly_terms(poly: RcPolynomial) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(types, coefficients, permutations) of a multilinear polynomial."""
    types, coefs, perms = [], [], []
    for m, c in poly.items():
        _, t, word = rc_signature(m)
        types.append(t)
        coefs.append(c)
        perms.append(letter_indices(word))
    return np.array(types, dtype=np.int64), np.array(coefs, dtype=np.int64), np.array(perms, dtype=np.int64)


def symmetry_permutations(t: AssociationType) -> list[np.ndarray]:
    """For each symmetry, the permutation swapping its two factors in the basic word."""
    out = []
    for s, m, e in t.spans:
        w = np.arange(t.degree)
        w[s:e] = np.concatenate([w[m:e], w[s:m]])
        out.append(w)
    return out


@lru_cache(maxsize=None)
def _expansion_terms(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rc type, center - 1, permutation) for all expansion terms of the basic monomials."""
    types, centers, perms = [], [], []
    for t in rc_types(n):
        for pos, k in expansion_templates(_basic(t)):
            types.append(t.index)
            centers.append(k - 1)
            perms.append(pos)
    return np.array(types), np.array(centers), np.array(perms, dtype=np.int64)


def _basic(t: AssociationType):
    return t.basic


# ---------------------------------------------------------------------------
# ranks


@dataclass
class OldRankResult:
    lam: Partition
    d: int
    rank: int
    symmetry_rank: int
    increases: list[int]  # 1-based generator indices that raised the rank


def _symmetry_reduction(n: int, tab: Tableaux, p: int):
    """Row-reduce the symmetry blocks, which live in one type each.

    Returns per-type (pivots, reduced rows, free columns) and the total rank.
    """
    d = tab.d
    ident = np.arange(n)
    info = []
    total = 0
    for t in rc_types(n):
        perms = symmetry_permutations(t)
        if not perms:
            info.append((np.zeros(0, dtype=np.int64), np.zeros((0, d), dtype=np.int64), np.arange(d)))
            continue
        k = len(perms)
        # block r: R_id - R_tau_r
        all_perms = np.vstack([np.tile(ident, (k, 1)), np.vstack(perms)])
        coefs = np.concatenate([np.ones(k, dtype=np.int64), -np.ones(k, dtype=np.int64)])
        targets = np.concatenate([np.arange(k), np.arange(k)])
        blocks = clifton_sums(tab, all_perms, coefs, targets, k, p)
        rows, piv = _rref_small(blocks.reshape(k * d, d), p)
        free = np.setdiff1d(np.arange(d), piv)
        info.append((np.asarray(piv, dtype=np.int64), rows, free))
        total += len(piv)
    return info, total


def old_rank_partition(
    n: int,
    lam: Sequence[int],
    p: int = DEFAULT_PRIME,
    gens: Sequence[RcPolynomial] | None = None,
    *,
    reverse: bool = False,
    progress: Callable | None = None,
    batch: int = 32,
) -> OldRankResult:
    """Multiplicity of ``lam`` in the module of lifted identities of degree n.

    The module is generated by the symmetries of the association types and by
    ``gens`` (default: the lifted J/K generators of degree n).
    """
    lam = _check_partition(lam)
    if sum(lam) != n:
        raise ValueError(f"{format_partition(lam)} is not a partition of {n}")
    check_prime(p)
    if p <= n:
        raise ValueError(f"prime {p} too small for degree {n}")
    if gens is None:
        from .identity_engine import generators

        gens = generators(n, p) if n >= 4 else []
    tab = tableaux(lam, reverse)
    d = tab.d
    info, sym_rank = _symmetry_reduction(n, tab, p)
    widths = np.array([len(f) for _, _, f in info], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(widths)])
    red = RowReducer(int(offsets[-1]), p)
    increases = []
    terms = [_poly_terms(g) for g in gens]
    for start in range(0, len(gens), batch):
        chunk = terms[start : start + batch]
        # one target block per (generator, type) pair that occurs
        keys: dict[tuple[int, int], int] = {}
        perms, coefs, targets = [], [], []
        for gi, (ty, co, pe) in enumerate(chunk):
            for t, c, w in zip(ty, co, pe):
                tgt = keys.setdefault((gi, int(t)), len(keys))
                perms.append(w)
                coefs.append(c)
                targets.append(tgt)
        if not keys:
            continue
        sums = clifton_sums(tab, np.array(perms), np.array(coefs), np.array(targets), len(keys), p)
        blocks = [np.zeros((d, int(offsets[-1])), dtype=np.int64) for _ in chunk]
        for (gi, t), tgt in keys.items():
            piv, rows, free = info[t]
            b = sums[tgt]
            if len(piv):
                b = (b - matmul_mod(b[:, piv], rows, p).astype(np.int64)) % p
            blocks[gi][:, offsets[t] : offsets[t + 1]] = b[:, free]
        for gi, blk in enumerate(blocks):
            if red.add(blk):
                increases.append(start + gi + 1)
        if progress:
            progress(f"{format_partition(lam)}: generator {min(start + batch, len(gens))}/{len(gens)}")
    return OldRankResult(lam, d, sym_rank + red.rank, sym_rank, increases)


def _left_block(n: int, tab: Tableaux, p: int) -> np.ndarray:
    """Raw Clifton sums of the expansion pieces: a (t d) x (n d) matrix."""
    ty, ce, pe = _expansion_terms(n)
    t = len(rc_types(n))
    d = tab.d
    targets = ty * n + ce
    sums = clifton_sums(tab, pe, np.ones(len(pe), dtype=np.int64), targets, t * n, p)
    # block (i, j) at rows i*d.., cols j*d..
    return sums.reshape(t, n, d, d).transpose(0, 2, 1, 3).reshape(t * d, n * d)


def all_rank_partition(n: int, lam: Sequence[int], p: int = DEFAULT_PRIME, *, reverse: bool = False) -> int:
    """Multiplicity of ``lam`` in the kernel of the expansion map in degree n.

    The block matrix ``[A | -I]`` has full row rank t d; its rows with leading
    ones on the right span the left kernel of ``A``, of dimension
    ``t d - rank(A)``.
    """
    lam = _check_partition(lam)
    check_prime(p)
    if p <= n:
        raise ValueError(f"prime {p} too small for degree {n}")
    tab = tableaux(lam, reverse)
    a = _left_block(n, tab, p)
    red = RowReducer(a.shape[0], p)  # rank of A via its transpose (fewer rows)
    red.add(np.ascontiguousarray(a.T))
    return a.shape[0] - red.rank


def all_rank_full(n: int, lam: Sequence[int], p: int = DEFAULT_PRIME) -> tuple[int, np.ndarray]:
    """Reference construction: RCF of the full ``[rho(E) | -I]`` matrix.

    Returns the number of rows whose leading one lies in the right side and
    those rows restricted to the right side (a basis of all identities).
    """
    cache = RepMatrixCache(lam, p)
    tab = cache.tab
    d, t = tab.d, len(rc_types(n))
    raw = _left_block(n, tab, p).reshape(t, d, n * d)
    left = np.concatenate([cache.normalize(raw[i]) for i in range(t)], axis=0)
    x = np.hstack([left, (-np.eye(t * d, dtype=np.int64)) % p])
    rows, piv = _rref_small(x, p)
    lower = rows[np.asarray(piv) >= n * d][:, n * d :]
    return len(lower), lower


def old_rows(n: int, lam: Sequence[int], p: int = DEFAULT_PRIME, gens: Sequence[RcPolynomial] | None = None) -> np.ndarray:
    """Nonzero RCF rows of the normalized old-identities matrix (reference, small n)."""
    if gens is None:
        from .identity_engine import generators

        gens = generators(n, p)
    cache = RepMatrixCache(lam, p)
    d, types = cache.d, rc_types(n)
    t = len(types)
    blocks = []
    for ty in types:
        for tau in symmetry_permutations(ty):
            row = np.zeros((d, t * d), dtype=np.int64)
            row[:, ty.index * d : (ty.index + 1) * d] = (cache(np.arange(n)) - cache(tau)) % p
            blocks.append(row)
    for g in gens:
        row = np.zeros((d, t * d), dtype=np.int64)
        for m, c in g.items():
            _, k, word = rc_signature(m)
            row[:, k * d : (k + 1) * d] += c * cache(letter_indices(word))
        blocks.append(row % p)
    red = RowReducer(t * d, p)
    for b in blocks:
        red.add(b)
    return red.matrix().entries


def retained_by_partition(
    n: int, gens: Sequence[RcPolynomial], p: int = DEFAULT_PRIME, progress: Callable | None = None
) -> list[int]:
    """1-based indices of generators that raise the old rank in at least one partition."""
    keep: set[int] = set()
    for lam in partitions(n):
        res = old_rank_partition(n, lam, p, gens)
        keep.update(res.increases)
        if progress:
            progress(f"retention {format_partition(lam)}: rank {res.rank}, {len(keep)} generators so far")
    return sorted(keep)


# ---------------------------------------------------------------------------
# tables


@dataclass
class RankRow:
    lam: Partition
    d: int
    old_rows: int
    old_cols: int
    old_rank: int
    all_rows: int
    all_cols: int
    all_rank: int

    @property
    def new(self) -> int:
        return self.all_rank - self.old_rank

    def as_dict(self) -> dict:
        return {
            "lambda": format_partition(self.lam),
            "d": self.d,
            "old_rows": self.old_rows,
            "old_cols": self.old_cols,
            "oldrank": self.old_rank,
            "all_rows": self.all_rows,
            "all_cols": self.all_cols,
            "allrank": self.all_rank,
            "new": self.new,
        }


def rank_row(n: int, lam: Sequence[int], p: int = DEFAULT_PRIME, gens=None, progress: Callable | None = None) -> RankRow:
    lam = _check_partition(lam)
    t = len(rc_types(n))
    old = old_rank_partition(n, lam, p, gens, progress=progress)
    d = old.d
    allr = all_rank_partition(n, lam, p)
    return RankRow(lam, d, (t + 1) * d, t * d, old.rank, t * d, (n + t) * d, allr)


def rank_table(
    n: int,
    p: int = DEFAULT_PRIME,
    only: Iterable[Sequence[int]] | None = None,
    progress: Callable | None = None,
    workers: int = 1,
) -> list[RankRow]:
    """Old and all identity ranks for every partition of n (or the ``only`` subset)."""
    check_prime(p)
    if p <= n:
        raise ValueError(f"prime {p} too small for degree {n}")
    lams = partitions(n)
    if only is not None:
        wanted = [_check_partition(x) for x in only]
        unknown = [x for x in wanted if x not in lams]
        if unknown:
            raise ValueError(f"not partitions of {n}: {', '.join(map(format_partition, unknown))}")
        lams = [x for x in lams if x in wanted]
    from .identity_engine import generators

    gens = generators(n, p, progress) if n >= 4 else []
    if workers > 1 and len(lams) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(rank_row, n, lam, p, gens) for lam in lams]
            rows = []
            for lam, fut in zip(lams, futures):
                rows.append(fut.result())
                if progress:
                    progress(f"partition {format_partition(lam)} done")
            return rows
    rows = []
    for lam in lams:
        rows.append(rank_row(n, lam, p, gens))
        if progress:
            r = rows[-1]
            progress(f"partition {format_partition(lam)}: d={r.d} old={r.old_rank} all={r.all_rank} new={r.new}")
    return rows


TABLE_COLUMNS = ("lambda", "d", "rows", "cols", "oldrank", "allrank", "new")


def table_tsv(rows: Sequence[RankRow]) -> str:
    """TSV with the old-identity matrix shape in ``rows``/``cols``."""
    lines = ["\t".join(TABLE_COLUMNS)]
    for r in rows:
        lines.append(
            "\t".join(str(x) for x in (format_partition(r.lam), r.d, r.old_rows, r.old_cols, r.old_rank, r.all_rank, r.new))
        )
    return "\n".join(lines) + "\n"
