"""The quasi-Jordan expansion ``uv -> u -| v + v |- u`` into the free dialgebra.

Expansion only depends on the shape of a monomial: for a shape of degree n it
is a list of ``2^(n-1)`` templates ``(positions, center)``; the expansion of a
labeled monomial with leaf word ``w`` is then ``sum (w[positions], center)``.
Matrices are assembled from templates, vectorized over all labelings.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .dialgebra import DiMonomial, DiPolynomial, FdBasis, fd_basis
from .fp_linalg import DEFAULT_PRIME, FpMatrix, check_prime
from .free_magma import (
    ALPHABET,
    MAX_BASIS_DEGREE,
    FrcBasis,
    Monomial,
    ResourceGuardError,
    degree,
    fill,
    frc_basis,
    leaves,
    letter_indices,
    nonlinear_basis,
    word_codes,
)
from .polynomial import Polynomial

__all__ = [
    "build_expansion_matrix",
    "build_nonlinear_expansion_matrix",
    "expand",
    "expand_poly",
    "expansion_templates",
    "expansion_triplets",
]

_INT_GUARD = 1 << 62
_DENSE_GUARD = 60_000_000  # entries; larger expansion matrices stay sparse


@lru_cache(maxsize=None)
def expansion_templates(shape: Monomial) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Templates ``(positions, center)`` of the expansion of a shape's basic monomial."""
    if isinstance(shape, str):
        return (((0,), 1),)
    u, v = shape
    du = degree(u)
    tu = expansion_templates(_basic(u))
    tv = [(tuple(i + du for i in pv), cv) for pv, cv in expansion_templates(_basic(v))]
    out = []
    for pu, cu in tu:
        for pv, cv in tv:
            out.append((pu + pv, cu))  # u -| v
            out.append((pv + pu, len(pv) + cu))  # v |- u
    return tuple(out)


def _basic(m: Monomial) -> Monomial:
    return fill(m, ALPHABET[: degree(m)])


def _template_arrays(shape: Monomial) -> tuple[np.ndarray, np.ndarray]:
    temps = expansion_templates(_basic(shape))
    pos = np.array([t[0] for t in temps], dtype=np.int64)
    cen = np.array([t[1] for t in temps], dtype=np.int64)
    return pos, cen


def expand(m: Monomial) -> DiPolynomial:
    """Expansion of one monomial, with coefficients collected."""
    if degree(m) > MAX_BASIS_DEGREE:
        raise ResourceGuardError(f"expansion of degree {degree(m)} exceeds the guard")
    word = leaves(m)
    acc: dict[DiMonomial, int] = {}
    for pos, k in expansion_templates(_basic(m)):
        key = DiMonomial("".join(word[i] for i in pos), k)
        acc[key] = acc.get(key, 0) + 1
    return DiPolynomial(acc)


def expand_poly(poly: Polynomial | Mapping, p: int | None = None) -> DiPolynomial:
    """Linear extension of ``expand``; exact over the integers when ``p`` is None."""
    acc: dict[DiMonomial, int] = {}
    for m, c in poly.items():
        for key, e in expand(m).items():
            v = acc.get(key, 0) + c * e
            if p is None and abs(v) >= _INT_GUARD:
                raise OverflowError("integer expansion coefficient out of range")
            acc[key] = v
    out = DiPolynomial(acc)
    return out if p is None else DiPolynomial({m: c % p for m, c in out.items()})


def expansion_triplets(basis: FrcBasis, fd: FdBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, values) of the expansion matrix, duplicates already summed."""
    rows_all, cols_all = [], []
    word_table = word_codes(np.array([letter_indices(w) for w in fd.words]))
    for t, ty in enumerate(basis.types):
        words = basis.words[t].astype(np.int64)
        if len(words) == 0:
            continue
        cols = np.arange(basis.offsets[t], basis.offsets[t + 1], dtype=np.int64)
        pos, cen = _template_arrays(ty.shape)
        for q, k in zip(pos, cen):
            relabeled = words[:, q]
            if fd.multilinear:
                widx = fd.word_rank(relabeled)
            else:
                widx = np.searchsorted(word_table, word_codes(relabeled))
            rows_all.append((k - 1) * fd.n_words + widx)
            cols_all.append(cols)
    rows = np.concatenate(rows_all)
    cols = np.concatenate(cols_all)
    m = sp.coo_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(len(fd), len(basis)))
    m.sum_duplicates()
    return m.row.astype(np.int64), m.col.astype(np.int64), m.data.astype(np.int64)


def _assemble(basis: FrcBasis, fd: FdBasis, p: int, allow_large: bool) -> FpMatrix:
    check_prime(p)
    if len(fd) * len(basis) > _DENSE_GUARD and not allow_large:
        raise ResourceGuardError(f"dense {len(fd)}x{len(basis)} expansion matrix exceeds the guard")
    rows, cols, vals = expansion_triplets(basis, fd)
    dense = np.zeros((len(fd), len(basis)), dtype=np.int64)
    dense[rows, cols] = vals % p
    return FpMatrix(p, dense)


def build_expansion_matrix(n: int, p: int = DEFAULT_PRIME, *, allow_large: bool = False) -> FpMatrix:
    """Matrix of the expansion map FRC_n -> FD_n; column j expands basis monomial j."""
    return _assemble(frc_basis(n), fd_basis(n), p, allow_large)


def build_nonlinear_expansion_matrix(content: str, p: int = DEFAULT_PRIME, *, allow_large: bool = False) -> FpMatrix:
    """Expansion matrix restricted to monomials with a fixed letter content."""
    content = "".join(sorted(content))
    return _assemble(nonlinear_basis(content), fd_basis(content), p, allow_large)
