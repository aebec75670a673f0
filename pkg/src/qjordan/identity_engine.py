"""Known identities, liftings, the direct rank pipeline and the nonlinear search.

A multilinear identity of degree n lives on the letters ``a, b, c, ...``.  Its
*liftings* to degree n+1 substitute ``x_i -> x_i x_{n+1}`` for each argument
and multiply by ``x_{n+1}`` on the right and on the left.  Starting from the
degree-4 identities J and K, the engine lifts degree by degree, keeping only
the generators that raise the rank of the lifted-identity module.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .expansion import build_expansion_matrix, build_nonlinear_expansion_matrix, expand_poly
from .fp_linalg import DEFAULT_PRIME, RowReducer, check_prime, rcf, symmetric_lift
from .free_magma import (
    ALPHABET,
    FrcBasis,
    Monomial,
    canonicalize_words,
    frc_basis,
    letter_indices,
    nonlinear_basis,
    parse_monomial,
    rc_signature,
)
from .polynomial import CommPolynomial, Polynomial, RcPolynomial

log = logging.getLogger(__name__)

__all__ = [
    "IdentitySyntaxError",
    "LiftingReport",
    "SearchReport",
    "SpecialReport",
    "all_rank_direct",
    "apply_substitution",
    "find_special_identity",
    "format_identity",
    "generators",
    "known_identity",
    "liftings",
    "load_identity",
    "old_rank_direct",
    "parse_identity",
    "permuted_rows",
    "retained_generators",
    "verify_special",
]

# published number of retained generators per degree (J and K in degree 4)
EXPECTED_RETAINED = {4: 2, 5: 8, 6: 25, 7: 55}
EXPECTED_GENERATORS = {4: 2, 5: 12, 6: 56, 7: 200, 8: 495}

_DEFINITIONS = {
    "J": "+(a(bc))d +(a(bd))c +(a(cd))b -(ab)(cd) -(ac)(bd) -(ad)(bc)",
    "K": "+((ab)d)c +((ac)d)b -(a(bc))d -(a(bd))c -(a(cd))b +a((bc)d)",
    "L": "+((ac)b)d +((ad)b)c -(ab)(cd) -(ac)(bd) -(ad)(bc) +a((cd)b)",
    "M": "+(b(cd))a +(b(ac))d +(b(ad))c -(ba)(cd) -(bd)(ac) -(bc)(ad)",
}


class IdentitySyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# known identities and substitutions


def _signed_terms(text: str) -> list[tuple[int, Monomial]]:
    out = []
    for tok in text.split():
        sign = -1 if tok[0] == "-" else 1
        out.append((sign, parse_monomial(tok[1:])))
    return out


def known_identity(name: str) -> Polynomial:
    """J, K, L, M (degree 4) or right commutativity ``rc`` (degree 3).

    ``rc`` vanishes identically once straightened, so it is returned as a raw
    two-term polynomial.
    """
    if name == "rc":
        return Polynomial([(1, parse_monomial("a(bc)")), (-1, parse_monomial("a(cb)"))])
    try:
        return RcPolynomial(_signed_terms(_DEFINITIONS[name]))
    except KeyError:
        raise ValueError(f"unknown identity {name!r}; expected one of J, K, L, M, rc") from None


def _substitute_tree(m: Monomial, sigma: Mapping[str, Monomial]) -> Monomial:
    if isinstance(m, str):
        return sigma.get(m, m)
    return (_substitute_tree(m[0], sigma), _substitute_tree(m[1], sigma))


def apply_substitution(poly: Polynomial, sigma: Mapping[str, Monomial | str]) -> RcPolynomial:
    """Substitute monomials for letters, straighten and collect."""
    sigma = {k: parse_monomial(v) if isinstance(v, str) and len(v) > 1 else v for k, v in sigma.items()}
    return RcPolynomial((c, _substitute_tree(m, sigma)) for m, c in poly.items())


def evaluate(name: str, args: Sequence[str]) -> RcPolynomial:
    """``name(args)``, e.g. ``evaluate("K", "acdb")`` for K(a,c,d,b)."""
    return apply_substitution(known_identity(name), dict(zip("abcd", args)))


def _check_multilinear(poly: RcPolynomial) -> int:
    n = poly.degree
    if not poly or poly.contents() != {ALPHABET[:n]}:
        raise ValueError("liftings need a nonzero multilinear identity on a, b, c, ...")
    return n


def liftings(poly: RcPolynomial) -> list[RcPolynomial]:
    """The n+2 liftings of a multilinear degree-n identity, in the standard order."""
    n = _check_multilinear(poly)
    new = ALPHABET[n]
    out = [apply_substitution(poly, {x: (x, new)}) for x in ALPHABET[:n]]
    out.append(RcPolynomial((c, (m, new)) for m, c in poly.items()))
    out.append(RcPolynomial((c, (new, m)) for m, c in poly.items()))
    return out


# ---------------------------------------------------------------------------
# permuted / substituted coefficient rows


def _term_arrays(poly: RcPolynomial) -> list[tuple[int, int, np.ndarray]]:
    out = []
    for m, c in poly.items():
        _, t, word = rc_signature(m)
        out.append((int(c), t, letter_indices(word)))
    return out


def all_permutations(n: int) -> np.ndarray:
    """All permutations of ``range(n)`` in lex order, one per row."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def arrangements(content: str) -> np.ndarray:
    """Distinct arrangements of a letter multiset (letter indices), lex order."""
    idx = sorted(letter_indices(content).tolist())
    return np.array(sorted(set(itertools.permutations(idx))), dtype=np.int64).reshape(-1, len(idx))


def permuted_rows(poly: RcPolynomial, basis: FrcBasis, images: np.ndarray, p: int) -> sp.csr_matrix:
    """One sparse row per substitution ``letter i -> images[r, i]``, mod p.

    ``images`` has one row per substitution; with a permutation matrix this
    applies every permutation, with arrangements of a multiset it performs the
    nonlinear substitutions.
    """
    images = np.asarray(images, dtype=np.int64)
    m = len(images)
    rows, cols, vals = [], [], []
    for c, t, word in _term_arrays(poly):
        relabeled = canonicalize_words(basis.types[t], images[:, word])
        cols.append(basis.lookup(t, relabeled))
        rows.append(np.arange(m, dtype=np.int64))
        vals.append(np.full(m, c % p, dtype=np.int64))
    out = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, len(basis))
    )
    out.sum_duplicates()
    out.data %= p
    out.eliminate_zeros()
    return out


# ---------------------------------------------------------------------------
# the direct pipeline


@dataclass
class LiftingReport:
    degree: int
    generators: list[RcPolynomial] = field(repr=False)
    trace: list[int]
    retained: list[int]  # 1-based positions where the rank increased
    final_rank: int

    @property
    def retained_generators(self) -> list[RcPolynomial]:
        return [self.generators[i - 1] for i in self.retained]


def _lift_all(polys: Iterable[RcPolynomial]) -> list[RcPolynomial]:
    return [q for poly in polys for q in liftings(poly)]


def _trace(gens: Sequence[RcPolynomial], n: int, p: int, progress: Callable | None = None) -> LiftingReport:
    basis = frc_basis(n)
    perms = all_permutations(n)
    red = RowReducer(len(basis), p)
    trace, retained = [], []
    for i, g in enumerate(gens, 1):
        grew = red.add(permuted_rows(g, basis, perms, p))
        trace.append(red.rank)
        if grew:
            retained.append(i)
        if progress:
            progress(f"degree {n}: generator {i}/{len(gens)} rank {red.rank}")
    return LiftingReport(n, list(gens), trace, retained, red.rank)


class GeneratorCountMismatch(UserWarning):
    """A recomputed generator count differs from the published one."""


def _check_count(n: int, got: int, table: dict[int, int], what: str) -> None:
    want = table.get(n)
    if want is not None and got != want:
        warnings.warn(f"degree {n}: {got} {what}, published count is {want}", GeneratorCountMismatch, stacklevel=3)


def generators(n: int, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> list[RcPolynomial]:
    """Lifted J/K generators in degree n: liftings of the retained degree n-1 ones."""
    if n < 4:
        raise ValueError("J and K start in degree 4")
    if n == 4:
        return [known_identity("J"), known_identity("K")]
    gens = _lift_all(retained_generators(n - 1, p, progress))
    _check_count(n, len(gens), EXPECTED_GENERATORS, "liftings")
    return gens


def retained_generators(n: int, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> list[RcPolynomial]:
    """Generators of degree n that raise the rank; degree 7 uses the per-partition ranks."""
    key = (n, p)
    if key not in _RETAINED:
        _RETAINED[key] = _compute_retained(n, p, progress)
    return list(_RETAINED[key])


_RETAINED: dict[tuple[int, int], tuple[RcPolynomial, ...]] = {}
_OLD_RANK: dict[tuple[int, int], LiftingReport] = {}
_LIFTED: dict[tuple[str, int], RowReducer] = {}


def _compute_retained(n: int, p: int, progress) -> tuple[RcPolynomial, ...]:
    if n == 4:
        gens = generators(4, p)
        retained = _trace(gens, 4, p).retained_generators
    elif n <= 6:
        retained = old_rank_direct(n, p, progress).retained_generators
    elif n == 7:
        from .symrep import retained_by_partition

        gens = generators(7, p, progress)
        keep = retained_by_partition(7, gens, p, progress=progress)
        retained = [gens[i - 1] for i in keep]
    else:
        raise ValueError(f"generator retention is not computed in degree {n}")
    _check_count(n, len(retained), EXPECTED_RETAINED, "retained generators")
    return tuple(retained)


def old_rank_direct(n: int, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> LiftingReport:
    """Cumulative rank of all permutations of the lifted J/K generators in FRC_n."""
    if not 4 <= n <= 6:
        raise ValueError("the direct pipeline covers degrees 4 to 6")
    check_prime(p)
    key = (n, p)
    if key not in _OLD_RANK:
        _OLD_RANK[key] = _trace(generators(n, p, progress), n, p, progress)
    return _OLD_RANK[key]


def all_rank_direct(n: int, p: int = DEFAULT_PRIME) -> int:
    """Dimension of all multilinear identities of degree n: the nullity of [E_n]."""
    if not 2 <= n <= 6:
        raise ValueError("the direct pipeline covers degrees 2 to 6")
    e = build_expansion_matrix(n, p)
    return e.n_cols - rcf(e)[1]


# ---------------------------------------------------------------------------
# nonlinear search in degree 8


@dataclass
class SearchReport:
    content: str
    n_monomials: int
    n_dialgebra_monomials: int
    lifted_rank: int
    expansion_rank: int
    nullity: int
    candidates_tested: int = 0
    rank_increase: int = 0
    free_column: int | None = None


@dataclass
class SpecialReport:
    expansion_zero: bool
    rank_increase: int
    commutative_terms: int

    @property
    def ok(self) -> bool:
        return self.expansion_zero and self.rank_increase > 0


def _check_content(content: str, p: int) -> str:
    content = "".join(sorted(content))
    if len(content) != 8:
        raise ValueError("the nonlinear search is set up for degree 8")
    if p <= len(content):
        raise ValueError("the prime must exceed the degree")
    check_prime(p)
    return content


def lifted_reducer(content: str, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> RowReducer:
    """Row-reduced span of all content substitutions of the degree-8 generators."""
    content = _check_content(content, p)
    key = (content, p)
    if key not in _LIFTED:
        if len(_LIFTED) >= 2:  # each reducer can hold ~0.5 GB
            _LIFTED.pop(next(iter(_LIFTED)))
        _LIFTED[key] = _build_lifted(content, p, progress)
    return _LIFTED[key]


def _build_lifted(content: str, p: int, progress) -> RowReducer:
    basis = nonlinear_basis(content)
    subs = arrangements(content)
    gens = generators(8, p, progress)
    red = RowReducer(len(basis), p, capacity=min(len(basis), 4096))
    for i, g in enumerate(gens, 1):
        red.add(permuted_rows(g, basis, subs, p))
        if progress and (i % 25 == 0 or i == len(gens)):
            progress(f"step 1: generator {i}/{len(gens)} rank {red.rank}")
    return red


def _distinct_sizes(reduced: np.ndarray, free: np.ndarray) -> np.ndarray:
    """Distinct nonzero coefficients of each canonical nullspace vector."""
    sizes = np.empty(len(free), dtype=np.int64)
    for j, f in enumerate(free):
        col = reduced[:, f]
        vals = np.unique(col[col != 0])
        # the free entry is 1; pivot entries are -col
        sizes[j] = len(set((-vals).tolist()) | {1}) if len(vals) else 1
    return sizes


def _vector_to_polynomial(vec: np.ndarray, basis: FrcBasis, p: int) -> RcPolynomial:
    coeffs = [(symmetric_lift(int(2 * c), p), basis.monomial(int(i))) for i, c in zip(np.flatnonzero(vec), vec[vec != 0])]
    return RcPolynomial(coeffs).normalized()


def find_special_identity(
    content: str = "aaaabbbc",
    p: int = DEFAULT_PRIME,
    progress: Callable | None = None,
    batch: int = 256,
) -> tuple[RcPolynomial | None, SearchReport]:
    """Find a nonlinear identity of degree 8 not implied by the lifted J/K identities."""
    content = _check_content(content, p)
    basis = nonlinear_basis(content)
    lifted = lifted_reducer(content, p, progress)
    e = build_nonlinear_expansion_matrix(content, p)
    reduced, r, pivots = rcf(e)
    rows = reduced.entries[:r]
    pivots = np.array(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(len(basis)), pivots)
    report = SearchReport(content, len(basis), e.n_rows, lifted.rank, r, len(free))
    if progress:
        progress(f"step 1 rank {lifted.rank}; step 2 rank {r}, nullity {len(free)}")
    order = free[np.argsort(_distinct_sizes(rows, free), kind="stable")]
    for start in range(0, len(order), batch):
        chunk = order[start : start + batch]
        vecs = np.zeros((len(chunk), len(basis)), dtype=np.int64)
        vecs[np.arange(len(chunk)), chunk] = 1
        vecs[:, pivots] = (-rows[:, chunk].T) % p
        hits = np.flatnonzero(lifted.residual(vecs).any(axis=1))
        if len(hits):
            k = int(hits[0])
            report.candidates_tested = start + k + 1
            report.rank_increase = 1
            report.free_column = int(chunk[k])
            return _vector_to_polynomial(vecs[k], basis, p), report
    report.candidates_tested = len(order)
    return None, report


def rank_increase(poly: RcPolynomial, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> int:
    """Rank growth of the lifted-identity matrix for ``poly``'s content when ``poly`` is appended."""
    contents = poly.contents()
    if len(contents) != 1:
        raise ValueError("polynomial is not homogeneous in its letters")
    content = contents.pop()
    basis = nonlinear_basis(content)
    vec = np.zeros(len(basis), dtype=np.int64)
    for m, c in poly.items():
        vec[basis.index(m)] = c % p
    if len(content) == 8:
        red = lifted_reducer(content, p, progress)
    else:
        red = _small_lifted(content, p)
    return int(red.residual(vec).any())


@lru_cache(maxsize=8)
def _small_lifted(content: str, p: int) -> RowReducer:
    """Lifted J/K identities for a content of degree 4 to 7."""
    n = len(content)
    basis = nonlinear_basis(content)
    subs = arrangements(content)
    red = RowReducer(len(basis), p)
    gens = generators(n, p) if n > 4 else generators(4, p)
    for g in gens:
        red.add(permuted_rows(g, basis, subs, p))
    return red


def verify_special(poly: RcPolynomial, p: int = DEFAULT_PRIME, progress: Callable | None = None) -> SpecialReport:
    zero = not expand_poly(poly)
    inc = rank_increase(poly, p, progress)
    comm = CommPolynomial((c, m) for m, c in poly.items())
    return SpecialReport(zero, inc, len(comm))


# ---------------------------------------------------------------------------
# identity files


def parse_identity(text: str) -> RcPolynomial:
    """Parse lines ``<integer coefficient> <monomial>``; ``#`` starts a comment."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise IdentitySyntaxError("expected '<coefficient> <monomial>'", lineno)
        try:
            coef = int(parts[0])
        except ValueError:
            raise IdentitySyntaxError(f"bad coefficient {parts[0]!r}", lineno) from None
        try:
            mono = parse_monomial(parts[1])
        except ValueError as exc:
            raise IdentitySyntaxError(str(exc), lineno) from None
        terms.append((coef, mono))
    return RcPolynomial(terms)


def load_identity(path: str | Path) -> RcPolynomial:
    return parse_identity(Path(path).read_text())


def format_identity(poly: Polynomial, header: str | None = None) -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += poly.to_lines()
    return "\n".join(lines) + "\n"
