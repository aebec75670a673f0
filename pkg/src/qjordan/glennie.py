"""Noncommutative preimages of the Glennie identity.

Starting from the commutative polynomial G (degree 8, letters a^3 b^3 c^2):

1. linearize one occurrence of a letter x into a fresh letter d;
2. turn every monomial into a dialgebra term centered at d: operations
   written before d become |-, those after d become -|;
3. rewrite ``y |- z`` as ``z y`` and ``y -| z`` as ``y z``;
4. put x back for d, straighten and collect.

The result is an identity of the quasi-Jordan product; :func:`verify_preimage`
checks that its expansion into the free dialgebra vanishes over the integers.
"""

from __future__ import annotations

from typing import Iterator

from .dialgebra import LEFT, RIGHT, DiTerm, center, term_leaves
from .expansion import expand_poly
from .free_magma import Monomial, leaves, parse_monomial
from .polynomial import CommPolynomial, Polynomial, RcPolynomial

__all__ = [
    "comm_product",
    "glennie_G",
    "glennie_preimage",
    "jordan_triple",
    "mark_center",
    "opposite_rewrite",
    "partial_linearize",
    "verify_preimage",
]

FRESH = "d"


def _as_comm(x) -> CommPolynomial:
    if isinstance(x, CommPolynomial):
        return x
    if isinstance(x, str):
        x = parse_monomial(x)
    return CommPolynomial([(1, x)])


def comm_product(x, y) -> CommPolynomial:
    x, y = _as_comm(x), _as_comm(y)
    return CommPolynomial((c * e, (m, n)) for m, c in x.items() for n, e in y.items())


def jordan_triple(x, y, z) -> CommPolynomial:
    """{xyz} = (xy)z + (zy)x - (xz)y."""
    mul = comm_product
    return mul(mul(x, y), z) + mul(mul(z, y), x) - mul(mul(x, z), y)


def glennie_G() -> CommPolynomial:
    """2{{b{aca}b}c(ab)} - {b{a{c(ab)c}a}b} - 2{(ab)c{a{bcb}a}} + {a{b{c(ab)c}b}a}."""
    t = jordan_triple
    ab = comm_product("a", "b")
    g1 = t(t("b", t("a", "c", "a"), "b"), "c", ab)
    g2 = t("b", t("a", t("c", ab, "c"), "a"), "b")
    g3 = t(ab, "c", t("a", t("b", "c", "b"), "a"))
    g4 = t("a", t("b", t("c", ab, "c"), "b"), "a")
    return 2 * g1 - g2 - 2 * g3 + g4


def _replace_each(m: Monomial, x: str, d: str) -> Iterator[Monomial]:
    """Every copy of ``m`` with exactly one occurrence of ``x`` replaced by ``d``."""
    if isinstance(m, str):
        if m == x:
            yield d
        return
    left, right = m
    for l2 in _replace_each(left, x, d):
        yield (l2, right)
    for r2 in _replace_each(right, x, d):
        yield (left, r2)


def partial_linearize(poly: Polynomial, x: str, d: str = FRESH) -> Polynomial:
    """The operator Delta^1_x(d): replace one occurrence of x by d in all ways."""
    if any(d in leaves(m) for m in poly):
        raise ValueError(f"letter {d!r} already occurs in the polynomial")
    return type(poly)((c, m2) for m, c in poly.items() for m2 in _replace_each(m, x, d))


def mark_center(m: Monomial, d: str = FRESH) -> DiTerm:
    """Dialgebra term centered at ``d``: operators written before d become |-, after become -|."""
    count = leaves(m).count(d)
    if count != 1:
        raise ValueError(f"expected exactly one {d!r}, found {count}")

    def go(t, side):
        # side: 0 = the subtree contains d, -1 = left of d, +1 = right of d
        if isinstance(t, str):
            return t
        left, right = t
        if side < 0:
            return (RIGHT, go(left, -1), go(right, -1))
        if side > 0:
            return (LEFT, go(left, 1), go(right, 1))
        if d in leaves(left):
            return (LEFT, go(left, 0), go(right, 1))
        return (RIGHT, go(left, -1), go(right, 0))

    out = go(m, 0)
    assert term_leaves(out)[center(out) - 1] == d
    return out


def opposite_rewrite(t: DiTerm) -> Monomial:
    """Replace ``y |- z`` by ``z y`` and ``y -| z`` by ``y z``, bottom-up."""
    if isinstance(t, str):
        return t
    op, left, right = t
    a, b = opposite_rewrite(left), opposite_rewrite(right)
    return (b, a) if op == RIGHT else (a, b)


def _rename(m: Monomial, old: str, new: str) -> Monomial:
    if isinstance(m, str):
        return new if m == old else m
    return (_rename(m[0], old, new), _rename(m[1], old, new))


def glennie_preimage(x: str) -> RcPolynomial:
    """Right-commutative preimage of G obtained by linearizing the letter ``x``."""
    if x not in "abc" or len(x) != 1:
        raise ValueError("x must be one of a, b, c")
    h = partial_linearize(glennie_G(), x, FRESH)
    terms = ((c, _rename(opposite_rewrite(mark_center(m, FRESH)), FRESH, x)) for m, c in h.items())
    return RcPolynomial(terms).normalized()


def verify_preimage(x: str | RcPolynomial) -> bool:
    """Exact-integer expansion of the preimage is zero."""
    poly = glennie_preimage(x) if isinstance(x, str) else x
    return not expand_poly(poly)
