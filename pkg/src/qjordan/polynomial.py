"""Sparse polynomials: coefficient maps from monomials to integers.

``Polynomial`` is the generic container; subclasses fix how monomials are
canonicalized on insertion and how terms are ordered for printing and
normalization.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, TypeVar

from .free_magma import (
    Monomial,
    comm_signature,
    degree,
    format_monomial,
    leaves,
    rc_signature,
    straighten,
    straighten_commutative,
)

P = TypeVar("P", bound="Polynomial")

__all__ = ["CommPolynomial", "Polynomial", "RcPolynomial"]


class Polynomial(Mapping):
    """Immutable map monomial -> nonzero integer coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable[tuple[int, Hashable]] = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else ((m, c) for c, m in terms)
        for m, c in items:
            m = self.canonical(m)
            acc[m] = acc.get(m, 0) + int(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._hash = None

    # subclasses override these two
    @staticmethod
    def canonical(m):
        return m

    @staticmethod
    def sort_key(m):
        return m

    @staticmethod
    def format_term(m) -> str:
        return str(m)

    @classmethod
    def _raw(cls: type[P], terms: dict) -> P:
        out = cls.__new__(cls)
        out._terms = terms
        out._hash = None
        return out

    # Mapping protocol
    def __getitem__(self, m):
        return self._terms[m]

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def get(self, m, default=0):
        return self._terms.get(m, default)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # arithmetic
    def _combine(self: P, other: P, sign: int) -> P:
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = acc.get(m, 0) + sign * c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return self._raw(acc)

    def __add__(self: P, other: P) -> P:
        return self._combine(other, 1)

    def __sub__(self: P, other: P) -> P:
        return self._combine(other, -1)

    def __neg__(self: P) -> P:
        return self._raw({m: -c for m, c in self._terms.items()})

    def __mul__(self: P, k: int) -> P:
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return self._raw({})
        return self._raw({m: k * c for m, c in self._terms.items()})

    __rmul__ = __mul__

    def map_monomials(self: P, f: Callable) -> P:
        """Apply ``f`` to every monomial and recollect (canonicalizing again)."""
        return type(self)((f(m), c) for m, c in self._terms.items())

    def mod(self: P, p: int) -> P:
        """Coefficients reduced to symmetric representatives mod p."""
        out = {}
        for m, c in self._terms.items():
            r = c % p
            if r > p // 2:
                r -= p
            if r:
                out[m] = r
        return self._raw(out)

    # ordering and normalization
    def sorted_terms(self) -> list[tuple[int, Hashable]]:
        return [(self._terms[m], m) for m in sorted(self._terms, key=self.sort_key)]

    def content_gcd(self) -> int:
        return math.gcd(*self._terms.values()) if self._terms else 0

    def normalized(self: P) -> P:
        """Divide by the coefficient gcd; make the first term positive."""
        if not self._terms:
            return self
        g = self.content_gcd()
        first = min(self._terms, key=self.sort_key)
        if self._terms[first] < 0:
            g = -g
        return self._raw({m: c // g for m, c in self._terms.items()})

    def ratio_to(self, other: "Polynomial") -> Fraction | None:
        """The scalar ``r`` with ``self == r * other``, if one exists."""
        if set(self._terms) != set(other._terms) or not self._terms:
            return None
        m0 = next(iter(self._terms))
        r = Fraction(self._terms[m0], other._terms[m0])
        if all(Fraction(c, other._terms[m]) == r for m, c in self._terms.items()):
            return r
        return None

    def __repr__(self) -> str:
        body = " ".join(
            f"{'+' if c > 0 else '-'} {abs(c) if abs(c) != 1 else ''}{self.format_term(m)}"
            for c, m in self.sorted_terms()
        )
        return f"{type(self).__name__}({body.lstrip('+ ') if body else '0'})"

    def to_lines(self) -> list[str]:
        return [f"{c} {self.format_term(m)}" for c, m in self.sorted_terms()]


class RcPolynomial(Polynomial):
    """Polynomial in the free right-commutative algebra (straightened monomials)."""

    __slots__ = ()

    @staticmethod
    def canonical(m: Monomial) -> Monomial:
        return straighten(m)

    @staticmethod
    def sort_key(m: Monomial):
        return rc_signature(m)

    @staticmethod
    def format_term(m: Monomial) -> str:
        return format_monomial(m)

    @property
    def degree(self) -> int:
        return degree(next(iter(self._terms))) if self._terms else 0

    def contents(self) -> set[str]:
        return {"".join(sorted(leaves(m))) for m in self._terms}

    def is_multilinear(self) -> bool:
        cs = self.contents()
        return len(cs) == 1 and len(set(next(iter(cs)))) == self.degree


class CommPolynomial(Polynomial):
    """Polynomial in the free commutative algebra (children sorted at every node)."""

    __slots__ = ()

    @staticmethod
    def canonical(m: Monomial) -> Monomial:
        return straighten_commutative(m)

    @staticmethod
    def sort_key(m: Monomial):
        return comm_signature(m)

    @staticmethod
    def format_term(m: Monomial) -> str:
        return format_monomial(m)

    @property
    def degree(self) -> int:
        return degree(next(iter(self._terms))) if self._terms else 0
