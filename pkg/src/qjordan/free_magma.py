"""Free nonassociative, commutative and right-commutative monomials.

A monomial is either a single-letter string (a leaf) or a pair
``(left, right)`` of monomials.  Association types are monomials whose leaves
read ``a, b, c, ...`` from left to right (the *basic* monomial of the type).

Right commutativity ``x(yz) = x(zy)`` makes every right factor of every
submonomial commutative, so a canonical monomial keeps the left spine as it is
and orders the two children of every other node by

    degree (descending), commutative type index, leaf word.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

import numpy as np

Monomial = Union[str, tuple]

ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_BASE = 26
MAX_BASIS_DEGREE = 8

__all__ = [
    "ALPHABET",
    "AssociationType",
    "FrcBasis",
    "Monomial",
    "MonomialSyntaxError",
    "ResourceGuardError",
    "comm_types",
    "count_types",
    "degree",
    "format_monomial",
    "frc_basis",
    "frc_dim_conjecture",
    "leaves",
    "nonlinear_basis",
    "parse_monomial",
    "rc_signature",
    "rc_types",
    "straighten",
    "straighten_commutative",
    "symmetries_of",
]


class MonomialSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ResourceGuardError(RuntimeError):
    """A basis or matrix would exceed the configured size guard."""


# ---------------------------------------------------------------------------
# basic tree utilities


def is_leaf(m: Monomial) -> bool:
    return isinstance(m, str)


@lru_cache(maxsize=None)
def degree(m: Monomial) -> int:
    if isinstance(m, str):
        return 1
    return degree(m[0]) + degree(m[1])


@lru_cache(maxsize=None)
def leaves(m: Monomial) -> str:
    if isinstance(m, str):
        return m
    return leaves(m[0]) + leaves(m[1])


def _fmt(m: Monomial) -> str:
    if isinstance(m, str):
        return m
    return "(" + _fmt(m[0]) + _fmt(m[1]) + ")"


def format_monomial(m: Monomial) -> str:
    """Text form with the outermost parentheses omitted."""
    if isinstance(m, str):
        return m
    return _fmt(m[0]) + _fmt(m[1])


def parse_monomial(text: str) -> Monomial:
    """Parse ``monomial := letter | "(" monomial monomial ")"``.

    The outermost parentheses may be omitted.
    """
    pos = 0
    n = len(text)

    def item() -> Monomial:
        nonlocal pos
        if pos >= n:
            raise MonomialSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch == "(":
            pos += 1
            left = item()
            right = item()
            if pos >= n:
                raise MonomialSyntaxError("unbalanced parentheses", pos)
            if text[pos] != ")":
                raise MonomialSyntaxError(f"expected ')' but found {text[pos]!r}", pos)
            pos += 1
            return (left, right)
        if ch in ALPHABET:
            pos += 1
            return ch
        if ch == ")":
            raise MonomialSyntaxError("unexpected ')'", pos)
        raise MonomialSyntaxError(f"invalid character {ch!r}", pos)

    if not text:
        raise MonomialSyntaxError("empty monomial", 0)
    first = item()
    if pos == n:
        return first
    second = item()
    if pos != n:
        raise MonomialSyntaxError("trailing input", pos)
    return (first, second)


def fill(shape: Monomial, word: str) -> Monomial:
    """Replace the leaves of ``shape`` left to right by the letters of ``word``."""
    it = iter(word)

    def go(t):
        if isinstance(t, str):
            return next(it)
        return (go(t[0]), go(t[1]))

    return go(shape)


def basic_monomial(shape: Monomial) -> Monomial:
    return fill(shape, ALPHABET[: degree(shape)])


def node_at(m: Monomial, address: str) -> Monomial:
    for step in address:
        m = m[int(step)]
    return m


def swap_at(m: Monomial, address: str) -> Monomial:
    """Transpose the two children of the node at ``address``."""
    if not address:
        return (m[1], m[0])
    i = int(address[0])
    child = swap_at(m[i], address[1:])
    return (child, m[1]) if i == 0 else (m[0], child)


def internal_addresses(m: Monomial, prefix: str = "") -> Iterator[str]:
    if isinstance(m, str):
        return
    yield prefix
    yield from internal_addresses(m[0], prefix + "0")
    yield from internal_addresses(m[1], prefix + "1")


def spine_addresses(m: Monomial) -> set[str]:
    out = set()
    addr = ""
    while not isinstance(m, str):
        out.add(addr)
        m = m[0]
        addr += "0"
    return out


# ---------------------------------------------------------------------------
# association types


@dataclass(frozen=True)
class AssociationType:
    """A parenthesization shape in canonical orientation.

    ``index`` is 0-based; the printed type numbers in tables are ``index + 1``.
    ``spans`` gives, for each symmetry, the leaf ranges ``(start, mid, end)``
    of the two transposable factors.
    """

    degree: int
    kind: str
    index: int
    shape: Monomial = field(repr=False)
    symmetries: tuple[str, ...] = ()
    spans: tuple[tuple[int, int, int], ...] = field(default=(), repr=False)

    @property
    def basic(self) -> Monomial:
        return basic_monomial(self.shape)

    @property
    def number(self) -> int:
        return self.index + 1

    def __str__(self) -> str:
        return format_monomial(self.basic)


class _Tables:
    """Lazily extended enumeration of commutative and right-commutative types."""

    def __init__(self):
        self.comm: dict[int, list[AssociationType]] = {}
        self.rc: dict[int, list[AssociationType]] = {}
        self.comm_key: dict[tuple[int, int, int, int], int] = {}
        self.rc_key: dict[tuple[int, int, int, int], int] = {}
        self.top = 0

    def ensure(self, n: int) -> None:
        while self.top < n:
            self._extend(self.top + 1)
            self.top += 1

    def _extend(self, n: int) -> None:
        if n == 1:
            leaf = AssociationType(1, "commutative", 0, "a")
            self.comm[1] = [leaf]
            self.rc[1] = [AssociationType(1, "right-commutative", 0, "a")]
            return
        comm = []
        for dv in range(1, n // 2 + 1):
            du = n - dv
            for iu, u in enumerate(self.comm[du]):
                for iv, v in enumerate(self.comm[dv]):
                    if du == dv and iu > iv:
                        continue
                    shape = (u.shape, v.shape)
                    self.comm_key[(du, iu, dv, iv)] = len(comm)
                    comm.append(AssociationType(n, "commutative", len(comm), shape))
        self.comm[n] = [self._with_symmetries(t, _comm_symmetries) for t in comm]
        rc = []
        for i in range(1, n):
            for iu, u in enumerate(self.rc[n - i]):
                for iv, v in enumerate(self.comm[i]):
                    shape = (u.shape, v.shape)
                    self.rc_key[(n - i, iu, i, iv)] = len(rc)
                    rc.append(AssociationType(n, "right-commutative", len(rc), shape))
        self.rc[n] = [self._with_symmetries(t, _rc_symmetries) for t in rc]

    @staticmethod
    def _with_symmetries(t: AssociationType, finder) -> AssociationType:
        found: list[tuple[str, tuple[int, int, int]]] = []
        finder(t.shape, "", 0, found)
        return AssociationType(
            t.degree,
            t.kind,
            t.index,
            t.shape,
            tuple(a for a, _ in found),
            tuple(s for _, s in found),
        )

    def comm_id(self, shape: Monomial) -> tuple[int, int]:
        """(degree, commutative index) of a shape already in canonical orientation."""
        if isinstance(shape, str):
            return 1, 0
        dl, il = self.comm_id(shape[0])
        dr, ir = self.comm_id(shape[1])
        self.ensure(dl + dr)
        return dl + dr, self.comm_key[(dl, il, dr, ir)]


_TABLES = _Tables()


def _comm_symmetries(t: Monomial, addr: str, offset: int, out: list) -> None:
    if isinstance(t, str):
        return
    x, y = t
    dx = degree(x)
    _comm_symmetries(x, addr + "0", offset, out)
    _comm_symmetries(y, addr + "1", offset + dx, out)
    if dx == degree(y) and _TABLES.comm_id(x) == _TABLES.comm_id(y):
        out.append((addr, (offset, offset + dx, offset + 2 * dx)))


def _rc_symmetries(t: Monomial, addr: str, offset: int, out: list) -> None:
    if isinstance(t, str):
        return
    u, v = t
    _rc_symmetries(u, addr + "0", offset, out)
    _comm_symmetries(v, addr + "1", offset + degree(u), out)


def _check_degree(n: int) -> None:
    if n < 1:
        raise ValueError(f"degree must be at least 1, got {n}")


def comm_types(n: int) -> list[AssociationType]:
    _check_degree(n)
    _TABLES.ensure(n)
    return list(_TABLES.comm[n])


def rc_types(n: int) -> list[AssociationType]:
    _check_degree(n)
    _TABLES.ensure(n)
    return list(_TABLES.rc[n])


def all_types(n: int) -> list[Monomial]:
    """Every bracketing of n leaves (no symmetry quotient)."""
    _check_degree(n)

    @lru_cache(maxsize=None)
    def shapes(k):
        if k == 1:
            return ("a",)
        return tuple((u, v) for i in range(1, k) for u in shapes(k - i) for v in shapes(i))

    return [basic_monomial(s) for s in shapes(n)]


def count_types(n: int) -> tuple[int, int, int]:
    """(C_n, R_n, K_n) from the counting recursions."""
    _check_degree(n)
    C = {1: 1}
    R = {1: 1}
    for k in range(2, n + 1):
        c = sum(C[k - i] * C[i] for i in range(1, (k - 1) // 2 + 1))
        if k % 2 == 0:
            c += math.comb(C[k // 2] + 1, 2)
        C[k] = c
        R[k] = sum(R[k - i] * C[i] for i in range(1, k))
    catalan = math.comb(2 * n - 2, n - 1) // n
    return C[n], R[n], catalan


def symmetries_of(t: AssociationType) -> list[str]:
    """Node addresses ('0' = left, '1' = right, from the root) of the type's symmetries."""
    found: list = []
    if t.kind == "commutative":
        _comm_symmetries(t.shape, "", 0, found)
    else:
        _rc_symmetries(t.shape, "", 0, found)
    return [a for a, _ in found]


def frc_dim_conjecture(n: int) -> int:
    _check_degree(n)
    return n * math.factorial(2 * n - 2) // (2 ** (n - 1) * math.factorial(n - 1))


# ---------------------------------------------------------------------------
# straightening


@lru_cache(maxsize=1 << 18)
def _canon_comm(m: Monomial) -> tuple[Monomial, int, int, str]:
    if isinstance(m, str):
        return m, 1, 0, m
    a = _canon_comm(m[0])
    b = _canon_comm(m[1])
    if (-b[1], b[2], b[3]) < (-a[1], a[2], a[3]):
        a, b = b, a
    n = a[1] + b[1]
    _TABLES.ensure(n)
    idx = _TABLES.comm_key[(a[1], a[2], b[1], b[2])]
    return (a[0], b[0]), n, idx, a[3] + b[3]


@lru_cache(maxsize=1 << 18)
def _canon_rc(m: Monomial) -> tuple[Monomial, int, int, str]:
    if isinstance(m, str):
        return m, 1, 0, m
    u = _canon_rc(m[0])
    v = _canon_comm(m[1])
    n = u[1] + v[1]
    _TABLES.ensure(n)
    idx = _TABLES.rc_key[(u[1], u[2], v[1], v[2])]
    return (u[0], v[0]), n, idx, u[3] + v[3]


def straighten(m: Monomial) -> Monomial:
    """Canonical representative of ``m`` modulo right commutativity."""
    return _canon_rc(m)[0]


def rc_signature(m: Monomial) -> tuple[int, int, str]:
    """(degree, right-commutative type index, leaf word) of ``straighten(m)``."""
    _, n, idx, word = _canon_rc(m)
    return n, idx, word


def straighten_commutative(m: Monomial) -> Monomial:
    """Canonical representative modulo full commutativity."""
    return _canon_comm(m)[0]


def comm_signature(m: Monomial) -> tuple[int, int, str]:
    _, n, idx, word = _canon_comm(m)
    return n, idx, word


# ---------------------------------------------------------------------------
# words as integer arrays


def letter_indices(word: str) -> np.ndarray:
    return np.frombuffer(word.encode("ascii"), dtype=np.uint8).astype(np.int64) - ord("a")


def word_from_indices(idx: Iterable[int]) -> str:
    return "".join(ALPHABET[int(i)] for i in idx)


def word_codes(words: np.ndarray) -> np.ndarray:
    """Integer code of each row; numeric order equals lexicographic order."""
    words = np.asarray(words, dtype=np.int64)
    n = words.shape[1]
    weights = _BASE ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return words @ weights


def canonicalize_words(t: AssociationType, words: np.ndarray) -> np.ndarray:
    """Straighten many labelings of the canonical shape ``t`` at once.

    Only the symmetry nodes can be out of order; they are visited inner-first,
    which is the order in which they were discovered.
    """
    words = np.array(words, dtype=np.int64, copy=True)
    for s, m, e in t.spans:
        left = word_codes(words[:, s:m])
        right = word_codes(words[:, m:e])
        flip = left > right
        if flip.any():
            blk = words[flip, s:e]
            words[flip, s:e] = np.concatenate([blk[:, m - s :], blk[:, : m - s]], axis=1)
    return words


def is_canonical_words(t: AssociationType, words: np.ndarray) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64)
    ok = np.ones(len(words), dtype=bool)
    for s, m, e in t.spans:
        ok &= word_codes(words[:, s:m]) <= word_codes(words[:, m:e])
    return ok


def _arrangements(content: str) -> np.ndarray:
    idx = sorted(letter_indices(content).tolist())
    n = len(idx)
    if len(set(idx)) == n:
        perms = itertools.permutations(idx)
    else:
        perms = sorted(set(itertools.permutations(idx)))
    arr = np.array(list(perms), dtype=np.int8).reshape(-1, n)
    return arr.astype(np.int64)


class FrcBasis:
    """Canonical right-commutative monomials with a fixed letter content.

    Monomials are ordered by association type and then lexicographically by
    leaf word.  With ``n`` distinct letters this is the basis of FRC_n.
    """

    def __init__(self, content: str, *, allow_large: bool = False):
        content = "".join(sorted(content))
        if not content:
            raise ValueError("content must be nonempty")
        if any(ch not in ALPHABET for ch in content):
            raise ValueError(f"letters must be a-z, got {content!r}")
        n = len(content)
        if n > MAX_BASIS_DEGREE and not allow_large:
            raise ResourceGuardError(f"basis of degree {n} exceeds the guard {MAX_BASIS_DEGREE}")
        self.content = content
        self.degree = n
        self.multilinear = len(set(content)) == n
        self.types = rc_types(n)
        arrangements = _arrangements(content)
        self.words: list[np.ndarray] = []
        self.codes: list[np.ndarray] = []
        for t in self.types:
            w = arrangements[is_canonical_words(t, arrangements)] if t.spans else arrangements
            self.words.append(w.astype(np.int8))
            self.codes.append(word_codes(w))
        sizes = [len(c) for c in self.codes]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

    def __len__(self) -> int:
        return int(self.offsets[-1])

    def __iter__(self) -> Iterator[Monomial]:
        for i in range(len(self)):
            yield self.monomial(i)

    def type_sizes(self) -> list[int]:
        return [len(c) for c in self.codes]

    def lookup(self, type_index: int, words: np.ndarray) -> np.ndarray:
        """Column indices of canonical words of one type (vectorized)."""
        codes = word_codes(words)
        table = self.codes[type_index]
        pos = np.searchsorted(table, codes)
        pos_c = np.minimum(pos, len(table) - 1)
        if len(table) == 0 or np.any(table[pos_c] != codes):
            raise KeyError("word is not a canonical monomial of this basis")
        return pos + self.offsets[type_index]

    def index(self, m: Monomial) -> int:
        n, t, word = rc_signature(m)
        if n != self.degree or "".join(sorted(word)) != self.content:
            raise KeyError(f"{format_monomial(m)} has the wrong content for this basis")
        return int(self.lookup(t, letter_indices(word)[None, :])[0])

    def monomial(self, i: int) -> Monomial:
        if not 0 <= i < len(self):
            raise IndexError(i)
        t = int(np.searchsorted(self.offsets, i, side="right") - 1)
        word = word_from_indices(self.words[t][i - self.offsets[t]])
        return fill(self.types[t].shape, word)

    def type_of(self, i: int) -> int:
        return int(np.searchsorted(self.offsets, i, side="right") - 1)


@lru_cache(maxsize=16)
def frc_basis(n: int, allow_large: bool = False) -> FrcBasis:
    """Multilinear basis of FRC_n on the letters a, b, c, ..."""
    _check_degree(n)
    return FrcBasis(ALPHABET[:n], allow_large=allow_large)


@lru_cache(maxsize=16)
def nonlinear_basis(content: str, allow_large: bool = False) -> FrcBasis:
    return FrcBasis(content, allow_large=allow_large)
