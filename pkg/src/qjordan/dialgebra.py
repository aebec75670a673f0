"""The free associative dialgebra.

Every dialgebra monomial equals a unique normal form
``(a_1 |- ... |- a_{k-1}) |- a_k -| (a_{k+1} -| ... -| a_n)``, determined by
its leaf word and its *center* ``a_k``.  Normal forms are stored as
``DiMonomial(word, center)`` with a 1-based center; text form puts a caret
before the center letter: ``ed^abc``.

Two-operation terms (``DiTerm``) are nested tuples ``(op, left, right)`` with
``op`` one of ``LEFT = "-|"`` (⊣) and ``RIGHT = "|-"`` (⊢); leaves are letters.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, NamedTuple, Union

import numpy as np

from .free_magma import ALPHABET, MAX_BASIS_DEGREE, MonomialSyntaxError, ResourceGuardError
from .polynomial import Polynomial

LEFT = "-|"
RIGHT = "|-"

DiTerm = Union[str, tuple]

__all__ = [
    "LEFT",
    "RIGHT",
    "DiMonomial",
    "DiPolynomial",
    "DiTerm",
    "FdBasis",
    "center",
    "di_product",
    "fd_basis",
    "format_diterm",
    "normal_form",
    "parse_dimonomial",
    "parse_diterm",
    "term_leaves",
]


class DiMonomial(NamedTuple):
    word: str
    center: int

    @property
    def degree(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        k = self.center - 1
        return self.word[:k] + "^" + self.word[k:]


def parse_dimonomial(text: str) -> DiMonomial:
    if text.count("^") != 1:
        raise MonomialSyntaxError("expected exactly one '^'", text.find("^") if "^" in text else len(text))
    k = text.index("^")
    word = text.replace("^", "")
    if k >= len(word):
        raise MonomialSyntaxError("'^' must precede a letter", k)
    for i, ch in enumerate(text):
        if ch != "^" and ch not in ALPHABET:
            raise MonomialSyntaxError(f"invalid character {ch!r}", i)
    return DiMonomial(word, k + 1)


def di_product(u: DiMonomial, op: str, v: DiMonomial) -> DiMonomial:
    if op == LEFT:
        return DiMonomial(u.word + v.word, u.center)
    if op == RIGHT:
        return DiMonomial(u.word + v.word, len(u.word) + v.center)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# two-operation terms


def term_leaves(t: DiTerm) -> str:
    if isinstance(t, str):
        return t
    return term_leaves(t[1]) + term_leaves(t[2])


def center(t: DiTerm) -> int:
    """1-based leaf position of the center of ``t``."""
    if isinstance(t, str):
        return 1
    op, left, right = t
    if op == LEFT:
        return center(left)
    return len(term_leaves(left)) + center(right)


def normal_form(t: DiTerm) -> DiMonomial:
    return DiMonomial(term_leaves(t), center(t))


def format_diterm(t: DiTerm) -> str:
    if isinstance(t, str):
        return t
    return "(" + format_diterm(t[1]) + t[0] + format_diterm(t[2]) + ")"


def parse_diterm(text: str) -> DiTerm:
    """Parse ``diterm := letter | "(" diterm ("-|" | "|-") diterm ")"``."""
    pos = 0

    def item():
        nonlocal pos
        if pos >= len(text):
            raise MonomialSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch in ALPHABET:
            pos += 1
            return ch
        if ch != "(":
            raise MonomialSyntaxError(f"unexpected {ch!r}", pos)
        pos += 1
        left = item()
        op = text[pos : pos + 2]
        if op not in (LEFT, RIGHT):
            raise MonomialSyntaxError("expected '-|' or '|-'", pos)
        pos += 2
        right = item()
        if pos >= len(text) or text[pos] != ")":
            raise MonomialSyntaxError("unbalanced parentheses", pos)
        pos += 1
        return (op, left, right)

    out = item()
    if pos != len(text):
        raise MonomialSyntaxError("trailing input", pos)
    return out


# ---------------------------------------------------------------------------
# polynomials and bases


class DiPolynomial(Polynomial):
    """Polynomial in the free associative dialgebra over normal forms."""

    __slots__ = ()

    @staticmethod
    def sort_key(m: DiMonomial):
        return (m.center, m.word)

    @staticmethod
    def format_term(m: DiMonomial) -> str:
        return str(m)


def _rank_multilinear(words: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row among the permutations of its letters."""
    n = words.shape[1]
    ranks = np.zeros(len(words), dtype=np.int64)
    for i in range(n):
        smaller = (words[:, i + 1 :] < words[:, i : i + 1]).sum(axis=1)
        ranks += smaller * math.factorial(n - 1 - i)
    return ranks


class FdBasis:
    """Dialgebra normal forms with a fixed letter content, center-major then word-lex."""

    def __init__(self, content: str, *, allow_large: bool = False):
        content = "".join(sorted(content))
        if not content:
            raise ValueError("content must be nonempty")
        n = len(content)
        if n > MAX_BASIS_DEGREE and not allow_large:
            raise ResourceGuardError(f"dialgebra basis of degree {n} exceeds the guard {MAX_BASIS_DEGREE}")
        self.content = content
        self.degree = n
        self.multilinear = len(set(content)) == n
        if self.multilinear:
            self.words = ["".join(w) for w in itertools.permutations(content)]
        else:
            self.words = sorted({"".join(w) for w in itertools.permutations(content)})
        self._word_index = {w: i for i, w in enumerate(self.words)}
        self.n_words = len(self.words)

    def __len__(self) -> int:
        return self.degree * self.n_words

    def __iter__(self) -> Iterator[DiMonomial]:
        for k in range(1, self.degree + 1):
            for w in self.words:
                yield DiMonomial(w, k)

    def index(self, m: DiMonomial) -> int:
        return (m.center - 1) * self.n_words + self._word_index[m.word]

    def monomial(self, i: int) -> DiMonomial:
        k, j = divmod(i, self.n_words)
        return DiMonomial(self.words[j], k + 1)

    def word_rank(self, words: np.ndarray) -> np.ndarray:
        """Vectorized word index for rows of letter indices (multilinear only)."""
        if not self.multilinear:
            raise ValueError("vectorized word ranking needs distinct letters")
        return _rank_multilinear(np.asarray(words))


def fd_basis(letters: str | int, *, allow_large: bool = False) -> FdBasis:
    """Basis of the dialgebra space for a content string or n distinct letters."""
    if isinstance(letters, int):
        if letters < 1:
            raise ValueError("degree must be at least 1")
        letters = ALPHABET[:letters]
    return FdBasis(letters, allow_large=allow_large)
