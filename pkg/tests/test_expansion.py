import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qjordan.dialgebra import LEFT, RIGHT, DiMonomial, DiPolynomial, di_product, fd_basis
from qjordan.expansion import build_expansion_matrix, expand, expand_poly, expansion_templates
from qjordan.fp_linalg import rank
from qjordan.free_magma import ResourceGuardError, frc_basis, parse_monomial, straighten, swap_at
from qjordan.polynomial import RcPolynomial


def reference_expand(m) -> DiPolynomial:
    """Recursive evaluation of xy = x -| y + y |- x on dialgebra polynomials."""
    if isinstance(m, str):
        return DiPolynomial({DiMonomial(m, 1): 1})
    u, v = reference_expand(m[0]), reference_expand(m[1])
    acc: dict = {}
    for x, c in u.items():
        for y, e in v.items():
            for key in (di_product(x, LEFT, y), di_product(y, RIGHT, x)):
                acc[key] = acc.get(key, 0) + c * e
    return DiPolynomial(acc)


def random_tree(rng, word):
    if len(word) == 1:
        return word
    k = rng.randint(1, len(word) - 1)
    return (random_tree(rng, word[:k]), random_tree(rng, word[k:]))


def test_small_example():
    assert expand(parse_monomial("(ab)c")).to_lines() == ["1 ^abc", "1 b^ac", "1 c^ab", "1 cb^a"]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32), st.booleans())
def test_expand_matches_recursive_evaluation(n, seed, repeat):
    rng = random.Random(seed)
    letters = "abcdefg"[:n]
    word = "".join(rng.choice(letters) for _ in range(n)) if repeat else "".join(rng.sample(letters, n))
    m = random_tree(rng, word)
    assert expand(m) == reference_expand(m)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 7), st.integers(0, 2**32))
def test_right_commutativity_holds_in_dialgebra(n, seed):
    # a(bc) and a(cb) have the same expansion: the product is right-commutative
    rng = random.Random(seed)
    m = random_tree(rng, "abcdefg"[:n])
    if isinstance(m[1], str):
        return
    assert expand(m) == expand(swap_at(m, "1"))
    assert expand(m) == expand(straighten(m))


@pytest.mark.parametrize("n", range(1, 7))
def test_template_counts(n):
    for t in frc_basis(n).types:
        temps = expansion_templates(t.basic)
        assert len(temps) == 2 ** (n - 1)
        # multilinear: all 2^(n-1) dialgebra terms are distinct
        assert len(set(temps)) == 2 ** (n - 1)


def test_matrix_columns_match_expand():
    n = 4
    e = build_expansion_matrix(n, 101)
    fd = fd_basis(n)
    basis = frc_basis(n)
    for j, m in enumerate(basis):
        col = {fd.monomial(i): int(v) for i, v in enumerate(e.entries[:, j]) if v}
        assert col == dict(expand(m))


@pytest.mark.parametrize("n, rows, cols, r", [(2, 4, 2, 2), (3, 18, 9, 9), (4, 96, 60, 44), (5, 600, 525, 275)])
def test_expansion_ranks(n, rows, cols, r):
    e = build_expansion_matrix(n, 101)
    assert e.shape == (rows, cols)
    assert rank(e) == r
    assert (np.count_nonzero(e.entries, axis=0) == 2 ** (n - 1)).all()


def test_expand_poly_mod_and_exact():
    p = RcPolynomial([(3, parse_monomial("(ab)c")), (-3, parse_monomial("(ba)c"))])
    exact = expand_poly(p)
    assert set(exact.values()) <= {3, -3}
    assert not expand_poly(p, 3)
    assert not expand_poly(RcPolynomial([(1, parse_monomial("a(bc)")), (-1, parse_monomial("a(cb)"))]))


def test_guard():
    with pytest.raises(ResourceGuardError):
        expand(parse_monomial("((((((((ab)c)d)e)f)g)h)i)"))
