import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qjordan.free_magma import (
    MonomialSyntaxError,
    ResourceGuardError,
    canonicalize_words,
    comm_types,
    count_types,
    degree,
    fill,
    format_monomial,
    frc_basis,
    frc_dim_conjecture,
    internal_addresses,
    leaves,
    letter_indices,
    node_at,
    nonlinear_basis,
    parse_monomial,
    rc_signature,
    rc_types,
    straighten,
    straighten_commutative,
    swap_at,
    symmetries_of,
)

C_TABLE = [1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451]
R_TABLE = [1, 1, 2, 4, 9, 20, 46, 106, 248, 582, 1376, 3264]
K_TABLE = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786]
FRC_DIMS = [1, 2, 9, 60, 525, 5670, 72765, 1081080]

DEGREE6_TYPES = """
((((ab)c)d)e)f (((a(bc))d)e)f (((ab)(cd))e)f ((a((bc)d))e)f (((ab)c)(de))f
((a(bc))(de))f ((ab)((cd)e))f (a(((bc)d)e))f (a((bc)(de)))f (((ab)c)d)(ef)
((a(bc))d)(ef) ((ab)(cd))(ef) (a((bc)d))(ef) ((ab)c)((de)f) (a(bc))((de)f)
(ab)(((cd)e)f) (ab)((cd)(ef)) a((((bc)d)e)f) a(((bc)(de))f) a(((bc)d)(ef))
""".split()


def random_tree(rng: random.Random, word: str):
    if len(word) == 1:
        return word
    k = rng.randint(1, len(word) - 1)
    return (random_tree(rng, word[:k]), random_tree(rng, word[k:]))


def right_factor_addresses(m, prefix="", inside=False):
    """Internal nodes lying inside some right factor (where commutativity holds)."""
    if isinstance(m, str):
        return
    if inside:
        yield prefix
    yield from right_factor_addresses(m[0], prefix + "0", inside)
    yield from right_factor_addresses(m[1], prefix + "1", True)


@st.composite
def monomials(draw, max_degree=8, letters="abcdefgh"):
    n = draw(st.integers(1, max_degree))
    word = "".join(draw(st.lists(st.sampled_from(letters), min_size=n, max_size=n)))
    seed = draw(st.integers(0, 2**32))
    return random_tree(random.Random(seed), word)


def test_type_counts_match_table():
    for n in range(1, 13):
        assert count_types(n) == (C_TABLE[n - 1], R_TABLE[n - 1], K_TABLE[n - 1])


def test_generating_function_relation():
    # sum R_n x^n = x / (1 - C(x)), compared as power series up to x^12
    N = 12
    c = [0] + [count_types(n)[0] for n in range(1, N + 1)]
    inv = [1] + [0] * N  # 1 / (1 - C(x))
    for k in range(1, N + 1):
        inv[k] = sum(c[i] * inv[k - i] for i in range(1, k + 1))
    assert [inv[n - 1] for n in range(1, N + 1)] == R_TABLE


def test_enumerated_types_match_counts():
    for n in range(1, 10):
        assert len(comm_types(n)) == count_types(n)[0]
        assert len(rc_types(n)) == count_types(n)[1]


def test_degree6_type_list_and_order():
    assert [str(t) for t in rc_types(6)] == DEGREE6_TYPES


def test_degree5_symmetries():
    types = rc_types(5)
    assert [len(t.symmetries) for t in types] == [0, 1, 1, 1, 1, 2, 1, 1, 3]
    assert [len(symmetries_of(t)) for t in types] == [0, 1, 1, 1, 1, 2, 1, 1, 3]
    sizes = frc_basis(5).type_sizes()
    assert sizes == [120 >> len(t.symmetries) for t in types]
    assert sum(sizes) == 525


def test_frc_dimensions():
    for n, dim in enumerate(FRC_DIMS, 1):
        assert len(frc_basis(n)) == dim
    for n in range(1, 8):
        assert frc_dim_conjecture(n) == FRC_DIMS[n - 1]


def test_frc_dims_from_symmetry_counts():
    for n in range(1, 8):
        assert sum(math.factorial(n) >> len(t.symmetries) for t in rc_types(n)) == FRC_DIMS[n - 1]


def test_symmetries_are_fixed_by_basic_monomial_straightening():
    for n in range(2, 8):
        for t in rc_types(n):
            for addr in t.symmetries:
                assert straighten(swap_at(t.basic, addr)) == t.basic


@pytest.mark.parametrize(
    "text, expected",
    [
        ("(ab)c", (("a", "b"), "c")),
        ("a", "a"),
        ("ab", ("a", "b")),
        ("((ab)c)", (("a", "b"), "c")),
        ("a((bc)(de))", ("a", (("b", "c"), ("d", "e")))),
    ],
)
def test_parse(text, expected):
    assert parse_monomial(text) == expected


def test_straighten_known_example():
    m = parse_monomial("a((bc)(de))")
    assert straighten(m) == m
    assert degree(m) == 5


@pytest.mark.parametrize(
    "text, offset",
    [("((ab)", 5), ("", 0), ("a)", 1), ("(ab", 3), ("aB", 1), ("(abc)", 3), ("abc", 2)],
)
def test_parse_errors(text, offset):
    with pytest.raises(MonomialSyntaxError) as info:
        parse_monomial(text)
    assert info.value.offset == offset


@settings(max_examples=300, deadline=None)
@given(monomials())
def test_format_parse_round_trip(m):
    assert parse_monomial(format_monomial(m)) == m
    assert leaves(m) == "".join(ch for ch in format_monomial(m) if ch.isalpha())


@settings(max_examples=300, deadline=None)
@given(monomials(), st.data())
def test_straighten_invariant_under_right_commutativity(m, data):
    addrs = list(right_factor_addresses(m))
    if not addrs:
        return
    addr = data.draw(st.sampled_from(addrs))
    assert straighten(swap_at(m, addr)) == straighten(m)


@settings(max_examples=300, deadline=None)
@given(monomials())
def test_commutative_straighten_invariant_under_any_swap(m):
    for addr in internal_addresses(m):
        assert straighten_commutative(swap_at(m, addr)) == straighten_commutative(m)


def test_left_factor_swap_changes_class():
    # a(bc) = a(cb), but (ab)c != (ba)c
    assert straighten(parse_monomial("a(cb)")) == parse_monomial("a(bc)")
    assert straighten(parse_monomial("(ba)c")) != straighten(parse_monomial("(ab)c"))


@pytest.mark.parametrize("n", range(1, 9))
def test_straighten_idempotent_random(n):
    rng = random.Random(n)
    letters = "abcdefgh"[:n]
    basis = frc_basis(n) if n <= 7 else None
    for _ in range(10_000):
        word = "".join(rng.sample(letters, n)) if rng.random() < 0.5 else "".join(rng.choice(letters) for _ in range(n))
        m = random_tree(rng, word)
        s = straighten(m)
        assert straighten(s) == s
        assert sorted(leaves(s)) == sorted(word)
        if basis is not None and sorted(word) == sorted(letters):
            assert basis.monomial(basis.index(s)) == s


def test_basis_is_canonical_and_indexed():
    basis = frc_basis(5)
    for i, m in enumerate(basis):
        assert straighten(m) == m
        assert basis.index(m) == i
        assert rc_signature(m)[1] == basis.type_of(i)


def test_canonicalize_words_matches_straighten():
    t = rc_types(6)[18]  # a(((bc)(de))f)
    words = np.array(list(itertools.permutations(range(6))))
    canon = canonicalize_words(t, words)
    for w, c in zip(words[::37], canon[::37]):
        word = "".join("abcdef"[i] for i in w)
        assert leaves(straighten(fill(t.shape, word))) == "".join("abcdef"[i] for i in c)


def test_nonlinear_basis_size():
    basis = nonlinear_basis("aaaabbbc")
    assert len(basis) == 12131
    assert all(straighten(basis.monomial(i)) == basis.monomial(i) for i in range(0, len(basis), 97))
    m = parse_monomial("((((((aa)a)a)b)b)c)b")
    assert basis.monomial(basis.index(m)) == m


def test_resource_guard():
    with pytest.raises(ResourceGuardError):
        frc_basis(9)


def test_node_and_swap():
    m = parse_monomial("a((bc)d)")
    assert node_at(m, "10") == ("b", "c")
    assert swap_at(m, "10") == parse_monomial("a((cb)d)")
    assert letter_indices("cab").tolist() == [2, 0, 1]
