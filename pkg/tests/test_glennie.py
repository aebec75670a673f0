from collections import Counter
from importlib.resources import files

import pytest

from qjordan.dialgebra import LEFT, RIGHT, parse_diterm
from qjordan.expansion import expand_poly
from qjordan.free_magma import leaves, parse_monomial
from qjordan.glennie import (
    glennie_G,
    glennie_preimage,
    jordan_triple,
    mark_center,
    opposite_rewrite,
    partial_linearize,
    verify_preimage,
)
from qjordan.identity_engine import load_identity
from qjordan.polynomial import CommPolynomial


def naive_canon(m):
    """Commutative normal form by sorting children on their printed form."""
    if isinstance(m, str):
        return m
    a, b = naive_canon(m[0]), naive_canon(m[1])
    return (a, b) if (len(str(a)), str(a)) <= (len(str(b)), str(b)) else (b, a)


def naive_mul(x: Counter, y: Counter) -> Counter:
    out = Counter()
    for m, c in x.items():
        for n, e in y.items():
            out[naive_canon((m, n))] += c * e
    return out


def naive_triple(x, y, z):
    t = naive_mul(naive_mul(x, y), z)
    t.update(naive_mul(naive_mul(z, y), x))
    t.subtract(naive_mul(naive_mul(x, z), y))
    return t


def naive_G() -> Counter:
    a, b, c = Counter({"a": 1}), Counter({"b": 1}), Counter({"c": 1})
    ab = naive_mul(a, b)
    T = naive_triple
    total = Counter()
    for k, term in [
        (2, T(T(b, T(a, c, a), b), c, ab)),
        (-1, T(b, T(a, T(c, ab, c), a), b)),
        (-2, T(ab, c, T(a, T(b, c, b), a))),
        (1, T(a, T(b, T(c, ab, c), b), a)),
    ]:
        for m, v in term.items():
            total[m] += k * v
    return Counter({m: v for m, v in total.items() if v})


def test_glennie_matches_naive_evaluation():
    g = glennie_G()
    naive = naive_G()
    assert {naive_canon(m): c for m, c in g.items()} == dict(naive)
    assert all(sorted(leaves(m)) == sorted("aaabbbcc") for m in g)


def test_jordan_triple_definition():
    t = jordan_triple("x", "y", "z")
    assert dict(t) == dict(CommPolynomial([(1, parse_monomial("(xy)z")), (1, parse_monomial("(zy)x")), (-1, parse_monomial("(xz)y"))]))
    assert jordan_triple("x", "y", "z") == jordan_triple("z", "y", "x")


def test_partial_linearization_counts():
    g = glennie_G()
    for x, k in [("a", 3), ("b", 3), ("c", 2)]:
        h = partial_linearize(g, x)
        assert all(leaves(m).count("d") == 1 for m in h)
        # putting x back multiplies G by its degree in x
        back = CommPolynomial((c, _rename(m, "d", x)) for m, c in h.items())
        assert back == k * g
    with pytest.raises(ValueError):
        partial_linearize(partial_linearize(g, "a"), "b")


def _rename(m, old, new):
    if isinstance(m, str):
        return new if m == old else m
    return (_rename(m[0], old, new), _rename(m[1], old, new))


def test_mark_center_examples():
    assert mark_center(parse_monomial("(ad)b")) == parse_diterm("((a|-d)-|b)")
    assert mark_center(parse_monomial("a((bd)c)")) == parse_diterm("(a|-((b|-d)-|c))")
    with pytest.raises(ValueError):
        mark_center(parse_monomial("ab"))


def test_opposite_rewrite_example():
    assert opposite_rewrite(parse_diterm("(a|-((b|-d)-|c))")) == parse_monomial("((db)c)a")
    assert opposite_rewrite(parse_diterm(f"(a{LEFT}b)")) == ("a", "b")
    assert opposite_rewrite(parse_diterm(f"(a{RIGHT}b)")) == ("b", "a")


@pytest.mark.parametrize("x, terms", [("a", 100), ("b", 100), ("c", 72)])
def test_preimage_term_counts_and_expansion(x, terms):
    k = glennie_preimage(x)
    assert len(k) == terms
    assert verify_preimage(k)
    assert not expand_poly(k)
    # the commutative collapse is a nonzero multiple of G
    collapse = CommPolynomial((c, m) for m, c in k.items())
    assert collapse.ratio_to(glennie_G()) is not None


def test_preimage_c_matches_fixture():
    fixture = load_identity(files("qjordan") / "data" / "glennie_preimage_c.txt")
    assert len(fixture) == 72
    assert glennie_preimage("c").ratio_to(fixture) is not None


def test_invalid_variable():
    with pytest.raises(ValueError):
        glennie_preimage("e")
