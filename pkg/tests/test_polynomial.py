from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from qjordan.free_magma import parse_monomial
from qjordan.polynomial import CommPolynomial, RcPolynomial

MONOS = ["(ab)c", "(ba)c", "a(bc)", "a(cb)", "(ac)b", "c(ab)", "b(ac)"]

polys = st.lists(st.tuples(st.integers(-5, 5), st.sampled_from(MONOS)), max_size=8).map(
    lambda ts: RcPolynomial((c, parse_monomial(m)) for c, m in ts)
)


def test_straightening_collects_terms():
    p = RcPolynomial([(1, parse_monomial("a(bc)")), (2, parse_monomial("a(cb)"))])
    assert dict(p) == {parse_monomial("a(bc)"): 3}
    q = CommPolynomial([(1, parse_monomial("(ab)c")), (-1, parse_monomial("c(ba)"))])
    assert not q


@settings(max_examples=200, deadline=None)
@given(polys, polys, polys)
def test_module_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert p - p == 0
    assert -(-p) == p
    assert 3 * (p + q) == 3 * p + 3 * q


@settings(max_examples=200, deadline=None)
@given(polys, st.integers(-6, 6).filter(bool))
def test_normalization_and_ratio(p, k):
    if not p:
        return
    n = p.normalized()
    assert n.content_gcd() == 1
    assert n.sorted_terms()[0][0] > 0
    assert (k * p).normalized() == n
    assert (k * p).ratio_to(p) == Fraction(k)


@settings(max_examples=100, deadline=None)
@given(polys)
def test_mod_uses_symmetric_representatives(p):
    q = (7 * p + p).mod(5)
    assert all(-2 <= c <= 2 and c for c in q.values())


def test_lines_sorted_by_type_then_word():
    p = RcPolynomial([(1, parse_monomial("a(bc)")), (-1, parse_monomial("(ba)c")), (2, parse_monomial("(ab)c"))])
    assert p.to_lines() == ["2 (ab)c", "-1 (ba)c", "1 a(bc)"]
    assert p.degree == 3 and p.is_multilinear()
