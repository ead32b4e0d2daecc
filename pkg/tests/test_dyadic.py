import math

import pytest
from hypothesis import given, settings, strategies as st

from thompsonlab.dyadic import (
    F1, F2, IDENTITY, Dyadic, PLMap, Tuple_, Word, midpoint, standard_point,
)


def d(num, exp=0):
    return Dyadic(num, exp)


class TestDyadic:
    def test_canonical_form(self):
        x = Dyadic(4, 3)
        assert (x.num, x.exp) == (1, 1)
        assert (Dyadic(0, 5).num, Dyadic(0, 5).exp) == (0, 0)
        assert Dyadic(3, -2) == Dyadic(12)

    def test_order_matches_value(self):
        assert d(1, 1) < d(3, 2) < d(1) and d(-1, 2) < d(0)

    def test_arithmetic(self):
        assert d(1, 1) + d(1, 2) == d(3, 2)
        assert d(3, 2) - d(1, 1) == d(1, 2)
        assert d(3, 2) * d(1, 1) == d(3, 3)
        assert midpoint(d(1, 2), d(1, 1)) == d(3, 3)

    def test_render(self):
        assert str(d(11, 4)) == "11/2^4"

    @given(st.integers(-999, 999), st.integers(0, 40),
           st.integers(-999, 999), st.integers(0, 40))
    def test_sum_agrees_with_fractions(self, a, ea, b, eb):
        x, y = Dyadic(a, ea), Dyadic(b, eb)
        assert (x + y).as_fraction() == x.as_fraction() + y.as_fraction()
        assert (x * y).as_fraction() == x.as_fraction() * y.as_fraction()


class TestPLMap:
    def test_paper_evaluations(self):
        assert F1(d(7, 3)) == d(3, 2)          # f1(r_2) = r_1
        assert F2(d(1, 2)) == d(1, 2)          # identity below 1/2
        assert F2(d(13, 4)) == d(11, 4)

    def test_compose_and_inverse(self):
        assert F1 * F1.inverse() == IDENTITY
        assert (F2 * F1)(d(15, 4)) == d(3, 2)
        assert IDENTITY * F2 == F2
        assert F1.inverse() * F1 == IDENTITY
        assert PLMap(F2.breakpoints).inverse().inverse() == F2

    def test_inverse_evaluations(self):
        assert F1.inverse()(d(1, 2)) == d(1, 1)
        assert F1.inverse()(d(5, 3)) == d(13, 4)

    def test_monotone(self):
        pts = [d(i, 6) for i in range(65)]
        for m in (F1, F2, F1.inverse(), (F2 * F1.inverse())):
            img = [m(p) for p in pts]
            assert all(a < b for a, b in zip(img, img[1:]))

    def test_standard_points(self):
        assert standard_point(0) == d(1, 1)
        assert standard_point(2) == d(7, 3)
        assert standard_point(-2) == d(1, 2)

    def test_f1_shifts_standard_points(self):
        # the printed negative indexing duplicates 1/2 (r_0 == r_{-1}), so
        # the shift identity skips one index exactly at n = 0
        for n in range(-10, 11):
            if n == 0:
                assert F1(standard_point(0)) == standard_point(-2)
            else:
                assert F1(standard_point(n)) == standard_point(n - 1)


words = st.lists(
    st.tuples(st.sampled_from(["f1", "f2"]), st.integers(-2, 2)),
    max_size=6,
).map(Word)


class TestGroupLaws:
    @settings(max_examples=60, deadline=None)
    @given(words, words, words)
    def test_associativity(self, w1, w2, w3):
        a, b, c = w1.to_map(), w2.to_map(), w3.to_map()
        assert (a * b) * c == a * (b * c)

    @settings(max_examples=60, deadline=None)
    @given(words)
    def test_two_sided_inverse(self, w):
        m = w.to_map()
        assert m * m.inverse() == IDENTITY
        assert m.inverse() * m == IDENTITY

    @settings(max_examples=60, deadline=None)
    @given(words)
    def test_slopes_are_powers_of_two(self, w):
        for s in w.to_map().slopes():
            assert s > 0
            n, dn = s.numerator, s.denominator
            assert (n & (n - 1)) == 0 and (dn & (dn - 1)) == 0

    @settings(max_examples=40, deadline=None)
    @given(words, words)
    def test_action_homomorphism(self, w1, w2):
        xs = Tuple_([d(1, 2), d(1, 1), d(3, 2)])
        assert (w1 * w2).apply(xs) == w1.apply(w2.apply(xs))


class TestTuple:
    def test_validation(self):
        with pytest.raises(ValueError):
            Tuple_([d(3, 2), d(1, 1)])
        with pytest.raises(ValueError):
            Tuple_([d(0)])

    def test_mesh(self):
        assert Tuple_([d(1, 2), d(1, 1), d(3, 2)]).mesh() == d(1, 2)
        assert Tuple_([d(1, 1)]).mesh() == d(1, 1)
        assert Tuple_([d(1, 3), d(1, 1)]).mesh() == d(1, 1)

    def test_word_apply_examples(self):
        xs = Tuple_([d(1, 1), d(3, 2), d(7, 3), d(15, 4)])
        assert Word([]).apply(Tuple_([d(1, 1)])) == Tuple_([d(1, 1)])
        assert Word([("f2", 1)]).apply(xs) == \
            Tuple_([d(1, 1), d(5, 3), d(3, 2), d(7, 3)])
        w = Word([("f2", 1), ("f1", -1), ("f2", 1), ("f1", 1)])
        assert w.apply(xs) == Tuple_([d(1, 1), d(5, 3), d(11, 4), d(3, 2)])
