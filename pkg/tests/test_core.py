from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksep.core import (
    InputError,
    KSet,
    Params,
    binomial,
    count_k_separated,
    enumerate_k_separated,
    is_k_separated,
    parse_set,
    predicted_bound,
    rotate_set,
)

from conftest import brute_k_separated


class TestIsKSeparated:
    def test_examples(self):
        assert is_k_separated([1, 3], 4, 1)
        assert not is_k_separated([1, 9], 9, 2)
        assert is_k_separated([3], 5, 4)
        assert not is_k_separated([3], 4, 4)

    def test_empty_set(self):
        assert is_k_separated([], 5, 3)

    def test_k_zero_accepts_any_subset(self):
        assert is_k_separated([1, 2, 3, 4], 4, 0)

    @pytest.mark.parametrize("elems", [[3, 1], [1, 1], [0, 2], [2, 6]])
    def test_malformed(self, elems):
        with pytest.raises(InputError):
            is_k_separated(elems, 5, 1)

    def test_bad_parameters(self):
        with pytest.raises(InputError):
            is_k_separated([1], 0, 1)
        with pytest.raises(InputError):
            is_k_separated([1], 5, -1)


class TestParams:
    @pytest.mark.parametrize("args", [(0, 1, 1), (65, 1, 1), (5, -1, 1), (5, 1, -1), (5.0, 1, 1), (True, 1, 1)])
    def test_rejects(self, args):
        with pytest.raises(InputError):
            Params(*args)

    def test_nonempty(self):
        assert Params(6, 2, 2).nonempty
        assert not Params(5, 1, 3).nonempty


class TestEnumerate:
    def test_examples(self):
        assert [s.elems for s in enumerate_k_separated(Params(4, 1, 2))] == [(1, 3), (2, 4)]
        assert [s.elems for s in enumerate_k_separated(Params(6, 2, 2))] == [(1, 4), (2, 5), (3, 6)]
        # 7-cycle: 21 pairs minus 7 adjacent pairs
        assert len(enumerate_k_separated(Params(7, 1, 2))) == 14

    @pytest.mark.parametrize("n", range(1, 13))
    @pytest.mark.parametrize("k", range(0, 4))
    @pytest.mark.parametrize("r", range(0, 5))
    def test_matches_brute_force(self, n, k, r):
        got = [s.elems for s in enumerate_k_separated(Params(n, k, r))]
        assert got == brute_k_separated(n, k, r)

    def test_empty_exactly_below_threshold(self):
        for n in range(1, 21):
            for k in range(5):
                for r in range(1, 6):
                    sets = enumerate_k_separated(Params(n, k, r))
                    assert (len(sets) == 0) == (n < (k + 1) * r)

    def test_sets_are_valid_and_strictly_ordered(self):
        sets = enumerate_k_separated(Params(15, 2, 4))
        assert all(s.is_valid() and is_k_separated(s.elems, 15, 2) for s in sets)
        assert all(a.elems < b.elems for a, b in zip(sets, sets[1:]))


class TestCount:
    def test_examples(self):
        assert count_k_separated(Params(7, 1, 2)) == 14
        # 9/5 * C(5, 2)
        assert count_k_separated(Params(9, 2, 2)) == 18 == len(brute_k_separated(9, 2, 2))
        assert count_k_separated(Params(5, 1, 3)) == 0

    def test_equals_enumeration_on_grid(self):
        for n in range(1, 21):
            for k in range(5):
                for r in range(1, 6):
                    p = Params(n, k, r)
                    assert count_k_separated(p) == len(enumerate_k_separated(p)), p


class TestBinomial:
    def test_examples(self):
        assert binomial(4, 1) == 4
        assert binomial(1, 1) == 1
        # (n, k, r) = (10, 1, 3): C(n-kr-2, r-2) + C(n-kr-2, r-1) = C(n-kr-1, r-1)
        assert binomial(5, 1) + binomial(5, 2) == 5 + 10 == binomial(6, 2)
        assert binomial(10 - 3 - 2, 3 - 2) + binomial(10 - 3 - 2, 3 - 1) == binomial(10 - 3 - 1, 3 - 1)

    def test_zero_outside_range(self):
        assert binomial(3, 4) == 0
        assert binomial(3, -1) == 0
        assert binomial(-2, 2) == 0

    def test_arbitrary_precision(self):
        assert binomial(200, 100) == comb(200, 100)

    @given(st.integers(1, 64), st.data())
    def test_pascal(self, a, data):
        b = data.draw(st.integers(0, a))
        assert binomial(a - 1, b - 1) + binomial(a - 1, b) == binomial(a, b)

    def test_pascal_exhaustive(self):
        for a in range(1, 65):
            for b in range(0, a + 1):
                assert binomial(a - 1, b - 1) + binomial(a - 1, b) == binomial(a, b)


class TestPredictedBound:
    def test_values(self):
        assert predicted_bound(Params(7, 1, 2)) == 4
        assert predicted_bound(Params(6, 2, 2)) == 1
        assert predicted_bound(Params(12, 1, 3)) == 28
        assert predicted_bound(Params(5, 1, 3)) == 0
        assert predicted_bound(Params(10, 0, 3)) == comb(9, 2)
        # below 2r every two r-sets meet
        assert predicted_bound(Params(5, 0, 3)) == comb(5, 3)


class TestKSet:
    def test_from_elems_validates(self):
        p = Params(7, 1, 2)
        assert KSet.from_elems([1, 3], p).mask == 0b101
        with pytest.raises(InputError):
            KSet.from_elems([1, 2], p)
        with pytest.raises(InputError):
            KSet.from_elems([1, 3, 5], p)
        with pytest.raises(InputError):
            KSet.from_elems([1, 7], p)

    def test_text_form(self):
        p = Params(9, 2, 3)
        s = parse_set("1 4 7", p)
        assert str(s) == "1 4 7"
        assert 4 in s and 5 not in s
        with pytest.raises(InputError):
            parse_set("1 x", p)


class TestRotate:
    def test_examples(self):
        p = Params(6, 2, 2)
        s = KSet.from_elems([1, 4], p)
        assert rotate_set(s, 1).elems == (2, 5)
        assert rotate_set(KSet.from_elems([2, 5], p), -1).elems == (1, 4)
        assert rotate_set(s, 6) == s

    @settings(max_examples=200)
    @given(st.integers(3, 20), st.integers(0, 4), st.integers(1, 5), st.integers(-50, 50), st.data())
    def test_inverse_and_preserves_separation(self, n, k, r, d, data):
        p = Params(n, k, r)
        sets = enumerate_k_separated(p)
        if not sets:
            return
        s = data.draw(st.sampled_from(sets))
        t = rotate_set(s, d)
        assert rotate_set(t, -d) == s
        assert is_k_separated(t.elems, n, k)
        assert t.elems == tuple(sorted((a - 1 + d) % n + 1 for a in s.elems))
