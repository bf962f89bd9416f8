import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantordyn.errors import DepthExceeded, ModulusExhausted
from cantordyn.maps import (CodedMap, IterateTable, builtin_map, iterate,
                            iterate_map, normalize, random_normalized_map)
from cantordyn.words import (all_words, is_prefix, is_primitive,
                             length_lex_key, letters, periodic_word,
                             rotations, words_up_to)


def small_maps():
    return st.integers(min_value=0, max_value=2 ** 31 - 1).map(
        lambda seed: random_normalized_map(2, 6, random.Random(seed)))


binary_words6 = st.text(alphabet="01", max_size=6)


def test_words_helpers():
    assert list(all_words(2, 2)) == ["00", "01", "10", "11"]
    assert len(list(words_up_to(2, 3))) == 15
    assert sorted(["10", "0", "1", ""], key=length_lex_key) == ["", "0", "1", "10"]
    assert is_prefix("", "01") and is_prefix("01", "01") and not is_prefix("10", "1")
    assert rotations("011") == ["011", "110", "101"]
    assert is_primitive("01") and not is_primitive("0101") and not is_primitive("")
    assert periodic_word("01", 5) == "01010"
    with pytest.raises(ValueError):
        letters(4)


class TestBuiltinMaps:
    def test_left_shift(self):
        sh = builtin_map("left-shift", 2, 8)
        assert sh.apply("101") == "01"
        assert iterate(sh, "0110", 2) == "10"
        assert iterate(sh, "0110", 0) == "0110"
        assert iterate(sh, "0110", 5) == ""
        assert sh.check() == []

    def test_identity_is_normalized(self):
        idm = builtin_map("identity", 2, 8)
        assert idm.apply("101") == "10"
        assert idm.check() == []

    def test_column_shift(self):
        cs = builtin_map("column-shift", 2, 8, columns=2)
        # column 0 of "0110" is "01", column 1 is "10"; both shift by one
        out = cs.apply("0110")
        assert out == "10"
        assert out[0::2] == "0110"[0::2][1:]
        assert out[1::2] == "0110"[1::2][1:]
        assert cs.columns == 2
        assert cs.check() == []

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            builtin_map("rotate", 2, 8)
        with pytest.raises(ValueError):
            builtin_map("left-shift", 2, 0)

    def test_depth_guard(self):
        sh = builtin_map("left-shift", 2, 4)
        with pytest.raises(DepthExceeded):
            sh.apply("00000")


class TestNormalize:
    def test_longest_prefix_rule(self):
        # raw table with f("01") = "0110"
        tbl = {"": "", "0": "01", "1": "01", "00": "0110", "01": "0110",
               "10": "0110", "11": "0110"}
        m = CodedMap.from_table(2, 2, tbl)
        mh = normalize(m)
        assert mh.apply("01") == "0"
        assert mh.apply("0") == ""

    def test_identity_table_drops_last(self):
        m = CodedMap(2, 6, lambda w: w, {l: l for l in range(7)}, name="id")
        mh = normalize(m)
        for w in all_words(2, 4):
            assert mh.apply(w) == w[:-1]
        assert mh.check() == []

    def test_shift_unchanged(self):
        sh = builtin_map("left-shift", 2, 6)
        assert normalize(sh) is sh

    @given(small_maps(), binary_words6)
    @settings(max_examples=60, deadline=None)
    def test_same_limit(self, m, w):
        # the normalized image is always a prefix of the raw image
        mh = normalize(m)
        assert is_prefix(mh.apply(w), m.apply(w))


class TestIterateMap:
    def test_power_one_equals_base(self, random_map8):
        m1 = iterate_map(random_map8, 1)
        for w in words_up_to(2, 8):
            assert m1.apply(w) == random_map8.apply(w)

    def test_shift_cubed_drops_three(self):
        sh = builtin_map("left-shift", 2, 8)
        m3 = iterate_map(sh, 3)
        for w in all_words(2, 8):
            assert m3.apply(w) == w[3:]
        assert m3.check() == []

    def test_identity_squared_drops_two(self):
        idm = builtin_map("identity", 2, 8)
        m2 = iterate_map(idm, 2)
        for w in all_words(2, 6):
            assert m2.apply(w) == w[:-2]

    def test_modulus_composition(self):
        sh = builtin_map("left-shift", 2, 8)
        m3 = iterate_map(sh, 3)
        assert m3.modulus(2) == 5
        with pytest.raises(ModulusExhausted):
            m3.modulus(7)

    def test_zero_power(self, random_map8):
        m0 = iterate_map(random_map8, 0)
        assert m0.apply("0101") == "0101"


class TestIterateLaws:
    @given(small_maps(), binary_words6,
           st.integers(0, 6), st.integers(0, 6))
    @settings(max_examples=80, deadline=None)
    def test_coherence(self, m, w, a, b):
        assert iterate(m, w, a + b) == iterate(m, iterate(m, w, a), b)

    @given(small_maps())
    @settings(max_examples=30, deadline=None)
    def test_monotone(self, m):
        assert m.check() == []

    def test_iterate_table(self, random_map8):
        it = IterateTable(random_map8)
        for w in all_words(2, 8):
            assert it.get(w, 0) == w
            assert it.get(w, 3) == iterate(random_map8, w, 3)
        with pytest.raises(DepthExceeded):
            it.get("0", 9)


def test_random_maps_are_valid(rng):
    for _ in range(10):
        m = random_normalized_map(2, 6, rng)
        assert m.shrinking
        assert m.check() == []
