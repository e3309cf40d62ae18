from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as ref
from conftest import bits, bits_one, pow2_ones
from lcsflags.bitstring import BitString, drop, rev
from lcsflags.flags import ParamSet
from lcsflags.matching import (BlockMatchingError, Matching, blue_yellow_balanced,
                               blue_yellow_match, block_drop_range, green_best_shift,
                               green_match, identity_match, imbalanced_match, naive_match,
                               stitch, stitch_size, strategy_lcs_bound, validate)
from lcsflags.oracle import lcs_exact
from lcsflags.statistics import unrev_matching

TENTH = ParamSet(Fraction(1, 10))
W = BitString("1001011")


def sound(m: Matching, s: BitString, t: BitString) -> None:
    assert validate(m, s, t)
    assert ref.valid(m.pairs, s.bits, t.bits)
    assert m.size <= ref.lcs(s.bits, t.bits)


# -- validate / naive / imbalanced ----------------------------------------

def test_validate_examples():
    assert validate(Matching(), W, W)
    assert validate(identity_match(W), W, W)
    assert not validate(Matching.from_pairs([(1, 2)]), W, W)
    assert not validate(Matching.from_pairs([(2, 2), (1, 3)]), W, W)
    assert not validate(Matching.from_pairs([(8, 8)]), W, W)


def test_matching_json_round_trip():
    m = naive_match(W, W, 1)
    assert Matching.from_json(m.to_json()) == m


@pytest.mark.parametrize("delta, size", [(0, 4), (1, 3), (-1, 3), (4, 0)])
def test_naive_examples(delta, size):
    m = naive_match(W, W, delta)
    assert m.size == size
    sound(m, W, W)


def test_naive_single_one():
    assert naive_match(BitString("10"), BitString("01"), 0).pairs == [(1, 2)]


def test_imbalanced_examples():
    m = imbalanced_match(BitString("111100"), BitString("111100"))
    assert m.size == 4 and all(a in (1, 2, 3, 4) for a in m.a)
    m = imbalanced_match(BitString("100000"), BitString("100000"))
    assert m.size == 5 and all(a > 1 for a in m.a)
    s, t = BitString("110100"), BitString("101100")
    m = imbalanced_match(s, t)
    assert m.size == 3
    sound(m, s, t)


@given(bits(max_size=14), bits(max_size=14), st.data())
def test_naive_size_and_soundness(s, t, data):
    s, t = BitString(s), BitString(t)
    L = min(s.n_ones, t.n_ones)
    d = data.draw(st.integers(-L, L))
    m = naive_match(s, t, d)
    # i-th one of s against the (i+d)-th one of t, whenever both exist
    overlap = max(0, min(s.n_ones, t.n_ones - d) - max(1, 1 - d) + 1)
    assert m.size == overlap
    if s.n_ones == t.n_ones:
        assert m.size == L - abs(d)
    sound(m, s, t)


@given(st.integers(1, 7), st.data())
def test_imbalanced_match_floor(ones, data):
    n = data.draw(st.integers(ones, 14))
    perm = st.permutations(list("1" * ones + "0" * (n - ones)))
    s, t = BitString("".join(data.draw(perm))), BitString("".join(data.draw(perm)))
    m = imbalanced_match(s, t)
    sound(m, s, t)
    assert m.size == max(ones, n - ones)
    assert 2 * m.size >= n


# -- stitch ----------------------------------------------------------------

def test_stitch_empty_block_set_is_naive():
    s = BitString("10110" * 4)
    s = BitString(s.bits[: s.ones[7]])
    t = BitString("1" * 8)
    assert stitch(s, t, 1, 1, [], {}) == naive_match(s, t, 1)


def test_stitch_zero_gain_block():
    s = t = BitString("1001" * 4)
    ones = naive_match(BitString("1001"), BitString("1001"), 0)
    m = stitch(s, t, 1, 0, [2], {2: ones})
    assert m.size == naive_match(s, t, 0).size


def test_stitch_planted_two_blocks():
    # blocks 2 and 3 (scale 2) carry planted zeros, identical in s and t
    s = t = BitString("1111" + "1000100010001" + "1010" + "10" * 2 + "1111")
    assert s.n_ones == 16
    Z = [2, 3]
    mats = {}
    for i in Z:
        lo, hi = block_drop_range(s, 2, i, 0)
        mats[i] = identity_match(BitString(s.bits[lo:hi]))
    m = stitch(s, t, 2, 0, Z, mats)
    sound(m, s, t)
    gains = [mats[i].size - 4 for i in Z]
    assert gains == [9, 4]
    assert m.size == 16 + sum(gains) == stitch_size(16, 2, 0, [mats[i].size for i in Z])


def test_stitch_errors():
    s = t = BitString("10" * 8)
    with pytest.raises(BlockMatchingError) as exc:
        stitch(s, t, 1, 0, [3], {3: Matching.from_pairs([(1, 2)])})
    assert exc.value.block == 3
    with pytest.raises(BlockMatchingError):
        stitch(s, t, 1, 0, [9], {9: Matching()})
    with pytest.raises(ValueError):
        stitch(s, t, 1, 3, [], {})
    with pytest.raises(ValueError):
        stitch(s, t, 1, 0, [1, 1], [Matching(), Matching()])


@given(pow2_ones(max_n=3, max_run=3), pow2_ones(max_n=3, max_run=3), st.data())
def test_stitch_size_identity(s, t, data):
    s, t = BitString(s), BitString(t)
    if s.n_ones != t.n_ones:
        return
    n = s.n_ones.bit_length() - 1
    m = data.draw(st.integers(0, n))
    d = data.draw(st.integers(-(2**m), 2**m))
    Z = data.draw(st.sets(st.integers(1, 2 ** (n - m))))
    mats, sizes = {}, []
    for i in Z:
        sr, tr = block_drop_range(s, m, i, d), block_drop_range(t, m, i, -d)
        if sr is None:
            mats[i] = Matching()
            sizes.append(0)
            continue
        w = lcs_exact(s.bits[sr[0]:sr[1]], t.bits[tr[0]:tr[1]]).witness
        mats[i] = w
        sizes.append(w.size)
    out = stitch(s, t, m, d, Z, mats)
    sound(out, s, t)
    assert out.size == stitch_size(s.n_ones, m, d, sizes)


# -- Green -----------------------------------------------------------------

def test_green_match_example():
    s = BitString("100100100100")
    m = green_match(s, s, 2, 0, TENTH)
    assert m.size == 7
    assert m.meta["flags"] == [1]
    sound(m, s, s)


def test_green_match_all_ones_is_naive():
    s = BitString("1" * 16)
    for ell in (1, 2, 5):
        assert green_match(s, s, ell, 0, TENTH) == naive_match(s, s, 0)


GREEN_UNIT = "10" * 4 + "1000" * 4
GREEN_S = BitString(GREEN_UNIT * 8)
GREEN_T = BitString("1010" + (GREEN_UNIT * 8)[:-11])


def test_green_best_shift_planted():
    assert GREEN_S.n_ones == GREEN_T.n_ones == 64
    out = green_best_shift(GREEN_S, GREEN_T, 2, TENTH)
    assert (out.delta, out.matching.size, out.gain) == (2, 148, 86)
    assert out.matching.size > naive_match(GREEN_S, GREEN_T, 0).size
    sound(out.matching, GREEN_S, GREEN_T)
    sweep = {d: green_match(GREEN_S, GREEN_T, 2, d, TENTH).size for d in range(-64, 65)}
    assert max(sweep.values()) == 148
    assert [d for d, v in sweep.items() if v == 148] == [2]


def test_green_best_shift_tie_break_and_all_ones():
    out = green_best_shift(GREEN_S, GREEN_S, 2, TENTH)
    assert out.delta == 0
    ones = BitString("1" * 32)
    out = green_best_shift(ones, ones, 3, TENTH)
    assert (out.delta, out.gain) == (0, 0)


@given(pow2_ones(max_n=3, max_run=5), pow2_ones(max_n=3, max_run=5), st.integers(1, 4),
       st.data())
def test_green_match_sound(s, t, ell, data):
    s, t = BitString(s), BitString(t)
    if s.n_ones != t.n_ones:
        return
    d = data.draw(st.integers(-s.n_ones, s.n_ones))
    m = green_match(s, t, ell, d, TENTH)
    sound(m, s, t)
    assert m.size >= s.n_ones - abs(d)
    out = green_best_shift(s, t, ell, TENTH)
    assert out.gain == out.matching.size - (s.n_ones - abs(out.delta))


# -- Blue-Yellow -----------------------------------------------------------

def test_blue_yellow_all_ones():
    s = BitString("1" * 64)
    m = blue_yellow_match(s, s, 3, TENTH)
    assert m.meta["flags"] == []
    # the whole s-window [1, x] fits inside t's window [1 + delta, y]
    assert m.size == m.meta["x"] == 32 and s.array[m.a - 1].all()
    sound(m, s, s)


def test_blue_yellow_planted():
    s = BitString("1" + "0" * 200 + "10" * 255)
    t = BitString("10" * 256)
    m = blue_yellow_match(s, t, 0, TENTH, b_cap=16)
    assert m.meta["flags"] == [{"i": 1, "j": 1, "ls": 16, "lt": 90, "yellow": True}]
    assert m.size == 136
    # one replacement: the head one plus the 90 zeros of t's window
    assert (m.meta["x"], m.meta["y"]) == (128, 135)
    assert int((s.array[m.a - 1] == 0).sum()) == 90
    sound(m, s, t)


def test_blue_yellow_delta_domain():
    s = BitString("1" * 64)
    with pytest.raises(ValueError):
        blue_yellow_match(s, s, 17, TENTH)
    with pytest.raises(ValueError):
        blue_yellow_match(s, BitString("1" * 32), 0, TENTH)


def test_balanced_all_ones():
    s = BitString("1" * 64)
    for d in range(0, 9):
        m = blue_yellow_balanced(s, s, d, TENTH)
        assert m.size == 64 - d


BAL_S = BitString("1" + "0" * 200 + "10" * 127 + "10" * 128)
BAL_T = BitString("10" * 128 + "10" * 127 + "1" + "0" * 200)


def test_balanced_planted():
    m = blue_yellow_balanced(BAL_S, BAL_T, 0, TENTH, b_cap=16)
    assert m.size == 324
    assert m.meta["middle"] == 189
    assert m.size > naive_match(BAL_S, BAL_T, 0).size == 256
    assert validate(m, BAL_S, BAL_T)
    assert m.size <= lcs_exact(BAL_S, BAL_T).length


def test_balanced_preconditions():
    with pytest.raises(ValueError):
        blue_yellow_balanced(BitString("1" * 16), BitString("1" * 8), 0, TENTH)
    with pytest.raises(ValueError):
        blue_yellow_balanced(BitString("01" * 8), BitString("1" * 8), 0, TENTH)
    with pytest.raises(ValueError):
        blue_yellow_balanced(BitString("1" * 16), BitString("1" * 16), 3, TENTH)


@st.composite
def halves(draw, L):
    runs = st.lists(st.sampled_from([0, 0, 1, 1, 2, 30]), min_size=L, max_size=L)
    return "".join("1" + "0" * r for r in draw(runs))


@given(st.sampled_from([4, 8, 16]).flatmap(
    lambda L: st.tuples(st.just(L), halves(L), halves(L), halves(L), halves(L))),
    st.sampled_from([None, 2, 4]), st.data())
def test_balanced_lies_in_drop_windows(args, b_cap, data):
    L, s1, s2, t1, t2 = args
    s, t = BitString(s1 + s2), BitString(t1 + t2)
    d = data.draw(st.integers(0, L // 4))
    m = blue_yellow_balanced(s, t, d, TENTH, b_cap=b_cap)
    sound(m, s, t)
    ds, dt = drop(s, d), drop(t, -d)
    assert all(a <= len(ds) for a in m.a.tolist())
    assert all(b > len(t) - len(dt) for b in m.b.tolist())
    assert m.size <= ref.lcs(ds.bits, dt.bits)


@given(bits_one(12), bits_one(12))
def test_rev_transport(s, t):
    s, t = BitString(s), BitString(t)
    w = lcs_exact(rev(s), rev(t)).witness
    back = unrev_matching(w, s, t)
    assert validate(back, s, t)
    assert back.size == w.size == ref.lcs(s.bits, t.bits)


# -- strategy combiner -----------------------------------------------------

def test_strategy_identical_strings():
    s = BitString(GREEN_UNIT * 4)
    for kind, kw in (("imbalanced", {}), ("green", {"ell": 2})):
        r = strategy_lcs_bound(kind, s, s, TENTH, m=3, **kw)
        assert r.size == len(s)
        assert r.delta == 0


def test_strategy_green_planted():
    r = strategy_lcs_bound("green", GREEN_S, GREEN_T, TENTH, m=4, ell=2)
    assert (r.size, r.delta) == (123, 1)
    assert r.block_gains == {1: 15, 2: 15, 3: 15, 4: 15}
    assert r.size > r.baseline == 64
    sound(r.matching, GREEN_S, GREEN_T)


def test_strategy_blue_yellow_planted():
    sb = "1" + "0" * 40 + "10" * 31 + "10" * 32
    tb = "10" * 32 + "10" * 31 + "1" + "0" * 40
    s, t = BitString(sb * 4), BitString(tb * 4)
    r = strategy_lcs_bound("blue-yellow", s, t, TENTH, m=6, b_cap=4)
    assert (r.size, r.delta) == (324, 0)
    assert r.block_gains == {1: 17, 2: 17, 3: 17, 4: 17}
    assert r.size > r.baseline == 256
    assert r.checks["block_fraction_ok"]
    sound(r.matching, s, t)


def test_strategy_argument_errors():
    s = BitString("1" * 16)
    with pytest.raises(ValueError):
        strategy_lcs_bound("green", s, s, TENTH, m=2)
    with pytest.raises(ValueError):
        strategy_lcs_bound("blue-yellow", s, s, TENTH, m=0)
    with pytest.raises(ValueError):
        strategy_lcs_bound("bogus", s, s, TENTH, m=1)


@given(pow2_ones(max_n=3, max_run=4), pow2_ones(max_n=3, max_run=4),
       st.sampled_from(["imbalanced", "green"]), st.data())
def test_strategies_sound(s, t, kind, data):
    s, t = BitString(s), BitString(t)
    if s.n_ones != t.n_ones:
        return
    n = s.n_ones.bit_length() - 1
    m = data.draw(st.integers(0, n))
    r = strategy_lcs_bound(kind, s, t, TENTH, m=m, ell=2)
    sound(r.matching, s, t)
    assert r.size == s.n_ones - abs(r.delta) + sum(r.block_gains.values())
