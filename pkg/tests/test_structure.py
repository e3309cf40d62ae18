import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as ref
from conftest import pow2_ones
from lcsflags.bitstring import BitString
from lcsflags.flags import ParamSet
from lcsflags.structure import (EXACT, FAST, StringType, classify, classify_report,
                                find_imbalanced_interval, red_cap_holds,
                                type_certificate)

TENTH = ParamSet(Fraction(1, 10))
# gamma close to eps^2 so the gamma*L cap admits b-values at desk scale
LOOSE = ParamSet(Fraction(1, 2), Fraction(1, 5), strict=False)


def reference_type(w: str, p: ParamSet):
    """Priority Imbalanced > Green(smallest l) > BlueYellow(smallest m)."""
    eps, gamma = p.epsilon, p.gamma
    L = w.count("1")
    n = L.bit_length() - 1
    if ref.first_imbalanced(w, max(1, math.ceil(eps**5 * L)), eps):
        return ("imbalanced", None)
    for ell in range(1, math.floor(eps**5 * L) + 1):
        if ref.count_colour(w, ell, "green", eps) >= eps**2 * L:
            return ("green", ell)
    b = ref.b_vector(w, eps)
    for m in range(1, n + 1):
        band = sum(1 for v in b if 2**m <= v <= gamma * L)
        if band < (eps**2 - gamma) * L:
            continue
        if 600 * eps < 1 and any(ref.count_colour(w, ell, "red", eps) > 600 * eps * L
                                 for ell in range(2**m, L + 1)):
            continue
        return ("blue-yellow", m)
    return None


def test_certificate_examples():
    cert = find_imbalanced_interval(BitString("1111"), 1, Fraction(1, 2))
    assert (cert.interval.x, cert.interval.y, cert.zeros, cert.side) == (1, 1, 0, "below")
    assert find_imbalanced_interval(BitString("101010"), 1, Fraction(1, 2)) is None
    assert ref.first_imbalanced("101010", 1, Fraction(1, 2)) is None
    assert find_imbalanced_interval(BitString("1001"), 3, Fraction(1, 2)) is None


def test_classify_examples():
    assert classify(BitString("1" + "0" * 2), TENTH) == StringType.imbalanced()
    # a perfectly alternating string has no imbalanced interval, no Green or Blue flags
    periodic = BitString("10" * 64)
    assert classify(periodic, TENTH) is None
    assert reference_type(periodic.bits, TENTH) is None
    rep = classify_report(periodic, TENTH).to_json()
    assert rep["label"] == "untyped"
    assert rep["checks"]["imbalanced"]["certificate"] is None
    with pytest.raises(ValueError):
        classify(BitString("111"), TENTH)


def test_certificate_rejections():
    assert not type_certificate(BitString("10" * 8), StringType.imbalanced(), TENTH)
    assert not type_certificate(BitString("1111"), StringType.green(1), TENTH)


def test_string_type_serialisation():
    for t in (StringType.imbalanced(), StringType.green(3), StringType.blue_yellow(2)):
        assert StringType.from_json(t.to_json()) == t
    assert str(StringType.green(3)) == "Green(3)"
    assert StringType.from_json(None) is None


def reference_blue_yellow(w: str, m: int, p: ParamSet) -> bool:
    eps, gamma = p.epsilon, p.gamma
    L = w.count("1")
    band = sum(1 for v in ref.b_vector(w, eps) if 2**m <= v <= gamma * L)
    if band < (eps**2 - gamma) * L:
        return False
    return all(ref.count_colour(w, ell, "red", eps) <= 600 * eps * L
               for ell in range(2**m, L + 1))


# 600 eps < 1 here, so the Red cap genuinely binds
TINY_LOOSE = ParamSet(Fraction(1, 1000), Fraction(1, 2 * 10**6), strict=False)


@given(pow2_ones(max_n=4, max_run=40), st.sampled_from([LOOSE, TINY_LOOSE]), st.integers(1, 4))
def test_blue_yellow_certificate_matches_reference(w, p, m):
    L = w.count("1")
    if 2**m > L:
        return
    got = type_certificate(BitString(w), StringType.blue_yellow(m), p)
    assert got == reference_blue_yellow(w, m, p)


@given(pow2_ones(max_n=4), st.sampled_from([TENTH, LOOSE, ParamSet(Fraction(1, 3))]))
def test_classify_matches_reference(w, p):
    got = classify(BitString(w), p)
    expect = reference_type(w, p)
    assert (None if got is None else (got.kind, got.param)) == expect


@given(pow2_ones(max_n=4), st.sampled_from([TENTH, LOOSE]))
def test_type_self_certifies(w, p):
    b = BitString(w)
    t = classify(b, p)
    if t is not None:
        assert type_certificate(b, t, p)
    if type_certificate(b, StringType.imbalanced(), p):
        assert t == StringType.imbalanced()
    assert classify(BitString(w), p) == t


@given(pow2_ones(max_n=4), st.sampled_from([TENTH, LOOSE]))
def test_fast_mode_agrees_when_red_cap_is_vacuous(w, p):
    # with 600 eps >= 1 the Red cap never binds, so both modes coincide
    assert classify(BitString(w), p, FAST) == classify(BitString(w), p, EXACT)


@given(pow2_ones(max_n=4, max_run=3), st.integers(0, 4))
def test_red_cap_matches_reference(w, m):
    L = w.count("1")
    if 2**m > L:
        return
    p = TINY_LOOSE
    cap = 600 * p.epsilon * L
    holds, worst, _ = red_cap_holds(BitString(w), m, p, EXACT)
    counts = [ref.count_colour(w, ell, "red", p.epsilon) for ell in range(2**m, L + 1)]
    assert holds == all(c <= cap for c in counts)
    if holds:
        assert worst == max(counts)
    # fast mode checks a subset of lengths, so it can only be more permissive
    assert red_cap_holds(BitString(w), m, p, FAST)[0] >= holds


def test_red_cap_example():
    # all ones: every flag has rate 0, so all L indices are Red at every length
    holds, worst, length = red_cap_holds(BitString("1" * 8), 0, TINY_LOOSE, EXACT)
    assert (holds, worst, length) == (False, 8, 1)
