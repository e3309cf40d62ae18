"""String types: Imbalanced, l-Green and m-Blue-Yellow.

``classify`` applies the fixed priority Imbalanced > Green (smallest l) >
Blue-Yellow (smallest m) so that equal strings always get equal types.
It may return ``None``: at small L none of the conditions need hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitstring import BitString, OnesInterval
from .flags import FlagColor, ParamSet, b_values, color_mask

EXACT = "exact"
FAST = "fast"


@dataclass(frozen=True, order=True)
class StringType:
    kind: str  # "imbalanced" | "green" | "blue-yellow"
    param: int | None = None

    @classmethod
    def imbalanced(cls) -> "StringType":
        return cls("imbalanced")

    @classmethod
    def green(cls, length: int) -> "StringType":
        return cls("green", length)

    @classmethod
    def blue_yellow(cls, m: int) -> "StringType":
        return cls("blue-yellow", m)

    def __str__(self) -> str:
        if self.kind == "imbalanced":
            return "Imbalanced"
        if self.kind == "green":
            return f"Green({self.param})"
        return f"BlueYellow({self.param})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "param": self.param}

    @classmethod
    def from_json(cls, obj) -> "StringType | None":
        if obj is None:
            return None
        return cls(obj["kind"], obj["param"])


@dataclass(frozen=True)
class ImbalanceCertificate:
    interval: OnesInterval
    zeros: int
    side: str  # "below" or "above" the (1 +- delta)|I| window

    def to_json(self) -> dict:
        return {"x": self.interval.x, "y": self.interval.y,
                "zeros": self.zeros, "side": self.side}


def imbalance_side(zeros: int, ones: int, delta) -> str | None:
    """'below' / 'above' if ``zeros`` falls outside ``[(1-d)ones, (1+d)ones]``."""
    d = Fraction(delta)
    if zeros * d.denominator < (d.denominator - d.numerator) * ones:
        return "below"
    if zeros * d.denominator > (d.denominator + d.numerator) * ones:
        return "above"
    return None


def _imbalance_masks(z: np.ndarray, k: np.ndarray, delta: Fraction):
    num, den = delta.numerator, delta.denominator
    big = max(int(z.max(initial=0)), int(k.max(initial=0)) + 1) * (den + num)
    if big < 2**62:
        return z * den < (den - num) * k, z * den > (den + num) * k
    zo, ko = z.astype(object), k.astype(object)
    return (np.asarray(zo * den < (den - num) * ko, dtype=bool),
            np.asarray(zo * den > (den + num) * ko, dtype=bool))


def imbalanced_rows(w: BitString, x: int, min_size: int, delta: Fraction):
    """For fixed start ``x``: candidate ends ``y`` and their below/above masks."""
    L = w.n_ones
    c = w.zeros_before_one
    y = np.arange(x + min_size - 1, L + 1)
    z = c[y + 1] - c[x]
    k = y - x + 1
    below, above = _imbalance_masks(z, k, delta)
    return y, z, below, above


def find_imbalanced_interval(w: BitString, min_size, delta) -> ImbalanceCertificate | None:
    """Lexicographically smallest ``[x, y]`` with ``|I| >= min_size`` and
    ``w_I`` delta-imbalanced, or None."""
    min_size = max(1, math.ceil(Fraction(min_size)))
    delta = Fraction(delta)
    L = w.n_ones
    for x in range(1, L - min_size + 2):
        y, z, below, above = imbalanced_rows(w, x, min_size, delta)
        hit = below | above
        if hit.any():
            j = int(np.argmax(hit))
            side = "below" if below[j] else "above"
            return ImbalanceCertificate(OnesInterval(x, int(y[j])), int(z[j]), side)
    return None


def _check_power_of_two(w: BitString) -> int:
    L = w.n_ones
    if L < 1 or L & (L - 1):
        raise ValueError(f"ones-count {L} is not a power of two")
    if not w.starts_with_one():
        raise ValueError("types are defined for strings starting with a one")
    return L.bit_length() - 1


def _at_least(count: int, frac: Fraction, L: int) -> bool:
    return count * frac.denominator >= frac.numerator * L


def _at_most(count: int, frac: Fraction, L: int) -> bool:
    return count * frac.denominator <= frac.numerator * L


def green_count_needed(p: ParamSet, L: int) -> int:
    frac = p.green_count_fraction
    return math.ceil(frac * L)


def max_green_length(p: ParamSet, L: int) -> int:
    return math.floor(p.imbalance_size_fraction * L)


def imbalance_min_size(p: ParamSet, L: int) -> int:
    return max(1, math.ceil(p.imbalance_size_fraction * L))


def red_lengths(m: int, L: int, mode: str):
    if mode == EXACT:
        return range(2**m, L + 1)
    out, length = [], 2**m
    while length <= L:
        out.append(length)
        length *= 2
    return out


def red_cap_holds(w: BitString, m: int, p: ParamSet, mode: str) -> tuple[bool, int, int]:
    """(holds, worst Red count, length attaining it) over l in [2^m, L]."""
    L = w.n_ones
    if p.red_cap_fraction >= 1:
        # cap >= L: no count of L indices can exceed it
        return True, -1, -1
    worst, worst_len = -1, -1
    for length in red_lengths(m, L, mode):
        cnt = int(color_mask(w, length, FlagColor.RED, p).sum())
        if cnt > worst:
            worst, worst_len = cnt, length
        if not _at_most(cnt, p.red_cap_fraction, L):
            return False, worst, worst_len
    return True, worst, worst_len


def blue_band_count(w: BitString, m: int, p: ParamSet) -> int:
    """Indices with ``2^m <= b_w(i) <= gamma L``."""
    L = w.n_ones
    b = b_values(w, p)
    g = p.gamma
    cap = (g.numerator * L) // g.denominator
    return int(((b >= 2**m) & (b <= cap)).sum())


@dataclass
class ClassifyReport:
    type: StringType | None
    mode: str
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "type": None if self.type is None else self.type.to_json(),
            "label": "untyped" if self.type is None else str(self.type),
            "mode": self.mode,
            "checks": self.checks,
        }


def classify_report(w: BitString, p: ParamSet, mode: str = EXACT) -> ClassifyReport:
    n = _check_power_of_two(w)
    L = 2**n
    checks: dict = {}

    min_size = imbalance_min_size(p, L)
    cert = find_imbalanced_interval(w, min_size, p.epsilon)
    checks["imbalanced"] = {"min_size": min_size,
                            "certificate": None if cert is None else cert.to_json()}
    if cert is not None:
        return ClassifyReport(StringType.imbalanced(), mode, checks)

    need = green_count_needed(p, L)
    max_len = max_green_length(p, L)
    best = (0, None)
    for length in range(1, max_len + 1):
        cnt = int(color_mask(w, length, FlagColor.GREEN, p).sum())
        if cnt >= need:
            checks["green"] = {"needed": need, "max_length": max_len,
                               "length": length, "count": cnt}
            return ClassifyReport(StringType.green(length), mode, checks)
        best = max(best, (cnt, length))
    checks["green"] = {"needed": need, "max_length": max_len,
                       "best_count": best[0], "best_length": best[1]}

    by = []
    for m in range(1, n + 1):
        cnt = blue_band_count(w, m, p)
        entry = {"m": m, "band_count": cnt}
        if _at_least(cnt, p.blue_yellow_fraction, L):
            holds, worst, worst_len = red_cap_holds(w, m, p, mode)
            entry.update(red_ok=holds, worst_red=worst, worst_red_length=worst_len)
            if holds:
                by.append(entry)
                checks["blue_yellow"] = {"needed_fraction": str(p.blue_yellow_fraction),
                                         "scales": by}
                return ClassifyReport(StringType.blue_yellow(m), mode, checks)
        by.append(entry)
    checks["blue_yellow"] = {"needed_fraction": str(p.blue_yellow_fraction), "scales": by}
    return ClassifyReport(None, mode, checks)


def classify(w: BitString, p: ParamSet, mode: str = EXACT) -> StringType | None:
    return classify_report(w, p, mode).type


def type_certificate(w: BitString, t: StringType, p: ParamSet, mode: str = EXACT) -> bool:
    """Does ``w`` satisfy the defining condition of ``t`` (priority ignored)?"""
    L = w.n_ones
    if L < 1 or L & (L - 1):
        return False
    n = L.bit_length() - 1
    if t.kind == "imbalanced":
        return find_imbalanced_interval(w, imbalance_min_size(p, L), p.epsilon) is not None
    if t.kind == "green":
        length = t.param
        if not 1 <= length <= max_green_length(p, L):
            return False
        cnt = int(color_mask(w, length, FlagColor.GREEN, p).sum())
        return cnt >= green_count_needed(p, L)
    if t.kind == "blue-yellow":
        m = t.param
        if not 1 <= m <= n:
            return False
        if not _at_least(blue_band_count(w, m, p), p.blue_yellow_fraction, L):
            return False
        return red_cap_holds(w, m, p, mode)[0]
    raise ValueError(f"unknown type kind {t.kind!r}")
