"""Flag rates, flag colors and the Blue-flag scale profile ``b_w``.

An index ``i`` is an ``l``-flag of rate ``z / (l - 1)`` where ``z`` is the
number of zeros in ``w_[i, i+l-1]``. Every threshold comparison is done on
integers (``z * den > (l - 1) * num``), so nothing here touches floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .bitstring import BitString, OnesInterval, zeros_in

DEFAULT_EPSILON = Fraction(1, 10**6)


def _fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("pass epsilon/gamma as Fraction, int or 'p/q' string, not float")
    return Fraction(value)


@dataclass(frozen=True)
class ParamSet:
    """The two tunable constants and every threshold derived from them.

    ``strict`` enforces ``gamma <= epsilon**2 / 1000``. Turning it off keeps
    only ``0 < gamma < epsilon**2`` so desk-scale experiments can make the
    ``gamma * L`` caps non-vacuous.
    """

    epsilon: Fraction = DEFAULT_EPSILON
    gamma: Fraction | None = None
    strict: bool = True

    def __post_init__(self):
        eps = _fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        gamma = eps**2 / 1000 if self.gamma is None else _fraction(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        # Blue => Green needs 1/eps >= 1 + 2 eps, i.e. eps <= 1/2
        if not 0 < eps <= Fraction(1, 2):
            raise ValueError(f"epsilon must lie in (0, 1/2], got {eps}")
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.strict and gamma > eps**2 / 1000:
            raise ValueError(f"gamma={gamma} exceeds epsilon^2/1000 (pass strict=False to allow)")
        if not self.strict and gamma >= eps**2:
            raise ValueError("gamma must stay below epsilon^2")

    @classmethod
    def scaled(cls, epsilon, gamma=None, strict: bool = True) -> "ParamSet":
        return cls(Fraction(epsilon), None if gamma is None else Fraction(gamma), strict)

    # colour thresholds
    @property
    def blue_rate(self) -> Fraction:
        return 1 / self.epsilon

    @property
    def green_rate(self) -> Fraction:
        return 1 + 2 * self.epsilon

    @property
    def yellow_rate(self) -> Fraction:
        return Fraction(9, 10)

    # type and case thresholds
    @property
    def green_count_fraction(self) -> Fraction:
        return self.epsilon**2

    @property
    def imbalance_size_fraction(self) -> Fraction:
        return self.epsilon**5

    @property
    def blue_yellow_fraction(self) -> Fraction:
        return self.epsilon**2 - self.gamma

    @property
    def red_cap_fraction(self) -> Fraction:
        return 600 * self.epsilon

    @property
    def yellow_length_factor(self) -> Fraction:
        return Fraction(56, 100) / self.epsilon

    @property
    def balance_beta(self) -> Fraction:
        return 6 * self.gamma

    @property
    def delta_main(self) -> Fraction:
        return self.epsilon**6 / 150

    @property
    def delta_code(self) -> Fraction:
        return self.epsilon**6 / 900

    @cached_property
    def gamma_inv_cubed(self) -> Fraction:
        return 1 / self.gamma**3

    def n0_shift(self, n: int) -> float:
        """``200 gamma^-3 log2 n`` (float; only compared against ``n``)."""
        return 0.0 if n <= 1 else 200 * float(self.gamma_inv_cubed) * math.log2(n)

    def scale_window(self, n: int) -> float:
        return 0.0 if n <= 1 else 150 * float(self.gamma_inv_cubed) * math.log2(n)

    def budget_scales(self, n: int, beta) -> float:
        return 0.0 if n <= 1 else 32 * float(Fraction(beta)) ** -3 * math.log2(n)

    def snapshot(self) -> dict:
        return {
            "epsilon": _frac_str(self.epsilon),
            "gamma": _frac_str(self.gamma),
            "strict": self.strict,
        }


def _frac_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Rate:
    """``zeros / (length - 1)``; infinite when length is 1 and zeros > 0."""

    zeros: int
    denom: int

    @property
    def infinite(self) -> bool:
        return self.denom == 0 and self.zeros > 0

    @property
    def value(self) -> Fraction | None:
        """Exact value, or None for +inf."""
        if self.denom == 0:
            return None if self.zeros else Fraction(0)
        return Fraction(self.zeros, self.denom)

    def exceeds(self, threshold: Fraction) -> bool:
        if self.denom == 0:
            return self.zeros > 0
        return self.zeros * threshold.denominator > threshold.numerator * self.denom

    def __str__(self) -> str:
        v = self.value
        return "inf" if v is None else str(v)


class FlagColor(enum.IntEnum):
    RED = 0
    YELLOW = 1
    GREEN = 2
    BLUE = 3


def flag_rate(w: BitString, i: int, length: int) -> Rate:
    if length < 1:
        raise ValueError("flag length must be >= 1")
    z = zeros_in(w, OnesInterval(i, i + length - 1))
    return Rate(z, length - 1)


def flag_color(r: Rate, p: ParamSet) -> FlagColor:
    if r.exceeds(p.blue_rate):
        return FlagColor.BLUE
    if r.exceeds(p.green_rate):
        return FlagColor.GREEN
    if r.exceeds(p.yellow_rate):
        return FlagColor.YELLOW
    return FlagColor.RED


def flag_zero_counts(w: BitString, length: int) -> np.ndarray:
    """Zeros in ``w_[i, i+length-1]`` for ``i = 1..L`` (index 0 is ``i=1``)."""
    L = w.n_ones
    c = w.zeros_before_one
    idx = np.arange(1, L + 1)
    end = np.minimum(idx + length, L + 1)
    return c[end] - c[idx]


def _exceeds_vec(z: np.ndarray, length: int, threshold: Fraction) -> np.ndarray:
    lhs_mult, rhs = threshold.denominator, threshold.numerator * (length - 1)
    if lhs_mult * (int(z.max(initial=0)) + 1) < 2**62 and rhs < 2**62:
        return z * lhs_mult > rhs
    return np.array([int(v) * lhs_mult > rhs for v in z.tolist()], dtype=bool)


def color_mask(w: BitString, length: int, color: FlagColor, p: ParamSet,
               exact: bool = False) -> np.ndarray:
    """Boolean mask over ``i = 1..L``: colour at least ``color`` (or exactly,
    when ``exact``; RED is always exact since it is the bottom colour)."""
    z = flag_zero_counts(w, length)
    thresholds = {FlagColor.BLUE: p.blue_rate, FlagColor.GREEN: p.green_rate,
                  FlagColor.YELLOW: p.yellow_rate}
    if color == FlagColor.RED:
        return ~_exceeds_vec(z, length, p.yellow_rate)
    mask = _exceeds_vec(z, length, thresholds[color])
    if exact and color != FlagColor.BLUE:
        mask &= ~_exceeds_vec(z, length, thresholds[FlagColor(color + 1)])
    return mask


def count_flags(w: BitString, length: int, color: FlagColor, p: ParamSet) -> int:
    if length < 1:
        raise ValueError("flag length must be >= 1")
    if w.n_ones == 0:
        return 0
    return int(color_mask(w, length, color, p).sum())


@dataclass(frozen=True)
class FlagProfile:
    """``b[i-1] = b_w(i)``: largest power of two ``l <= L`` making ``i`` a
    Blue ``l``-flag, or 0."""

    b: tuple[int, ...]
    _arr: np.ndarray = field(repr=False, compare=False)

    def __getitem__(self, i: int) -> int:
        return self.b[i - 1]

    def __len__(self) -> int:
        return len(self.b)

    @property
    def array(self) -> np.ndarray:
        return self._arr


def b_values(w: BitString, p: ParamSet) -> np.ndarray:
    """Vector form of the b-profile, one entry per ones-index."""
    cache = w.__dict__.setdefault("_b_cache", {})
    key = p.epsilon
    if key not in cache:
        cache[key] = _b_values(w, p)
    return cache[key]


def _b_values(w: BitString, p: ParamSet) -> np.ndarray:
    L = w.n_ones
    b = np.zeros(L, dtype=np.int64)
    length = 1
    while length <= L:
        blue = _exceeds_vec(flag_zero_counts(w, length), length, p.blue_rate)
        b[blue] = length
        length *= 2
    b.setflags(write=False)
    return b


def b_profile(w: BitString, p: ParamSet) -> FlagProfile:
    if w.n_ones < 1:
        raise ValueError("b_profile needs at least one 1-bit")
    arr = b_values(w, p)
    return FlagProfile(tuple(arr.tolist()), arr)


def count_blue_plus(w: BitString, length: int, p: ParamSet) -> int:
    if length < 1 or length & (length - 1):
        raise ValueError("length must be a power of two")
    if w.n_ones == 0:
        return 0
    return int((b_values(w, p) >= length).sum())
