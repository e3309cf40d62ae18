"""Distributions of b-values over dyadic blocks, and the scale scan that
finds blocks whose two halves look alike.

Masses and L1 distances are exact; only entropy is a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitstring import BitString, OnesInterval, substring_ones
from .flags import ParamSet, b_values


@dataclass(frozen=True)
class FlagDistribution:
    """Probability mass over b-values (0 or powers of two)."""

    mass: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        items = tuple(sorted((int(k), Fraction(v)) for k, v in dict(self.mass).items() if v))
        if any(v < 0 for _, v in items):
            raise ValueError("negative mass")
        if sum(v for _, v in items) != 1:
            raise ValueError("masses must sum to 1")
        for k, _ in items:
            if k < 0 or (k and k & (k - 1)):
                raise ValueError(f"support value {k} is not 0 or a power of two")
        object.__setattr__(self, "mass", items)

    @classmethod
    def from_values(cls, values) -> "FlagDistribution":
        vals, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        total = int(counts.sum())
        if total == 0:
            raise ValueError("empty index set")
        return cls(tuple((int(v), Fraction(int(c), total)) for v, c in zip(vals, counts)))

    @classmethod
    def point(cls, value: int) -> "FlagDistribution":
        return cls(((value, Fraction(1)),))

    def __getitem__(self, value: int) -> Fraction:
        return dict(self.mass).get(value, Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.mass)

    def support(self) -> list[int]:
        return [k for k, _ in self.mass]

    def to_json(self) -> dict:
        return {str(k): [v.numerator, v.denominator] for k, v in self.mass}


def _check_interval(w: BitString, I: OnesInterval):
    if not 1 <= I.x <= I.y <= w.n_ones:
        raise ValueError(f"interval [{I.x}, {I.y}] not inside [1, {w.n_ones}]")


def flag_distribution_interval(w: BitString, I: OnesInterval, p: ParamSet) -> FlagDistribution:
    """b_w restricted to the indices of I (flags may reach past I)."""
    _check_interval(w, I)
    return FlagDistribution.from_values(b_values(w, p)[I.x - 1:I.y])


def flag_distribution_substring(w: BitString, I: OnesInterval, p: ParamSet) -> FlagDistribution:
    """b-values of the extracted substring w_I itself."""
    _check_interval(w, I)
    return FlagDistribution.from_values(b_values(substring_ones(w, I), p))


def l1(p: FlagDistribution, q: FlagDistribution) -> Fraction:
    a, b = p.as_dict(), q.as_dict()
    return sum((abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)), Fraction(0))


def entropy(p: FlagDistribution) -> float:
    return -sum(float(v) * math.log2(v) for _, v in p.mass if v)


def pinsker_gap(p_minus: FlagDistribution, p: FlagDistribution,
                p_plus: FlagDistribution) -> float:
    """``2H(p) - H(p-) - H(p+) - |p+ - p-|_1^2 / 4``; p must be the midpoint."""
    a, b, c = p_minus.as_dict(), p.as_dict(), p_plus.as_dict()
    for k in set(a) | set(b) | set(c):
        if a.get(k, 0) + c.get(k, 0) != 2 * b.get(k, 0):
            raise ValueError("p is not the average of p_minus and p_plus")
    d = l1(p_plus, p_minus)
    return 2 * entropy(p) - entropy(p_minus) - entropy(p_plus) - float(d * d) / 4


# -- scale scan -----------------------------------------------------------

def _codes(b: np.ndarray) -> np.ndarray:
    """0 -> 0, 2^k -> k + 1."""
    out = np.zeros(len(b), dtype=np.int64)
    nz = b > 0
    out[nz] = np.log2(b[nz]).astype(np.int64) + 1
    return out


def block_counts(b: np.ndarray, m: int, width: int) -> np.ndarray:
    """Histogram of b-codes for each size-2^m block, shape (blocks, width)."""
    codes = _codes(b).reshape(-1, 2**m)
    out = np.zeros((codes.shape[0], width), dtype=np.int64)
    rows = np.repeat(np.arange(codes.shape[0]), 2**m)
    np.add.at(out, (rows, codes.ravel()), 1)
    return out


def _entropy_rows(counts: np.ndarray, total: int) -> np.ndarray:
    q = counts / total
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(q > 0, q * np.log2(q), 0.0)
    return h.sum(axis=1)


@dataclass
class BalanceReport:
    m: int
    balanced: list[bool]
    discrepancy: list[Fraction]
    beta: Fraction

    @property
    def unbalanced(self) -> int:
        return sum(not v for v in self.balanced)

    def to_json(self) -> dict:
        return {"m": self.m, "beta": [self.beta.numerator, self.beta.denominator],
                "balanced": self.balanced, "unbalanced": self.unbalanced,
                "discrepancy": [[d.numerator, d.denominator] for d in self.discrepancy]}


@dataclass
class BalanceScan:
    variant: str
    beta: Fraction
    reports: list[BalanceReport]
    entropy: dict[int, float] = field(default_factory=dict)

    def report(self, m: int) -> BalanceReport | None:
        for r in self.reports:
            if r.m == m:
                return r
        return None

    def increments(self) -> list[dict]:
        """Per scale: ``E_{m-1}`` against ``E_m - 2^{m-3} t_m beta^2``."""
        out = []
        b2 = float(self.beta) ** 2
        for r in self.reports:
            if r.m - 1 not in self.entropy or r.m not in self.entropy:
                continue
            lhs = self.entropy[r.m - 1]
            rhs = self.entropy[r.m] - 2.0 ** (r.m - 3) * r.unbalanced * b2
            out.append({"m": r.m, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs})
        return out

    def to_json(self) -> dict:
        return {"variant": self.variant,
                "beta": [self.beta.numerator, self.beta.denominator],
                "reports": [r.to_json() for r in self.reports],
                "entropy": {str(m): repr(v) for m, v in sorted(self.entropy.items())},
                "increments": [{k: (repr(v) if isinstance(v, float) else v)
                                for k, v in inc.items()} for inc in self.increments()]}


def _half_report(counts: np.ndarray, m: int, beta: Fraction) -> BalanceReport:
    # counts: per size-2^(m-1) block; pair up children 2i-1, 2i
    left, right = counts[0::2], counts[1::2]
    diff = np.abs(left - right).sum(axis=1)
    half = 2 ** (m - 1)
    disc = [Fraction(int(d), half) for d in diff]
    ok = [int(d) * beta.denominator <= beta.numerator * half for d in diff]
    return BalanceReport(m, ok, disc, beta)


def substring_window(n: int, beta) -> tuple[int, int]:
    beta = Fraction(beta)
    width = 0.0 if n <= 1 else 150 * float(beta) ** -3 * math.log2(n)
    return max(1, math.ceil(n - width)), n


def balance_scan(w: BitString, beta, p: ParamSet, variant: str = "interval",
                 window: tuple[int, int] | None = None) -> BalanceScan:
    """Per-scale balance verdicts for every dyadic block, plus ``E_m``.

    ``interval`` compares ``p_{w, I_{m-1,2i-1}}`` with ``p_{w, I_{m-1,2i}}``;
    ``substring`` recomputes b-values inside each ``w_{m,i}`` first and is
    limited to ``window`` (default ``[n - 150 beta^-3 log n, n]``).
    """
    beta = Fraction(beta)
    L = w.n_ones
    if L < 1 or L & (L - 1):
        raise ValueError(f"ones-count {L} is not a power of two")
    n = L.bit_length() - 1
    width = n + 2
    b = b_values(w, p)
    by_scale = {m: block_counts(b, m, width) for m in range(n + 1)}
    ent = {m: float(2**m * _entropy_rows(c, 2**m).sum()) for m, c in by_scale.items()}

    reports = []
    if variant == "interval":
        for m in range(1, n + 1):
            reports.append(_half_report(by_scale[m - 1], m, beta))
    elif variant == "substring":
        lo, hi = window or substring_window(n, beta)
        for m in range(max(1, lo), min(n, hi) + 1):
            rows = []
            for i in range(1, 2 ** (n - m) + 1):
                sub = substring_ones(w, OnesInterval.dyadic(m, i))
                rows.append(block_counts(b_values(sub, p), m - 1, width))
            reports.append(_half_report(np.vstack(rows), m, beta))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return BalanceScan(variant, beta, reports, ent)


def is_balanced(w: BitString, beta, p: ParamSet) -> bool:
    """Whole-string test: the two halves of ``w`` are within ``beta`` in L1."""
    L = w.n_ones
    if L < 2 or L & (L - 1):
        raise ValueError("need a power-of-two ones-count of at least 2")
    beta = Fraction(beta)
    n = L.bit_length() - 1
    counts = block_counts(b_values(w, p), n - 1, n + 2)
    return _half_report(counts, n, beta).balanced[0]
