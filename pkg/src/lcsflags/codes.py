"""Code families and the measurements run on them.

Randomness comes from numpy's ``PCG64`` bit generator seeded per task, so
every generated code and every Monte-Carlo trial is a pure function of its
seed.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .bitstring import BitString
from .oracle import BudgetExceeded, _rows, lcs_exact, lcs_fast

GENERATOR = "numpy.random.PCG64"
DEFAULT_SPAN_FLOOR = Fraction(1, 4)
DEFAULT_SPAN_BUDGET = 1 << 24


@dataclass
class Code:
    strings: list[BitString]
    family: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    generator: str | None = None

    def __post_init__(self):
        if len({len(w) for w in self.strings}) > 1:
            raise ValueError("code strings must share one length")

    def __len__(self) -> int:
        return len(self.strings)

    def __iter__(self):
        return iter(self.strings)

    @property
    def length(self) -> int:
        return len(self.strings[0]) if self.strings else 0

    def metadata(self) -> dict:
        return {"family": self.family, "params": self.params, "seed": self.seed,
                "generator": self.generator, "size": len(self), "length": self.length}


def bukh_ma_phase(i: int, k: int) -> BitString:
    """``(1^{2^i} 0^{2^i})`` repeated ``2^{k-i-1}`` times; length ``2^k``."""
    if not 0 <= i <= k - 1:
        raise ValueError(f"phase i={i} outside [0, {k - 1}]")
    return BitString(("1" * 2**i + "0" * 2**i) * 2 ** (k - i - 1))


@dataclass
class BukhMa:
    concatenation: BitString
    periods: Code


def bukh_ma_code(k: int) -> BukhMa:
    if k < 1:
        raise ValueError("k must be >= 1")
    phases = [bukh_ma_phase(i, k) for i in range(k)]
    cat = BitString("".join(w.bits for w in phases))
    return BukhMa(cat, Code(phases, "bukh-ma-phases", {"k": k}))


def random_code(N: int, M: int, seed: int) -> Code:
    if N < 1 or M < 1:
        raise ValueError("N and M must be positive")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(M, N), dtype=np.uint8)
    strings = [BitString((row + ord("0")).tobytes().decode("ascii")) for row in bits]
    return Code(strings, "random", {"N": N, "M": M}, seed, GENERATOR)


# -- span -----------------------------------------------------------------

@dataclass
class SpanResult:
    s_range: tuple[int, int] | None  # 1-based inclusive
    t_range: tuple[int, int] | None
    lcs: int
    ratio: Fraction | None  # None: every admissible pair has LCS 0
    c: Fraction
    granularity: int
    exact: bool

    @property
    def unbounded(self) -> bool:
        return self.ratio is None

    def to_json(self) -> dict:
        return {"s_range": self.s_range, "t_range": self.t_range, "lcs": self.lcs,
                "ratio": "unbounded" if self.ratio is None else
                [self.ratio.numerator, self.ratio.denominator],
                "ratio_float": None if self.ratio is None else float(self.ratio),
                "c": [self.c.numerator, self.c.denominator],
                "granularity": self.granularity, "exact": self.exact}


def _int_bits(v: int, width: int) -> np.ndarray:
    raw = np.frombuffer(v.to_bytes((width + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:width].astype(np.int64)


def _span_work(ns: int, nt: int, g: int) -> int:
    return (ns // g + 1) ** 2 * (nt // g + 1) * nt


def span(s: BitString, t: BitString, c=DEFAULT_SPAN_FLOOR,
         budget_cells: int = DEFAULT_SPAN_BUDGET, granularity: int | None = None) -> SpanResult:
    """Minimum of ``(|s'| + |t'|) / LCS(s', t')`` over substrings with
    ``|s'| >= c|s|`` and ``|t'| >= c|t|``.

    Every start pair gets one bit-parallel pass, which yields the LCS of all
    end pairs at once. Above ``budget_cells`` only starts and s-ends on a
    grid of step ``g`` are tried; ``g`` is recorded.
    """
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError("span floor c must lie in (0, 1]")
    ns, nt = len(s), len(t)
    min_s, min_t = math.ceil(c * ns), math.ceil(c * nt)
    g = granularity or 1
    while granularity is None and _span_work(ns, nt, g) > budget_cells:
        g *= 2
        if g > max(ns, nt):
            raise BudgetExceeded(_span_work(ns, nt, 1), budget_cells)
    best = None  # (ratio, lcs, s_range, t_range)
    sb, tb = s.bits, t.bits
    for i in range(0, ns - min_s + 1, g):
        for k in range(0, nt - min_t + 1, g):
            tt = tb[k:]
            span_t = len(tt)
            if span_t < min_t:
                continue
            lens_t = np.arange(1, span_t + 1)
            for step, v in enumerate(_rows(sb[i:], tt)):
                ls = step
                if ls < min_s or (ls != ns - i and (ls - min_s) % g):
                    continue
                lcs = np.cumsum(1 - _int_bits(v, span_t))
                lt = lens_t[min_t - 1:]
                vals = lcs[min_t - 1:]
                ok = vals > 0
                if not ok.any():
                    continue
                # float argmin is safe: distinct ratios of ints < 2^26 differ
                # by far more than double rounding
                num, den = ls + lt[ok], vals[ok]
                j = int(np.argmin(num / den))
                cand = Fraction(int(num[j]), int(den[j]))
                if best is None or cand < best[0]:
                    lt_best = int(num[j] - ls)
                    best = (cand, int(den[j]), (i + 1, i + ls), (k + 1, k + lt_best))
    if best is None:
        return SpanResult(None, None, 0, None, c, g, g == 1)
    return SpanResult(best[2], best[3], best[1], best[0], c, g, g == 1)


# -- Chvatal-Sankoff --------------------------------------------------------

@dataclass
class CsEstimate:
    n: int
    trials: int
    seed: int
    mean: float
    std: float
    ci95: tuple[float, float]
    values: list[float]

    def to_json(self) -> dict:
        return {"n": self.n, "trials": self.trials, "seed": self.seed, "mean": self.mean,
                "std": self.std, "ci95": list(self.ci95), "values": self.values,
                "generator": GENERATOR}


def cs_estimate(n: int, trials: int, seed: int) -> CsEstimate:
    """Monte-Carlo LCS/n for two uniform n-bit strings; trial k uses seed (seed, k)."""
    if trials < 1 or n < 1:
        raise ValueError("n and trials must be positive")
    vals = []
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        a, b = rng.integers(0, 2, size=(2, n), dtype=np.uint8) + ord("0")
        vals.append(lcs_fast(a.tobytes().decode(), b.tobytes().decode()) / n)
    arr = np.asarray(vals)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if trials > 1 else 0.0
    half = 1.96 * std / math.sqrt(trials)
    return CsEstimate(n, trials, seed, mean, std, (mean - half, mean + half), vals)


# -- q-ary restriction -----------------------------------------------------

@dataclass
class QaryResult:
    code: Code
    pair: tuple[int, int]
    kept: list[int]
    flagged: list[int]
    target_length: int

    def to_json(self) -> dict:
        return {"pair": list(self.pair), "kept": self.kept, "flagged": self.flagged,
                "target_length": self.target_length,
                "strings": [w.bits for w in self.code]}


def _top_pair(word: str, q: int) -> tuple[int, int]:
    counts = Counter(int(ch) for ch in word)
    order = sorted(range(q), key=lambda sym: (-counts.get(sym, 0), sym))
    return tuple(sorted(order[:2]))


def qary_restrict(code, q: int) -> QaryResult:
    """Binary code from the largest class ``C_ab`` of strings whose two most
    frequent symbols are ``a < b``; ``a -> 0``, ``b -> 1``.

    Each string is cut to its subsequence over ``{a, b}`` and truncated to
    ``floor(2N/q)``; strings with fewer such symbols are flagged and left out.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    words = [str(w) for w in code]
    if not words:
        raise ValueError("empty code")
    N = len(words[0])
    for w in words:
        if len(w) != N:
            raise ValueError("code strings must share one length")
        if any(not ch.isdigit() or int(ch) >= q for ch in w):
            raise ValueError(f"string {w!r} is not over the alphabet 0..{q - 1}")
    classes: dict[tuple[int, int], list[int]] = {}
    for idx, w in enumerate(words):
        classes.setdefault(_top_pair(w, q), []).append(idx)
    pair = min(classes, key=lambda pr: (-len(classes[pr]), pr))
    a, b = pair
    target = (2 * N) // q
    table = {str(a): "0", str(b): "1"}
    out, kept, flagged = [], [], []
    for idx in classes[pair]:
        sub = "".join(table[ch] for ch in words[idx] if ch in table)
        if len(sub) < target:
            flagged.append(idx)
            continue
        out.append(BitString(sub[:target]))
        kept.append(idx)
    if not out:
        raise ValueError(f"class C_{a}{b} has no string with {target} symbols from {{{a}, {b}}}")
    restricted = Code(out, "qary-restriction", {"q": q, "pair": [a, b], "N": N})
    return QaryResult(restricted, pair, kept, flagged, target)


# -- pairwise sweeps ---------------------------------------------------------

def pair_measurements(code, span_floor=None, span_budget: int = DEFAULT_SPAN_BUDGET,
                      exact: bool = True) -> list[dict]:
    """One row per unordered pair: LCS, surplus over N/2, optional span, runtime."""
    rows = []
    strings = list(code)
    for pid, (i, j) in enumerate(combinations(range(len(strings)), 2)):
        s, t = strings[i], strings[j]
        t0 = time.perf_counter()
        lcs = lcs_exact(s, t).length if exact else lcs_fast(s, t)
        row = {"pair": pid, "i": i, "j": j, "lcs": lcs,
               "surplus": lcs - Fraction(len(s), 2)}
        if span_floor is not None:
            sp = span(s, t, span_floor, span_budget)
            row["span"] = None if sp.ratio is None else sp.ratio
        row["runtime"] = time.perf_counter() - t0
        rows.append(row)
    return rows
