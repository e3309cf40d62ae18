"""Non-crossing matchings between two binary strings.

A matching is a list of ``(a, b)`` pairs of 1-based bit positions with
``s[a] == t[b]``, strictly increasing in both coordinates; its size is the
length of the common subsequence it witnesses. The builders here start
from the ones matching ``i -> i + delta`` and splice in zero-rich regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .bitstring import (BitString, OnesInterval, drop_interval, drop_range, rev,
                        rev_position, substring_ones)
from .flags import FlagColor, ParamSet, b_values, color_mask

_EMPTY = np.zeros(0, dtype=np.int64)


class BlockMatchingError(ValueError):
    def __init__(self, block: int, reason: str):
        super().__init__(f"block {block}: {reason}")
        self.block = block


@dataclass(frozen=True)
class Matching:
    a: np.ndarray = field(default_factory=lambda: _EMPTY)
    b: np.ndarray = field(default_factory=lambda: _EMPTY)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.int64).reshape(-1)
        b = np.asarray(self.b, dtype=np.int64).reshape(-1)
        if a.shape != b.shape:
            raise ValueError("pair coordinate arrays differ in length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_pairs(cls, pairs, meta=None) -> "Matching":
        pairs = list(pairs)
        if not pairs:
            return cls(meta=meta or {})
        arr = np.asarray(pairs, dtype=np.int64)
        return cls(arr[:, 0], arr[:, 1], meta or {})

    @classmethod
    def concat(cls, parts: Sequence[tuple[np.ndarray, np.ndarray]], meta=None,
               canonical: bool = True) -> "Matching":
        parts = [p for p in parts if len(p[0])]
        if not parts:
            return cls(meta=meta or {})
        m = cls(np.concatenate([p[0] for p in parts]),
                np.concatenate([p[1] for p in parts]), meta or {})
        return m.canonical() if canonical else m

    def __len__(self) -> int:
        return len(self.a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    __hash__ = None

    @property
    def size(self) -> int:
        return len(self.a)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.a.tolist(), self.b.tolist()))

    def canonical(self) -> "Matching":
        """Sorted by (a, b) with exact duplicates removed."""
        if not len(self.a):
            return self
        order = np.lexsort((self.b, self.a))
        a, b = self.a[order], self.b[order]
        keep = np.ones(len(a), dtype=bool)
        keep[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
        return Matching(a[keep], b[keep], self.meta)

    def shifted(self, da: int, db: int) -> "Matching":
        return Matching(self.a + da, self.b + db, self.meta)

    def with_meta(self, **kw) -> "Matching":
        return Matching(self.a, self.b, {**self.meta, **kw})

    def to_json(self) -> dict:
        return {"size": self.size, "pairs": [[int(x), int(y)] for x, y in self.pairs],
                "meta": self.meta}

    @classmethod
    def from_json(cls, obj) -> "Matching":
        return cls.from_pairs([tuple(p) for p in obj["pairs"]], obj.get("meta", {}))


@dataclass(frozen=True)
class ShiftOutcome:
    delta: int
    matching: Matching
    gain: int

    def to_json(self) -> dict:
        return {"delta": self.delta, "gain": self.gain, "matching": self.matching.to_json()}


def validate(m: Matching, s: BitString, t: BitString) -> bool:
    if not len(m):
        return True
    a, b = m.a, m.b
    if a.min() < 1 or b.min() < 1 or a.max() > len(s) or b.max() > len(t):
        return False
    if len(a) > 1 and ((np.diff(a) <= 0).any() or (np.diff(b) <= 0).any()):
        return False
    return bool((s.array[a - 1] == t.array[b - 1]).all())


def check_valid(m: Matching, s: BitString, t: BitString, what: str) -> Matching:
    # construction bug guard: every builder must emit a valid matching
    if not validate(m, s, t):
        raise AssertionError(f"{what} produced an invalid matching")
    return m


def identity_match(s: BitString, meta=None) -> Matching:
    pos = np.arange(1, len(s) + 1, dtype=np.int64)
    return Matching(pos, pos.copy(), meta or {"strategy": "identity"})


# -- ones / zeros matchings ----------------------------------------------

def _ones_pairs(s: BitString, t: BitString, s_idx: np.ndarray, t_idx: np.ndarray):
    """Pair the ``s_idx``-th ones of s with the ``t_idx``-th ones of t,
    dropping pairs whose indices leave ``[1, L]``."""
    ok = (s_idx >= 1) & (s_idx <= s.n_ones) & (t_idx >= 1) & (t_idx <= t.n_ones)
    return s.ones[s_idx[ok] - 1], t.ones[t_idx[ok] - 1]


def _zip(pa: np.ndarray, pb: np.ndarray):
    k = min(len(pa), len(pb))
    return pa[:k], pb[:k]


def naive_match(s: BitString, t: BitString, delta: int) -> Matching:
    """i-th one of s with the (i + delta)-th one of t."""
    if abs(delta) > min(s.n_ones, t.n_ones):
        raise ValueError(f"|delta|={abs(delta)} exceeds the ones-count")
    lo, hi = max(1, 1 - delta), min(s.n_ones, t.n_ones - delta)
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    a, b = _ones_pairs(s, t, idx, idx + delta)
    return Matching(a, b, {"strategy": "naive", "delta": delta})


def imbalanced_match(s: BitString, t: BitString) -> Matching:
    """All ones in order, or all zeros when zeros are the majority."""
    if len(s) != len(t) or s.n_ones != t.n_ones:
        raise ValueError("imbalanced_match needs equal lengths and equal ones-counts")
    if s.n_zeros > s.n_ones:
        a, b = _zip(s.zeros, t.zeros)
        sym = "0"
    else:
        a, b = s.ones, t.ones
        sym = "1"
    return Matching(a.copy(), b.copy(), {"strategy": "imbalanced", "symbol": sym})


# -- prefix/suffix stitching ---------------------------------------------

def _power_of_two_exponent(L: int) -> int:
    if L < 1 or L & (L - 1):
        raise ValueError(f"ones-count {L} is not a power of two")
    return L.bit_length() - 1


def block_drop_range(w: BitString, m: int, i: int, delta: int) -> tuple[int, int] | None:
    """0-based bit slice of ``Drop_delta(w_{m,i})`` inside ``w``."""
    iv = drop_interval(2**m, delta)
    if iv is None:
        return None
    base = (i - 1) * 2**m
    return w.bit_range(OnesInterval(base + iv.x, base + iv.y))


def stitch(s: BitString, t: BitString, m: int, delta: int, Z,
           block_matchings) -> Matching:
    """Shifted ones matching with the blocks in ``Z`` replaced.

    ``block_matchings`` maps each block index to a matching between
    ``Drop_delta(s_{m,i})`` and ``Drop_{-delta}(t_{m,i})`` in local
    coordinates (it may also be a sequence aligned with ``Z``).
    """
    L = s.n_ones
    if t.n_ones != L:
        raise ValueError("stitch needs equal ones-counts")
    n = _power_of_two_exponent(L)
    if not 0 <= m <= n:
        raise ValueError(f"scale m={m} outside [0, {n}]")
    if abs(delta) > 2**m:
        raise ValueError(f"|delta| must be at most 2^m = {2**m}")
    Z = list(Z)
    if len(set(Z)) != len(Z):
        raise ValueError("block set Z has repeated indices")
    if not isinstance(block_matchings, Mapping):
        block_matchings = dict(zip(Z, block_matchings))
    nblocks = 2 ** (n - m)

    base = naive_match(s, t, delta)
    keep = np.ones(len(base), dtype=bool)
    parts = []
    for i in sorted(Z):
        if not 1 <= i <= nblocks:
            raise BlockMatchingError(i, f"index outside [1, {nblocks}]")
        bm = block_matchings.get(i)
        if bm is None:
            raise BlockMatchingError(i, "no block matching supplied")
        sr = block_drop_range(s, m, i, delta)
        tr = block_drop_range(t, m, i, -delta)
        if sr is None or tr is None:
            if len(bm):
                raise BlockMatchingError(i, "drop leaves no ones but matching is non-empty")
            continue
        sb = BitString(s.bits[sr[0]:sr[1]])
        tb = BitString(t.bits[tr[0]:tr[1]])
        if not validate(bm, sb, tb):
            raise BlockMatchingError(i, "matching is not valid for the dropped block pair")
        inside = (base.a > sr[0]) & (base.a <= sr[1])
        if int(inside.sum()) != 2**m - abs(delta):
            raise AssertionError("ones matching does not align with the dropped block")
        keep &= ~inside
        parts.append((bm.a + sr[0], bm.b + tr[0]))
    parts.append((base.a[keep], base.b[keep]))
    out = Matching.concat(parts, {"strategy": "stitch", "m": m, "delta": delta,
                                  "blocks": sorted(Z)})
    return check_valid(out, s, t, "stitch")


def stitch_size(L: int, m: int, delta: int, block_sizes) -> int:
    return (L - abs(delta)) + sum(k - (2**m - abs(delta)) for k in block_sizes)


def to_drop_local(mt: Matching, s: BitString, t: BitString, delta: int) -> Matching:
    """Re-base a matching that lies inside ``Drop_delta(s)`` x ``Drop_-delta(t)``."""
    sl, _ = drop_range(s, delta)
    tl, _ = drop_range(t, -delta)
    return Matching(mt.a - sl, mt.b - tl, mt.meta)


# -- Green strategy -------------------------------------------------------

def _green_region(w: BitString, i: int, length: int):
    return w.bit_range(OnesInterval(i, i + length - 1))


def green_flags(s: BitString, t: BitString, length: int, delta: int, p: ParamSet,
                s_mask=None, t_mask=None) -> list[int]:
    """Thinned flag set: Green in s at i and in t at i + delta, spaced by at
    least ``length``, with both regions closed by a following one."""
    L = s.n_ones
    if s_mask is None:
        s_mask = color_mask(s, length, FlagColor.GREEN, p)
    if t_mask is None:
        t_mask = color_mask(t, length, FlagColor.GREEN, p)
    lo, hi = max(1, 1 - delta), min(L, t.n_ones - delta)
    if lo > hi:
        return []
    idx = np.arange(lo, hi + 1)
    cand = idx[s_mask[idx - 1] & t_mask[idx + delta - 1]]
    chosen, nxt = [], 1
    limit = min(L, t.n_ones)
    for i in cand.tolist():
        if i < nxt:
            continue
        if max(i, i + delta) + length > limit:
            break
        chosen.append(i)
        nxt = i + length
    return chosen


def _green_pieces(s, t, length, delta, G):
    """Zero pairs per flag and the ones-indices they displace."""
    pieces, removed = [], []
    for i in G:
        za = s.zero_positions(*_green_region(s, i, length))
        zb = t.zero_positions(*_green_region(t, i + delta, length))
        pieces.append(_zip(za, zb))
        removed.append((i + 1, i + length - 1))
    return pieces, removed


def green_size(s, t, length, delta, G) -> int:
    L = min(s.n_ones, t.n_ones)
    size = L - abs(delta)
    for i in G:
        za = s.zeros_between(*_green_region(s, i, length))
        zb = t.zeros_between(*_green_region(t, i + delta, length))
        size += min(za, zb) - (length - 1)
    return size


def green_match(s: BitString, t: BitString, length: int, delta: int, p: ParamSet,
                s_mask=None, t_mask=None) -> Matching:
    if s.n_ones != t.n_ones:
        raise ValueError("green_match needs equal ones-counts")
    if length < 1:
        raise ValueError("flag length must be >= 1")
    if abs(delta) > s.n_ones:
        raise ValueError("|delta| exceeds the ones-count")
    G = green_flags(s, t, length, delta, p, s_mask, t_mask)
    base = naive_match(s, t, delta)
    keep = np.ones(len(base), dtype=bool)
    pieces, removed = _green_pieces(s, t, length, delta, G)
    if removed:
        # base pair k corresponds to the (lo + k)-th one of s
        first = max(1, 1 - delta)
        for lo, hi in removed:
            if lo <= hi:
                keep[lo - first:hi - first + 1] = False
    out = Matching.concat([(base.a[keep], base.b[keep])] + pieces,
                          {"strategy": "green", "delta": delta, "length": length,
                           "flags": G})
    return check_valid(out, s, t, "green_match")


def shift_domain(lo: int, hi: int, sweep_cap: int = 2**16, samples: int = 4096,
                 seed: int = 0) -> list[int]:
    """All shifts in ``[lo, hi]`` or, above ``sweep_cap``, a seeded sample (0 kept)."""
    if hi - lo + 1 <= sweep_cap:
        return list(range(lo, hi + 1))
    rng = np.random.default_rng(seed)
    picks = rng.choice(np.arange(lo, hi + 1), size=min(samples, hi - lo + 1), replace=False)
    out = set(int(v) for v in picks)
    if lo <= 0 <= hi:
        out.add(0)
    return sorted(out)


def _shift_key(size: int, delta: int):
    # larger size, then smaller |delta|, then smaller delta
    return (size, -abs(delta), -delta)


def green_best_shift(s: BitString, t: BitString, length: int, p: ParamSet,
                     sweep_cap: int = 2**16, samples: int = 4096, seed: int = 0) -> ShiftOutcome:
    L = s.n_ones
    if t.n_ones != L:
        raise ValueError("green_best_shift needs equal ones-counts")
    sm = color_mask(s, length, FlagColor.GREEN, p)
    tm = color_mask(t, length, FlagColor.GREEN, p)
    best = None
    for d in shift_domain(-L, L, sweep_cap, samples, seed):
        G = green_flags(s, t, length, d, p, sm, tm)
        key = _shift_key(green_size(s, t, length, d, G), d)
        if best is None or key > best[0]:
            best = (key, d)
    d = best[1]
    mt = green_match(s, t, length, d, p, sm, tm)
    return ShiftOutcome(d, mt, mt.size - (L - abs(d)))


# -- Blue-Yellow strategy -------------------------------------------------

def _by_windows(L: int, delta: int, p: ParamSet) -> tuple[int, int]:
    eps = p.epsilon
    x = math.floor((Fraction(1, 2) + eps / 100) * L)
    y = math.floor((Fraction(1, 2) + 3 * eps / 10) * L + delta)
    return x, y


def blue_flag_sequence(s: BitString, p: ParamSet, m: int = 0, b_cap=None,
                       end: int | None = None) -> list[tuple[int, int]]:
    """Greedy disjoint Blue flags ``(i_k, b_s(i_k))`` with ``i_k <= L/2``."""
    L = s.n_ones
    b = b_values(s, p)
    cap = (p.gamma.numerator * L) // p.gamma.denominator if b_cap is None else b_cap
    target = Fraction(1, 2) * (p.epsilon**2 - 4 * p.gamma) * L
    end = L + 1 if end is None else end
    out, total, nxt = [], 0, 1
    for i in range(1, L // 2 + 1):
        if total >= target:
            break
        bi = int(b[i - 1])
        if i < nxt or bi < max(1, 2**m) or bi > cap or i + bi > end:
            continue
        out.append((i, bi))
        total += bi
        nxt = i + bi
    return out


def blue_yellow_match(s: BitString, t: BitString, delta: int, p: ParamSet,
                      m: int = 0, b_cap=None) -> Matching:
    """Blue flags of s against shifted Yellow candidates of t.

    Pairs lie in ``s_[1, x]`` and ``t_[1+delta, y]`` with
    ``x = floor((1/2 + eps/100) L)`` and ``y = floor((1/2 + 3eps/10) L + delta)``.
    ``b_cap`` replaces the ``gamma L`` cap on flag lengths (useful when
    ``gamma L < 1``); ``m`` sets the ``2^m`` floor.
    """
    L = s.n_ones
    if t.n_ones != L:
        raise ValueError("blue_yellow_match needs equal ones-counts")
    _power_of_two_exponent(L)
    if not 0 <= delta <= L // 4:
        raise ValueError(f"delta={delta} outside [0, L/4] = [0, {L // 4}]")
    x, y = _by_windows(L, delta, p)
    stop = x + 1
    flags = blue_flag_sequence(s, p, m, b_cap, end=stop)
    factor = p.yellow_length_factor
    yellow = p.yellow_rate

    parts, trace = [], []
    i_prev, ls_prev, j_prev, lt_prev = 1, 0, 1 + delta, 0
    ls_sum = lt_sum = 0
    for i_k, ls in flags:
        lt = math.ceil(factor * ls)
        j_k = i_k + delta + lt_sum - ls_sum
        # gap before this flag: equal ones counts on both sides
        gs = np.arange(i_prev + ls_prev, i_k, dtype=np.int64)
        parts.append(_ones_pairs(s, t, gs, gs + (j_prev + lt_prev - i_prev - ls_prev)))
        in_k = False
        if 1 <= j_k <= L:
            zt = t.zeros_between(*t.bit_range(OnesInterval(j_k, j_k + lt - 1)))
            in_k = zt * yellow.denominator > yellow.numerator * (lt - 1)
        if in_k:
            sr = s.bit_range(OnesInterval(i_k, i_k + ls - 1))
            tr = t.bit_range(OnesInterval(j_k, j_k + lt - 1))
            parts.append((s.ones[i_k - 1:i_k], t.ones[j_k - 1:j_k]))
            parts.append(_zip(s.zero_positions(*sr), t.zero_positions(*tr)))
        else:
            idx = np.arange(i_k, i_k + ls, dtype=np.int64)
            parts.append(_ones_pairs(s, t, idx, idx + (j_k - i_k)))
        trace.append({"i": i_k, "j": j_k, "ls": ls, "lt": lt, "yellow": bool(in_k)})
        i_prev, ls_prev, j_prev, lt_prev = i_k, ls, j_k, lt
        ls_sum += ls
        lt_sum += lt
    j_stop = stop + delta + lt_sum - ls_sum
    gs = np.arange(i_prev + ls_prev, stop, dtype=np.int64)
    parts.append(_ones_pairs(s, t, gs, gs + (j_prev + lt_prev - i_prev - ls_prev)))

    mt = Matching.concat(parts)
    s_hi = s.bit_range(OnesInterval(1, x))[1]
    t_lo, t_hi = t.bit_range(OnesInterval(1 + delta, y))
    ok = (mt.a <= s_hi) & (mt.b > t_lo) & (mt.b <= t_hi)
    out = Matching(mt.a[ok], mt.b[ok], {
        "strategy": "blue-yellow", "delta": delta, "x": x, "y": y,
        "j_stop": j_stop, "flags": trace})
    return check_valid(out, s, t, "blue_yellow_match")


def _rev_window_map(w: BitString, offset: int, L: int, wx: int, wy: int,
                    local: np.ndarray) -> np.ndarray:
    """Map local positions in ``rev(w)_[wx, wy]`` to global positions.

    ``rev(w)_[wx, wy]`` equals ``rev(w_[L+1-wy, L+1-wx])``; the first bit of
    the window goes to the first bit of that substring, the rest reverse.
    """
    lo, hi = w.bit_range(OnesInterval(L + 1 - wy, L + 1 - wx))
    n = hi - lo
    pos = np.where(local == 1, 1, n + 2 - local)
    return offset + lo + pos


def blue_yellow_balanced(s: BitString, t: BitString, delta: int, p: ParamSet,
                         m: int = 0, m_rev: int | None = None, b_cap=None) -> Matching:
    """Two Blue-Yellow trapezoids joined by a ones matching.

    ``s = s1 s2`` and ``t = t1 t2`` with ``L`` ones per half. The forward
    piece matches ``(s1, t1)``, the backward piece is built on
    ``(rev(t2), rev(s2))`` and mapped back; the result lies inside
    ``Drop_delta(s)`` x ``Drop_-delta(t)``.
    """
    if not (s.starts_with_one() and t.starts_with_one()):
        raise ValueError("both strings must start with a one")
    if s.n_ones != t.n_ones or s.n_ones % 2:
        raise ValueError("need equal, even ones-counts (two halves each)")
    L = s.n_ones // 2
    _power_of_two_exponent(L)
    if not 0 <= delta <= L // 4:
        raise ValueError(f"delta={delta} outside [0, L/4] = [0, {L // 4}]")
    m_rev = m if m_rev is None else m_rev
    halves = [OnesInterval(1, L), OnesInterval(L + 1, 2 * L)]
    s1, s2 = (substring_ones(s, h) for h in halves)
    t1, t2 = (substring_ones(t, h) for h in halves)
    s2_off = int(s.ones[L]) - 1
    t2_off = int(t.ones[L]) - 1

    init = blue_yellow_match(s1, t1, delta, p, m, b_cap)

    rt2, rs2 = rev(t2), rev(s2)
    back = blue_yellow_match(rt2, rs2, delta, p, m_rev, b_cap)
    x, y = back.meta["x"], back.meta["y"]
    ly = rs2.bit_range(OnesInterval(1 + delta, y))[0]
    la, lb = back.a, back.b - ly
    # a window head maps to the front of its half, so only head-free pairs reverse monotonically
    keep = (la != 1) & (lb != 1)
    end_t = _rev_window_map(t2, t2_off, L, 1, x, la[keep])
    end_s = _rev_window_map(s2, s2_off, L, 1 + delta, y, lb[keep])

    # ones strictly between the two trapezoids, zipped in order
    s_lo = int(init.a[-1]) if len(init) else 0
    t_lo = int(init.b[-1]) if len(init) else (int(t.ones[delta - 1]) if delta else 0)
    if len(end_s):
        s_hi, t_hi = int(end_s.min()), int(end_t.min())
    else:
        s_hi = int(s.ones[2 * L - delta]) if delta else len(s) + 1
        t_hi = len(t) + 1
    mid = _zip(s.one_positions(s_lo, s_hi - 1), t.one_positions(t_lo, t_hi - 1))

    out = Matching.concat([(init.a, init.b), mid, (end_s, end_t)], {
        "strategy": "blue-yellow-balanced", "delta": delta,
        "forward": init.meta["flags"], "backward": back.meta["flags"],
        "middle": len(mid[0])})
    return check_valid(out, s, t, "blue_yellow_balanced")


# -- block strategies and the shift sweep ---------------------------------

@dataclass
class StrategyResult:
    kind: str
    size: int
    delta: int
    m: int
    matching: Matching
    block_gains: dict
    baseline: int
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "size": self.size, "delta": self.delta, "m": self.m,
                "baseline": self.baseline,
                "block_gains": {str(k): v for k, v in sorted(self.block_gains.items())},
                "checks": self.checks, "matching": self.matching.to_json()}


def _block_pair(s, t, m, i):
    iv = OnesInterval.dyadic(m, i)
    return substring_ones(s, iv), substring_ones(t, iv)


BlockBuilder = Callable[[BitString, BitString, int, int], "Matching | None"]


def _block_builder(kind: str, p: ParamSet, ell, b_cap, by_m) -> BlockBuilder:
    if kind == "imbalanced":
        def build(sb, tb, d, i):
            if len(sb) != len(tb):
                return None
            return imbalanced_match(sb, tb)
    elif kind == "green":
        def build(sb, tb, d, i):
            length = ell(i) if callable(ell) else ell
            if length is None:
                return None
            return to_drop_local(green_match(sb, tb, length, d, p), sb, tb, d)
    elif kind == "blue-yellow":
        def build(sb, tb, d, i):
            mm = by_m(i) if callable(by_m) else (by_m or (0, 0))
            if mm is None:
                return None
            return to_drop_local(
                blue_yellow_balanced(sb, tb, d, p, mm[0], mm[1], b_cap), sb, tb, d)
    else:
        raise ValueError(f"unknown strategy kind {kind!r}")
    return build


def _shifts_for(kind: str, m: int, sweep_cap, samples, seed) -> list[int]:
    if kind == "imbalanced":
        return [0]
    if kind == "green":
        return shift_domain(-(2**m), 2**m, sweep_cap, samples, seed)
    return shift_domain(0, 2 ** (m - 1) // 4, sweep_cap, samples, seed)


def strategy_lcs_bound(kind: str, s: BitString, t: BitString, p: ParamSet,
                       m: int | None = None, Z=None, ell=None, b_cap=None, by_m=None,
                       sweep_cap: int = 2**16, samples: int = 4096,
                       seed: int = 0) -> StrategyResult:
    """Best stitched matching for one strategy over a block set.

    Blocks are ``s_{m,i}`` / ``t_{m,i}``; ``Z`` defaults to all of them and
    only blocks that beat their ones matching are spliced in. ``ell`` (Green)
    and ``by_m`` (Blue-Yellow, pair of 2^m floors) may be callables of the
    block index returning None to skip the block.
    """
    L = s.n_ones
    if t.n_ones != L:
        raise ValueError("strategy_lcs_bound needs equal ones-counts")
    n = _power_of_two_exponent(L)
    m = n if m is None else m
    if not 0 <= m <= n or (kind == "blue-yellow" and m < 1):
        raise ValueError(f"scale m={m} not usable for {kind}")
    if kind == "green" and ell is None:
        raise ValueError("green strategy needs a flag length (or per-block callable)")
    Z = list(range(1, 2 ** (n - m) + 1)) if Z is None else sorted(set(Z))
    build = _block_builder(kind, p, ell, b_cap, by_m)
    blocks = {i: _block_pair(s, t, m, i) for i in Z}
    checks = _strategy_checks(kind, s, t, p, n, m, Z)

    best = None
    for d in _shifts_for(kind, m, sweep_cap, samples, seed):
        chosen, total = {}, L - abs(d)
        for i, (sb, tb) in blocks.items():
            if d == 0 and sb == tb:
                bm = identity_match(sb)
            else:
                try:
                    bm = build(sb, tb, d, i)
                except ValueError as exc:
                    checks.setdefault("skipped", {})[str(i)] = str(exc)
                    bm = None
            if bm is None:
                continue
            gain = bm.size - (2**m - abs(d))
            if gain > 0:
                chosen[i] = (bm, gain)
                total += gain
        key = _shift_key(total, d)
        if best is None or key > best[0]:
            best = (key, d, chosen)
    _, d, chosen = best
    mt = stitch(s, t, m, d, list(chosen), {i: v[0] for i, v in chosen.items()})
    mt = mt.with_meta(strategy=kind, blocks=sorted(chosen), params=p.snapshot())
    return StrategyResult(kind, mt.size, d, m, mt, {i: v[1] for i, v in chosen.items()},
                          baseline=L, checks=checks)


def _strategy_checks(kind, s, t, p, n, m, Z) -> dict:
    """Decidable hypotheses of the combining bounds, reported not enforced."""
    nblocks = 2 ** (n - m)
    checks = {"block_fraction_ok": 10 * len(Z) >= nblocks,
              "equal_lengths": len(s) == len(t)}
    if kind == "green":
        eps5 = p.epsilon**5
        checks["scale_ok"] = m <= n - 10 - math.log2(1 / eps5)
    elif kind == "blue-yellow":
        checks["scale_ok"] = m - 1 <= n - 10 - math.log2(1 / p.epsilon)
    return checks
