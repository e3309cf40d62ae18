"""Tables of statistics, collision search over a code, and the case-analysis
pipeline that turns a colliding pair into a long common subsequence.

Two strings whose tables agree have equal zero counts on every dyadic block
at scales ``m >= n0``, equal block types, and the same maximal family of
disjoint imbalanced intervals at the same bit positions. The pipeline uses
exactly that agreement to line the strings up block by block.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .bitstring import BitString, OnesInterval, complement, rev, rev_position, substring_ones
from .flags import ParamSet, b_values
from .matching import (Matching, check_valid, identity_match, imbalanced_match,
                       naive_match, strategy_lcs_bound)
from .regularity import is_balanced
from .structure import EXACT, StringType, classify, imbalanced_rows

TABLE_SCHEMA = 1
EXACT_FAMILY_MAX_L = 2**12


def default_n0(n: int, p: ParamSet) -> int:
    return max(0, math.ceil(n - p.n0_shift(n)))


@dataclass(frozen=True)
class FamilyInterval:
    x: int
    y: int
    bit_start: int  # 1-based first bit of w_I
    bit_end: int  # 1-based last bit of w_I
    zeros: int


@dataclass(frozen=True)
class StatisticsTable:
    L: int
    n0: int
    mode: str
    family_mode: str
    params: tuple
    blocks: tuple  # (m, i, zeros, ones, type label or None)
    family: tuple[FamilyInterval, ...]

    def to_json(self) -> dict:
        return {
            "schema": TABLE_SCHEMA,
            "L": self.L, "n0": self.n0, "mode": self.mode,
            "family_mode": self.family_mode,
            "params": dict(self.params),
            "blocks": [{"m": m, "i": i, "zeros": z, "ones": o,
                        "type": None if ty is None else ty.to_json()}
                       for m, i, z, o, ty in self.blocks],
            "family": [{"x": f.x, "y": f.y, "bit_start": f.bit_start,
                        "bit_end": f.bit_end, "zeros": f.zeros} for f in self.family],
        }

    @cached_property
    def _canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def canonical(self) -> str:
        return self._canonical

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def block_type(self, m: int, i: int) -> StringType | None:
        for bm, bi, _, _, ty in self.blocks:
            if bm == m and bi == i:
                return ty
        raise KeyError((m, i))


def tables_equal(a: StatisticsTable, b: StatisticsTable) -> bool:
    return a.canonical() == b.canonical()


def table_diff(a: StatisticsTable, b: StatisticsTable) -> list[str]:
    """Human-readable list of fields on which two tables disagree."""
    out = []
    for name in ("L", "n0", "mode", "family_mode", "params"):
        if getattr(a, name) != getattr(b, name):
            out.append(name)
    for ra, rb in zip(a.blocks, b.blocks):
        if ra != rb:
            out.append(f"block m={ra[0]} i={ra[1]}: {_fmt_block(ra)} vs {_fmt_block(rb)}")
    if len(a.blocks) != len(b.blocks):
        out.append("block count")
    if a.family != b.family:
        out.append("imbalanced family")
    return out


def _fmt_block(row) -> str:
    ty = "untyped" if row[4] is None else str(row[4])
    return f"zeros={row[2]} ones={row[3]} {ty}"


def _power_of_two(w: BitString) -> int:
    L = w.n_ones
    if L < 1 or L & (L - 1):
        raise ValueError(f"ones-count {L} is not a power of two")
    return L.bit_length() - 1


def imbalanced_family(w: BitString, min_size: int, delta, exact: bool | None = None):
    """Disjoint delta-imbalanced ones-intervals of size >= ``min_size``.

    Exact mode maximises the total size by DP and returns the
    lexicographically smallest optimal list. The greedy mode takes, from
    left to right, the longest imbalanced interval starting at each index.
    """
    L = w.n_ones
    delta = Fraction(delta)
    exact = L <= EXACT_FAMILY_MAX_L if exact is None else exact
    min_size = max(1, min_size)
    if not exact:
        out, x = [], 1
        while x + min_size - 1 <= L:
            y, _, below, above = imbalanced_rows(w, x, min_size, delta)
            hit = np.flatnonzero(below | above)
            if len(hit):
                yy = int(y[hit[-1]])
                out.append((x, yy))
                x = yy + 1
            else:
                x += 1
        return out, "greedy-maximal"

    g = np.zeros(L + 2, dtype=np.int64)
    rows = {}
    for x in range(L, 0, -1):
        g[x] = g[x + 1]
        if x + min_size - 1 > L:
            continue
        y, _, below, above = imbalanced_rows(w, x, min_size, delta)
        hit = below | above
        if hit.any():
            ys = y[hit]
            vals = (ys - x + 1) + g[ys + 1]
            rows[x] = (ys, vals)
            g[x] = max(g[x], int(vals.max()))
    out, cur = [], 1
    while cur <= L and g[cur] > 0:
        for x in range(cur, L + 1):
            if x in rows:
                ys, vals = rows[x]
                ok = np.flatnonzero(vals == g[cur])
                if len(ok):
                    yy = int(ys[ok[0]])
                    out.append((x, yy))
                    cur = yy + 1
                    break
        else:
            break
    return out, "exact-dp"


def statistics_table(w: BitString, p: ParamSet, n0_override: int | None = None,
                     mode: str = EXACT, exact_family: bool | None = None) -> StatisticsTable:
    n = _power_of_two(w)
    n0 = default_n0(n, p) if n0_override is None else max(0, min(n, n0_override))
    blocks = []
    for m in range(n0, n + 1):
        for i in range(1, 2 ** (n - m) + 1):
            sub = substring_ones(w, OnesInterval.dyadic(m, i))
            blocks.append((m, i, sub.n_zeros, sub.n_ones, classify(sub, p, mode)))
    pairs, fmode = imbalanced_family(w, 2**n0, p.epsilon, exact_family)
    family = []
    for x, y in pairs:
        lo, hi = w.bit_range(OnesInterval(x, y))
        family.append(FamilyInterval(x, y, lo + 1, hi, w.zeros_between(lo, hi)))
    params = tuple(sorted(p.snapshot().items()))
    return StatisticsTable(w.n_ones, n0, mode, fmode, params, tuple(blocks), tuple(family))


# -- collisions -----------------------------------------------------------

@dataclass
class CollisionReport:
    pair: tuple[int, int] | None
    keys: list[str]
    distinct: int
    capacity_log2: float

    def to_json(self) -> dict:
        return {"pair": None if self.pair is None else list(self.pair),
                "distinct_keys": self.distinct, "strings": len(self.keys),
                "capacity_log2": self.capacity_log2}


def collision_key(w: BitString, p: ParamSet, n0_override=None, mode: str = EXACT) -> str:
    flipped = not w.starts_with_one()
    v = complement(w) if flipped else w
    L = v.n_ones
    parts = {"flipped": flipped, "N": len(v), "L": L}
    if L >= 1:
        n = L.bit_length() - 1
        head = substring_ones(v, OnesInterval(1, 2**n))
        parts["table"] = statistics_table(head, p, n0_override, mode).digest()
        parts["rev_table"] = statistics_table(rev(head), p, n0_override, mode).digest()
    return json.dumps(parts, sort_keys=True)


def capacity_log2(N: int, p: ParamSet, n0_override=None) -> float:
    """Rough log2 count of possible collision keys for length-N strings."""
    if N < 2:
        return 1.0
    n = max(0, int(math.log2(N)))
    n0 = default_n0(n, p) if n0_override is None else n0_override
    blocks = 2 ** (n - n0 + 1) - 1
    type_bits = math.log2(2 + n + max(1, float(p.epsilon**5) * 2**n))
    per_table = blocks * (math.log2(N + 1) + type_bits) + 2 ** (n - n0) * 4 * math.log2(N + 1)
    return 1 + 2 * math.log2(N + 1) + 2 * per_table


def find_collision(code, p: ParamSet, n0_override=None, mode: str = EXACT) -> CollisionReport:
    seen: dict[str, int] = {}
    keys, pair = [], None
    for j, w in enumerate(code):
        k = collision_key(w, p, n0_override, mode)
        keys.append(k)
        if pair is None and k in seen:
            pair = (seen[k], j)
        seen.setdefault(k, j)
    N = max((len(w) for w in code), default=0)
    return CollisionReport(pair, keys, len(seen), capacity_log2(N, p, n0_override))


# -- pipeline -------------------------------------------------------------

class StatisticsMismatch(ValueError):
    def __init__(self, which: str, diff: list[str]):
        super().__init__(f"{which} tables disagree: " + "; ".join(diff[:5]))
        self.which = which
        self.diff = diff


@dataclass
class PipelineResult:
    matching: Matching
    case: str
    trace: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.matching.size

    def to_json(self) -> dict:
        return {"case": self.case, "size": self.size, "trace": self.trace,
                "matching": self.matching.to_json()}


def unrev_matching(mt: Matching, s: BitString, t: BitString) -> Matching:
    """Carry a matching of ``(rev s, rev t)`` back to ``(s, t)``."""
    a, b = mt.a.copy(), mt.b.copy()
    if len(a) and (a[0] == 1 or b[0] == 1):
        a[0], b[0] = 1, 1
    else:
        a, b = np.concatenate([[1], a]), np.concatenate([[1], b])
    ra = np.where(a == 1, 1, len(s) + 2 - a)
    rb = np.where(b == 1, 1, len(t) + 2 - b)
    return Matching(ra, rb, mt.meta).canonical()


def family_match(s: BitString, t: BitString, family) -> Matching:
    """Imbalanced matching on each family segment and on every gap between."""
    parts, s_at, t_at = [], 0, 0
    cuts = []
    for f in family:
        cuts.append((f.bit_start - 1, f.bit_end))
    for lo, hi in cuts + [(len(s), len(s))]:
        for (sl, sh) in ((s_at, lo), (lo, hi)):
            if sh <= sl:
                continue
            tl, th = sl - s_at + t_at, sh - s_at + t_at
            sb, tb = BitString(s.bits[sl:sh]), BitString(t.bits[tl:th])
            if len(sb) == len(tb) and sb.n_ones == tb.n_ones:
                mt = imbalanced_match(sb, tb)
            else:
                mt = naive_match(sb, tb, 0) if min(sb.n_ones, tb.n_ones) else Matching()
            parts.append((mt.a + sl, mt.b + tl))
        s_at = t_at = hi
    return Matching.concat(parts, {"strategy": "imbalanced-family",
                                   "family": [[f.x, f.y] for f in family]})


def _heavy(w: BitString, p: ParamSet, threshold: int) -> tuple[bool, int]:
    cnt = int((b_values(w, p) >= threshold).sum())
    g2 = p.gamma**2
    return cnt * g2.denominator >= g2.numerator * w.n_ones and cnt > 0, cnt


def scale_window(n: int, p: ParamSet) -> tuple[int, int]:
    delta = p.delta_main
    lo = math.ceil(n - p.scale_window(n))
    hi = math.floor(n - 10 - math.log2(1 / delta))
    return max(1, lo), hi


def _blocks(w: BitString, m: int):
    n = w.n_ones.bit_length() - 1
    return [substring_ones(w, OnesInterval.dyadic(m, i)) for i in range(1, 2 ** (n - m) + 1)]


def _bullets(s, t, m, p):
    beta = p.balance_beta
    out = {}
    for name, w, use_rev in (("s", s, False), ("rev_s", s, True),
                             ("t", t, False), ("rev_t", t, True)):
        out[name] = [is_balanced(rev(b) if use_rev else b, beta, p) for b in _blocks(w, m)]
    return out


def choose_scale(s, t, p: ParamSet, window=None):
    n = s.n_ones.bit_length() - 1
    lo, hi = window or scale_window(n, p)
    lo, hi = max(1, lo), min(n, hi)
    tried = []
    for m in range(hi, lo - 1, -1):
        bullets = _bullets(s, t, m, p)
        B = 2 ** (n - m)
        need = (1 - 3 * p.gamma) * B
        counts = {k: sum(v) for k, v in bullets.items()}
        ok = all(c >= need for c in counts.values())
        tried.append({"m": m, "balanced_counts": counts, "ok": ok})
        if ok:
            return m, bullets, {"window": [lo, hi], "tried": tried}
    return None, None, {"window": [lo, hi], "tried": tried}


def pipeline_lcs(s: BitString, t: BitString, p: ParamSet, n0_override=None,
                 window=None, mode: str = EXACT, b_cap=None, sweep_cap: int = 2**16,
                 seed: int = 0, check_tables: bool = True) -> PipelineResult:
    for name, w in (("s", s), ("t", t)):
        if not w.starts_with_one():
            raise ValueError(f"{name} must start with a one")
    n = _power_of_two(s)
    if t.n_ones != s.n_ones:
        raise ValueError("s and t must have the same ones-count")
    L = s.n_ones
    trace: dict = {"L": L, "n": n, "params": p.snapshot()}
    if s == t:
        return PipelineResult(identity_match(s), "identical", trace)

    ts, tt = (statistics_table(w, p, n0_override, mode) for w in (s, t))
    rs, rt = rev(s), rev(t)
    trs, trt = (statistics_table(w, p, n0_override, mode) for w in (rs, rt))
    if check_tables:
        if not tables_equal(ts, tt):
            raise StatisticsMismatch("forward", table_diff(ts, tt))
        if not tables_equal(trs, trt):
            raise StatisticsMismatch("reversed", table_diff(trs, trt))
    n0 = ts.n0
    trace["n0"] = n0

    def done(mt, case, s_, t_):
        mt = check_valid(mt.canonical(), s_, t_, f"pipeline case {case}")
        base = L
        trace["baseline"] = base
        trace["gain_over_ones"] = mt.size - base
        return PipelineResult(mt.with_meta(case=case), case, trace)

    thr = 2**n0
    heavy = {}
    for name, w in (("s", s), ("rev_s", rs), ("t", t), ("rev_t", rt)):
        flag, cnt = _heavy(w, p, thr)
        heavy[name] = {"heavy": flag, "count": cnt}
    trace["heavy_b"] = {"threshold": thr, **heavy}
    if heavy["s"]["heavy"] or heavy["t"]["heavy"]:
        return done(family_match(s, t, ts.family), "heavy-b", s, t)
    if heavy["rev_s"]["heavy"] or heavy["rev_t"]["heavy"]:
        mt = unrev_matching(family_match(rs, rt, trs.family), s, t)
        return done(mt, "heavy-b-rev", s, t)

    m, bullets, scan = choose_scale(s, t, p, window)
    trace["scale"] = scan
    if m is None:
        trace["diagnostic"] = "no scale in the window satisfies all four balance bullets"
        return done(naive_match(s, t, 0), "fallback", s, t)
    trace["m_star"] = m
    B = 2 ** (n - m)
    types = [classify(b, p, mode) for b in _blocks(s, m)]
    rtypes = [classify(rev(b), p, mode) for b in _blocks(s, m)]
    Z = {k: [i + 1 for i, ty in enumerate(tys) if ty is not None and ty.kind == kind]
         for k, (tys, kind) in {"Z1": (types, "imbalanced"), "Z1bar": (rtypes, "imbalanced"),
                                "Z2": (types, "green"), "Z2bar": (rtypes, "green"),
                                "Z3": (types, "blue-yellow"),
                                "Z3bar": (rtypes, "blue-yellow")}.items()}
    trace["block_sets"] = Z
    trace["untyped_blocks"] = sum(ty is None for ty in types)

    if 10 * len(Z["Z1"]) >= B:
        return done(family_match(s, t, ts.family), "1a", s, t)
    if 10 * len(Z["Z1bar"]) >= B:
        return done(unrev_matching(family_match(rs, rt, trs.family), s, t), "1b", s, t)
    if 10 * len(Z["Z2"]) >= B:
        ell = {i: types[i - 1].param for i in Z["Z2"]}
        res = strategy_lcs_bound("green", s, t, p, m=m, Z=Z["Z2"], ell=ell.get,
                                 sweep_cap=sweep_cap, seed=seed)
        trace["strategy"] = {"delta": res.delta, "block_gains": res.block_gains}
        return done(res.matching, "2a", s, t)
    if 10 * len(Z["Z2bar"]) >= B:
        # rev(s_{m,i}) is block B+1-i of rev(s)
        ell = {B + 1 - i: rtypes[i - 1].param for i in Z["Z2bar"]}
        res = strategy_lcs_bound("green", rs, rt, p, m=m, Z=list(ell), ell=ell.get,
                                 sweep_cap=sweep_cap, seed=seed)
        trace["strategy"] = {"delta": res.delta, "block_gains": res.block_gains}
        return done(unrev_matching(res.matching, s, t), "2b", s, t)
    if 5 * len(Z["Z3"]) >= 4 * B and 5 * len(Z["Z3bar"]) >= 4 * B and m < n:
        z3, z3b = set(Z["Z3"]), set(Z["Z3bar"])
        Zp, by_m = [], {}
        for i in range(1, B // 2 + 1):
            conds = (bullets["s"][2 * i - 2], bullets["t"][2 * i - 2],
                     bullets["rev_s"][2 * i - 1], bullets["rev_t"][2 * i - 1],
                     2 * i - 1 in z3, 2 * i in z3b)
            if all(conds):
                Zp.append(i)
                by_m[i] = (types[2 * i - 2].param, rtypes[2 * i - 1].param)
        trace["Z3prime"] = Zp
        res = strategy_lcs_bound("blue-yellow", s, t, p, m=m + 1, Z=Zp, by_m=by_m.get,
                                 b_cap=b_cap, sweep_cap=sweep_cap, seed=seed)
        trace["strategy"] = {"delta": res.delta, "block_gains": res.block_gains}
        return done(res.matching, "3", s, t)
    trace["diagnostic"] = "no case hypothesis holds at the chosen scale"
    return done(naive_match(s, t, 0), "fallback", s, t)
