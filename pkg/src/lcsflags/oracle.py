"""Exact LCS: bit-parallel length, witness extraction, and a tiny-input reference.

The bit-parallel kernel keeps one row of the DP as a Python int ``V`` over
the positions of ``t``; a zero bit at ``j`` marks a unit step of the row.
After feeding ``k`` characters of ``s``, ``LCS(s[:k], t[:j])`` is the number
of zero bits of ``V`` below ``j``. Python ints give arbitrary word size, and
each step costs ``O(|t| / 64)`` machine words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstring import BitString
from .matching import Matching

DEFAULT_BUDGET_CELLS = 1 << 28
NAIVE_MAX_LEN = 14


class BudgetExceeded(MemoryError):
    def __init__(self, cells: int, budget: int):
        super().__init__(f"{cells} DP cells exceed the budget of {budget}")
        self.cells = cells
        self.budget = budget


@dataclass(frozen=True)
class LcsResult:
    length: int
    witness: Matching

    def to_json(self) -> dict:
        return {"length": self.length, "witness": self.witness.to_json()}


def _bits(w) -> str:
    return w.bits if isinstance(w, BitString) else str(w)


def _char_masks(t: str) -> dict[str, int]:
    masks = {}
    for ch in set(t):
        masks[ch] = int("".join("1" if c == ch else "0" for c in reversed(t)) or "0", 2)
    return masks


def _rows(s: str, t: str):
    """Yield ``V`` after each prefix of ``s`` (including the empty one)."""
    full = (1 << len(t)) - 1
    masks = _char_masks(t)
    v = full
    yield v
    for ch in s:
        u = v & masks.get(ch, 0)
        v = ((v + u) | (v - u)) & full
        yield v


def lcs_fast(s, t) -> int:
    s, t = _bits(s), _bits(t)
    if len(s) < len(t):
        s, t = t, s  # shorter string sets the word length
    if not t:
        return 0
    v = None
    for v in _rows(s, t):
        pass
    return len(t) - v.bit_count()


def lcs_prefix_row(s, t) -> list[int]:
    """``LCS(s, t[:j])`` for ``j = 0..|t|``."""
    s, t = _bits(s), _bits(t)
    v = None
    for v in _rows(s, t):
        pass
    out, acc = [0], 0
    for j in range(len(t)):
        acc += 0 if (v >> j) & 1 else 1
        out.append(acc)
    return out


def lcs_exact(s, t, budget_cells: int = DEFAULT_BUDGET_CELLS) -> LcsResult:
    """Exact LCS with the lexicographically earliest witness pair list.

    Keeps every DP row of the reversed problem in bit-packed form
    (``|s| * |t| / 8`` bytes), then walks forward greedily: the next pair is
    the smallest ``a``, then the smallest ``b``, that still leaves an optimal
    completion.
    """
    s, t = _bits(s), _bits(t)
    cells = len(s) * len(t)
    if cells > budget_cells:
        raise BudgetExceeded(cells, budget_cells)
    N, M = len(s), len(t)
    if not N or not M:
        return LcsResult(0, Matching(meta={"strategy": "exact"}))
    # row k of the reversed problem: suffix s[N-k:] against suffixes of t
    rows = list(_rows(s[::-1], t[::-1]))

    def suffix_lcs(a: int, b: int) -> int:
        """LCS(s[a:], t[b:]) for 0-based a, b."""
        if a >= N or b >= M:
            return 0
        low = (1 << (M - b)) - 1
        return (M - b) - (rows[N - a] & low).bit_count()

    k = suffix_lcs(0, 0)
    nxt = {ch: _next_table(t, ch) for ch in "01"}
    pa, pb = [], []
    a, b = 0, 0
    while k > 0:
        # smallest a whose earliest partner b still allows k-1 more pairs
        while True:
            ch = s[a]
            bb = nxt[ch][b] if ch in nxt else M
            if bb < M and suffix_lcs(a + 1, bb + 1) == k - 1:
                break
            a += 1
        pa.append(a + 1)
        pb.append(bb + 1)
        a, b, k = a + 1, bb + 1, k - 1
    return LcsResult(len(pa), Matching(np.array(pa, dtype=np.int64),
                                       np.array(pb, dtype=np.int64),
                                       {"strategy": "exact"}))


def _next_table(t: str, ch: str) -> list[int]:
    """``nxt[b]`` = smallest ``j >= b`` with ``t[j] == ch``, else ``len(t)``."""
    out = [len(t)] * (len(t) + 1)
    for j in range(len(t) - 1, -1, -1):
        out[j] = j if t[j] == ch else out[j + 1]
    return out


def lcs_naive(s, t) -> int:
    """Plain recursion, no memo; only for strings of length <= 14."""
    s, t = _bits(s), _bits(t)
    if len(s) > NAIVE_MAX_LEN or len(t) > NAIVE_MAX_LEN:
        raise ValueError(f"lcs_naive is limited to length {NAIVE_MAX_LEN}")
    return _naive(s, t)


def _naive(s: str, t: str) -> int:
    if not s or not t:
        return 0
    if s[0] == t[0]:
        return 1 + _naive(s[1:], t[1:])
    return max(_naive(s[1:], t), _naive(s, t[1:]))
