"""Seeded generators for planted test instances."""

from __future__ import annotations

import random
from fractions import Fraction

from lcsflags.bitstring import BitString
from lcsflags.flags import ParamSet

# eps = 1/2 keeps the Green threshold reachable; gamma = 1/50 admits gamma*L caps
MOTIF_PARAMS = ParamSet.scaled(Fraction(1, 2), Fraction(1, 50), strict=False)
MOTIF_UNITS = ["100", "1", "10"]
MOTIF_N0 = 3
MOTIF_WINDOW = (6, 8)


def motif_pair(seed: int, L: int = 1024) -> tuple[BitString, BitString]:
    """A 16-unit motif and a shuffle of it, each repeated to ``L`` ones.

    Every block at scale >= 4 holds whole periods, so both strings carry the
    same zero counts there.
    """
    rnd = random.Random(seed)
    mot = [rnd.choice(MOTIF_UNITS) for _ in range(16)]
    mot2 = mot[:]
    rnd.shuffle(mot2)
    return BitString("".join(mot * (L // 16))), BitString("".join(mot2 * (L // 16)))


def run_string(rnd: random.Random, L: int, runs=(0, 0, 1, 1, 2, 3, 8)) -> BitString:
    return BitString("".join("1" + "0" * rnd.choice(runs) for _ in range(L)))


def swap_planted(rnd: random.Random, L: int = 32) -> tuple[BitString, BitString]:
    """``w`` and ``w`` with one interior ``10`` replaced by ``01``."""
    w = run_string(rnd, L)
    b = w.bits
    idx = [k for k in range(1, len(b) - 1) if b[k:k + 2] == "10"]
    k = rnd.choice(idx)
    return w, BitString(b[:k] + "01" + b[k + 2:])


def green_planted(rnd: random.Random, L: int, ell: int, regions: int,
                  eps: Fraction = Fraction(1, 10)) -> tuple[BitString, BitString]:
    """Two strings with ``regions`` synchronized runs of zero-rich gaps.

    Outside the planted runs gaps hold 0 or 1 zeros independently; inside,
    both strings get between 2 and 4 zeros per gap, so each run start is a
    Green ``ell``-flag in both (rate above 1 + 2 eps, below 1/eps).
    """
    starts = sorted(rnd.sample(range(0, L - ell, ell), regions))
    rich = set()
    for a in starts:
        rich.update(range(a, a + ell))

    def one() -> str:
        return "".join("1" + "0" * (rnd.randint(2, 4) if g in rich else rnd.randint(0, 1))
                       for g in range(L))
    return BitString(one()), BitString(one())
