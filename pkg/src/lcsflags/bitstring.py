"""Binary strings indexed by their one-bits.

All positions handed out by this module are 1-based, matching the
convention used for ones-indices: the substring ``w_I`` of ``w`` for
``I = [x, y]`` runs from the ``x``-th one (inclusive) to the ``(y+1)``-st
one (exclusive), clamping at either end of the string.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    def __init__(self, offset: int, char: str, line: int | None = None):
        where = f"offset {offset}" if line is None else f"line {line}, offset {offset}"
        super().__init__(f"invalid character {char!r} at {where}")
        self.offset = offset
        self.char = char
        self.line = line


@dataclass(frozen=True, order=True)
class OnesInterval:
    """Integer interval ``[x, y]`` of ones-indices."""

    x: int
    y: int

    def __post_init__(self):
        if self.x > self.y:
            raise ValueError(f"empty interval [{self.x}, {self.y}]")

    @property
    def size(self) -> int:
        return self.y - self.x + 1

    @classmethod
    def from_reals(cls, x, y) -> "OnesInterval":
        """``[x, y]`` as the integer set ``[ceil(x), floor(y)]``."""
        lo, hi = ceil_exact(x), floor_exact(y)
        return cls(lo, hi)

    @classmethod
    def dyadic(cls, m: int, i: int) -> "OnesInterval":
        if m < 0 or i < 1:
            raise ValueError("dyadic interval needs m >= 0 and i >= 1")
        return cls((i - 1) * 2**m + 1, i * 2**m)


def ceil_exact(v) -> int:
    # Fraction-aware so (0.5 + eps/100) * L rounds without float drift
    return math.ceil(Fraction(v))


def floor_exact(v) -> int:
    return math.floor(Fraction(v))


class BitString:
    """Immutable binary string with a ones index and zero prefix sums.

    ``ones[k]`` is the 1-based position of the ``(k+1)``-st one and
    ``zero_prefix[k]`` is the number of zeros among the first ``k`` bits.
    """

    __slots__ = ("bits", "ones", "zero_prefix", "__dict__")

    def __init__(self, bits: str):
        self.bits = bits
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        self.ones = (np.flatnonzero(arr) + 1).astype(np.int64)
        zp = np.zeros(len(bits) + 1, dtype=np.int64)
        np.cumsum(1 - arr.astype(np.int64), out=zp[1:])
        self.zero_prefix = zp
        self.ones.setflags(write=False)
        self.zero_prefix.setflags(write=False)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits

    def __repr__(self) -> str:
        if len(self.bits) > 40:
            return f"BitString({self.bits[:37]!r}...)"
        return f"BitString({self.bits!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, BitString):
            return self.bits == other.bits
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.bits)

    def __getitem__(self, pos: int) -> str:
        """Bit at 1-based position ``pos``."""
        if not 1 <= pos <= len(self.bits):
            raise IndexError(pos)
        return self.bits[pos - 1]

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def n_ones(self) -> int:
        return len(self.ones)

    @property
    def n_zeros(self) -> int:
        return int(self.zero_prefix[-1])

    @cached_property
    def zeros_before_one(self) -> np.ndarray:
        """``c[k]`` = zeros before the ``k``-th one, ``c[L+1]`` = all zeros.

        Index 0 is unused. ``z(w_[x,y]) = c[min(y+1, L+1)] - c[x]`` for
        ``1 <= x <= y``, ``x <= L``.
        """
        c = np.empty(self.n_ones + 2, dtype=np.int64)
        c[0] = 0
        c[1:-1] = self.zero_prefix[self.ones - 1]
        c[-1] = self.n_zeros
        c.setflags(write=False)
        return c

    @cached_property
    def array(self) -> np.ndarray:
        """Bits as a read-only uint8 array (index 0 is position 1)."""
        arr = np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) - ord("0")
        arr.setflags(write=False)
        return arr

    @cached_property
    def zeros(self) -> np.ndarray:
        """1-based positions of the zero bits."""
        z = (np.flatnonzero(self.array == 0) + 1).astype(np.int64)
        z.setflags(write=False)
        return z

    def zero_positions(self, lo: int, hi: int) -> np.ndarray:
        """1-based zero positions inside the 0-based slice ``[lo, hi)``."""
        return self.zeros[self.zero_prefix[lo]:self.zero_prefix[hi]]

    def one_positions(self, lo: int, hi: int) -> np.ndarray:
        a, b = np.searchsorted(self.ones, [lo + 1, hi + 1])
        return self.ones[a:b]

    @cached_property
    def as_int(self) -> int:
        """Bits packed into an int, position 1 at bit 0."""
        if not self.bits:
            return 0
        return int(self.bits[::-1], 2)

    def starts_with_one(self) -> bool:
        return self.bits[:1] == "1"

    def bit_range(self, interval: OnesInterval) -> tuple[int, int]:
        """0-based half-open ``[lo, hi)`` slice of ``bits`` holding ``w_I``."""
        x, y = interval.x, interval.y
        L = self.n_ones
        if x <= 0:
            lo = 0
        elif x <= L:
            lo = int(self.ones[x - 1]) - 1
        else:
            lo = len(self.bits)
        if y + 1 <= 0:
            hi = 0  # the k-th one for k <= 0 sits before position 1
        elif y + 1 <= L:
            hi = int(self.ones[y]) - 1
        else:
            hi = len(self.bits)
        return lo, max(lo, hi)

    def zeros_between(self, lo: int, hi: int) -> int:
        return int(self.zero_prefix[hi] - self.zero_prefix[lo])


def from_text(text: str) -> BitString:
    for offset, ch in enumerate(text, start=1):
        if ch != "0" and ch != "1":
            raise ParseError(offset, ch)
    return BitString(text)


def zeros_in(w: BitString, interval: OnesInterval) -> int:
    lo, hi = w.bit_range(interval)
    return w.zeros_between(lo, hi)


def substring_ones(w: BitString, interval: OnesInterval) -> BitString:
    lo, hi = w.bit_range(interval)
    return BitString(w.bits[lo:hi])


def dyadic(w: BitString, m: int, i: int) -> BitString:
    return substring_ones(w, OnesInterval.dyadic(m, i))


def rev(w: BitString) -> BitString:
    """Keep the first bit, reverse the rest."""
    if not w.starts_with_one():
        raise ValueError("rev is only defined for strings starting with a one")
    return BitString(w.bits[0] + w.bits[:0:-1])


def rev_position(pos: int, length: int) -> int:
    """Where 1-based position ``pos`` of ``w`` lands in ``rev(w)``."""
    return 1 if pos == 1 else length + 2 - pos


def drop_interval(n_ones: int, delta: int) -> OnesInterval | None:
    """Ones interval kept by a drop of ``delta``; None if nothing is kept."""
    lo, hi = max(1, 1 - delta), min(n_ones, n_ones - delta)
    if lo > hi:
        return None
    return OnesInterval(lo, hi)


def drop(w: BitString, delta: int) -> BitString:
    """Prefix (delta >= 0) or suffix (delta < 0) losing ``|delta|`` ones."""
    L = w.n_ones
    if abs(delta) > L:
        raise ValueError(f"|delta|={abs(delta)} exceeds the {L} ones of w")
    interval = drop_interval(L, delta)
    if interval is None:
        return BitString("")
    return substring_ones(w, interval)


def drop_range(w: BitString, delta: int) -> tuple[int, int]:
    """0-based half-open bit slice of ``drop(w, delta)`` inside ``w``."""
    interval = drop_interval(w.n_ones, delta)
    if interval is None:
        return 0, 0
    return w.bit_range(interval)


def complement(w: BitString) -> BitString:
    return BitString(w.bits.translate(str.maketrans("01", "10")))


# -- text and packed containers ------------------------------------------

PACK_MAGIC = b"LCSB"
PACK_VERSION = 1


def read_text(path: str | Path) -> list[BitString]:
    out = []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            try:
                out.append(from_text(line.strip()))
            except ParseError as exc:
                raise ParseError(exc.offset, exc.char, lineno) from None
    return out


def write_text(path: str | Path, strings: Iterable[BitString]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for w in strings:
            fh.write(w.bits + "\n")


def pack(strings: Sequence[BitString]) -> bytes:
    """Packed container: magic, version, count, then per string a u64
    length and ``ceil(length/8)`` payload bytes, LSB-first within a byte."""
    chunks = [PACK_MAGIC, struct.pack("<HI", PACK_VERSION, len(strings))]
    for w in strings:
        arr = np.frombuffer(w.bits.encode("ascii"), dtype=np.uint8) - ord("0")
        chunks.append(struct.pack("<Q", len(w)))
        chunks.append(np.packbits(arr, bitorder="little").tobytes())
    return b"".join(chunks)


def unpack(data: bytes) -> list[BitString]:
    if data[:4] != PACK_MAGIC:
        raise ValueError("not a packed bitstring container")
    version, count = struct.unpack_from("<HI", data, 4)
    if version != PACK_VERSION:
        raise ValueError(f"unsupported container version {version}")
    offset = 10
    out = []
    for _ in range(count):
        (length,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        nbytes = (length + 7) // 8
        payload = np.frombuffer(data, dtype=np.uint8, count=nbytes, offset=offset)
        offset += nbytes
        bits = np.unpackbits(payload, bitorder="little")[:length]
        out.append(BitString((bits + ord("0")).tobytes().decode("ascii")))
    if offset != len(data):
        raise ValueError("trailing bytes after packed container")
    return out


def read_any(path: str | Path) -> list[BitString]:
    """Read either container format, sniffing the magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == PACK_MAGIC:
        return unpack(path.read_bytes())
    return read_text(path)

