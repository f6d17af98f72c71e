"""Bit sequences and their +/-1 view.

Bits are stored packed, MSB-first, in a ``uint8`` array. The +/-1 view is only
materialized when a statistic needs it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FORMATS = ("ascii01", "raw_msb_first")


@dataclass(frozen=True, eq=False)
class BitSequence:
    """An immutable string of ``n`` bits.

    ``packed`` holds ``ceil(n / 8)`` bytes, MSB-first; padding bits in the last
    byte are always zero and never exposed.
    """

    packed: np.ndarray
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("bit sequence must contain at least one bit")
        if self.packed.dtype != np.uint8 or self.packed.shape != ((self.n + 7) // 8,):
            raise ValueError("packed buffer does not match declared length")
        self.packed.flags.writeable = False

    @classmethod
    def from_bits(cls, bits) -> BitSequence:
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        return cls(np.packbits(arr.astype(np.uint8)), int(arr.size))

    @property
    def bits(self) -> np.ndarray:
        return np.unpackbits(self.packed, count=self.n)

    def popcount(self) -> int:
        return int(np.unpackbits(self.packed).sum())

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.packed, other.packed)

    def __hash__(self):
        return hash((self.n, self.packed.tobytes()))

    def __repr__(self):
        head = "".join(map(str, self.bits[:16]))
        return f"BitSequence(n={self.n}, bits={head}{'...' if self.n > 16 else ''})"


@dataclass(frozen=True, eq=False)
class PmSequence:
    """The +/-1 image of a bit sequence (``float64`` values)."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if not np.all(np.abs(self.values) == 1.0):
            raise ValueError("values must be +1 or -1")
        self.values.flags.writeable = False

    @classmethod
    def from_values(cls, values) -> PmSequence:
        return cls(np.array(values, dtype=np.float64))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PmSequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def to_pm1(x: BitSequence) -> PmSequence:
    """Map bits to +/-1 (0 -> -1, 1 -> +1)."""
    return PmSequence(2.0 * x.bits - 1.0)


def parse_bits(data: bytes, fmt: str, n: int) -> BitSequence:
    """Read the first ``n`` bits of ``data``.

    Args:
        data: raw bytes from a file or stream.
        fmt: ``"ascii01"`` (characters '0'/'1', whitespace ignored) or
            ``"raw_msb_first"`` (bit 7 of byte 0 comes first).
        n: number of bits to take.

    Raises:
        ValueError: on an unknown format, ``n < 1``, a stray character in
            ASCII input, or fewer than ``n`` bits available.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if fmt == "ascii01":
        buf = np.frombuffer(bytes(data), dtype=np.uint8)
        buf = buf[~np.isin(buf, np.frombuffer(b" \t\n\r\f\v", dtype=np.uint8))]
        bad = ~np.isin(buf, (ord("0"), ord("1")))
        if bad.any():
            pos = int(np.argmax(bad))
            raise ValueError(f"invalid character {chr(buf[pos])!r} in ASCII bit stream")
        if buf.size < n:
            raise ValueError(f"truncated input: need {n} bits, got {buf.size}")
        return BitSequence.from_bits(buf[:n] - ord("0"))
    if fmt == "raw_msb_first":
        nbytes = (n + 7) // 8
        if len(data) < nbytes:
            raise ValueError(f"truncated input: need {n} bits, got {8 * len(data)}")
        packed = np.frombuffer(bytes(data[:nbytes]), dtype=np.uint8).copy()
        if n % 8:
            packed[-1] &= (0xFF << (8 - n % 8)) & 0xFF
        return BitSequence(packed, n)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def serialize_bits(x: BitSequence, fmt: str) -> bytes:
    """Inverse of :func:`parse_bits` for either format."""
    if fmt == "ascii01":
        return (x.bits + ord("0")).astype(np.uint8).tobytes()
    if fmt == "raw_msb_first":
        return x.packed.tobytes()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
