"""Bit sources for experiments: MT19937, AES-128 counter mode, files.

All sources serialize words MSB-first. Experiments draw sequence ``i`` from a
source instance derived from the base seed and the global sequence index, so
output never depends on how work is scheduled.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from vpstest.bitseq import BitSequence, PmSequence

_N, _M = 624, 397


class InsufficientDataError(ValueError):
    """A file source ran out of bits."""

_MATRIX_A = np.uint32(0x9908B0DF)
_UPPER = np.uint32(0x80000000)
_LOWER = np.uint32(0x7FFFFFFF)


class MT19937Batch:
    """Independent MT19937 streams, one per seed, advanced in lockstep.

    Seeding is the reference ``init_genrand`` recurrence; output is the
    standard tempered 32-bit word sequence.
    """

    def __init__(self, seeds):
        seeds = np.asarray(seeds, dtype=np.uint64)
        if seeds.ndim != 1:
            raise ValueError("seeds must be one-dimensional")
        if np.any(seeds > 0xFFFFFFFF):
            raise ValueError("MT19937 seeds must be 32-bit unsigned integers")
        mt = np.empty((seeds.size, _N), dtype=np.uint32)
        mt[:, 0] = seeds.astype(np.uint32)
        with np.errstate(over="ignore"):
            for i in range(1, _N):
                prev = mt[:, i - 1]
                mt[:, i] = np.uint32(1812433253) * (prev ^ (prev >> np.uint32(30))) + np.uint32(i)
        self._mt = mt
        self._pos = _N

    def _twist(self):
        mt = self._mt
        # new mt[i] needs old mt[i+1] and mt[(i+397) % 624]; the latter is
        # already regenerated for i >= 227, hence the staged slices
        for lo, hi in ((0, 227), (227, 454), (454, 623)):
            y = (mt[:, lo:hi] & _UPPER) | (mt[:, lo + 1 : hi + 1] & _LOWER)
            src = mt[:, (lo + _M) % _N : (hi + _M - 1) % _N + 1]
            mt[:, lo:hi] = src ^ (y >> np.uint32(1)) ^ ((y & np.uint32(1)) * _MATRIX_A)
        y = (mt[:, 623] & _UPPER) | (mt[:, 0] & _LOWER)
        mt[:, 623] = mt[:, _M - 1] ^ (y >> np.uint32(1)) ^ ((y & np.uint32(1)) * _MATRIX_A)
        self._pos = 0

    def words(self, count: int) -> np.ndarray:
        """Next ``count`` tempered outputs per stream, shape ``(streams, count)``."""
        out = np.empty((self._mt.shape[0], count), dtype=np.uint32)
        filled = 0
        while filled < count:
            if self._pos == _N:
                self._twist()
            take = min(count - filled, _N - self._pos)
            out[:, filled : filled + take] = self._mt[:, self._pos : self._pos + take]
            self._pos += take
            filled += take
        y = out
        y ^= y >> np.uint32(11)
        y ^= (y << np.uint32(7)) & np.uint32(0x9D2C5680)
        y ^= (y << np.uint32(15)) & np.uint32(0xEFC60000)
        y ^= y >> np.uint32(18)
        return y


def _words_to_bits(words: np.ndarray, count: int) -> np.ndarray:
    """MSB-first bit expansion of uint32 rows, truncated to ``count`` bits."""
    be = np.ascontiguousarray(words.astype(">u4"))
    return np.unpackbits(be.view(np.uint8).reshape(words.shape[0], -1), axis=1)[:, :count]


def mt19937_words(seed: int, count: int) -> np.ndarray:
    return MT19937Batch([seed]).words(count)[0]


def mt19937_bits(seed: int, count: int) -> BitSequence:
    if count < 1:
        raise ValueError("count must be positive")
    return BitSequence.from_bits(mt19937_bit_matrix([seed], count)[0])


def mt19937_bit_matrix(seeds, count: int) -> np.ndarray:
    """One row of ``count`` bits per seed (``uint8`` 0/1)."""
    words = MT19937Batch(seeds).words((count + 31) // 32)
    return _words_to_bits(words, count)


def aes_ctr_keystream(key: bytes, counter0: int, nbytes: int) -> bytes:
    """AES-128 encryptions of counter0, counter0 + 1, ... (128-bit big-endian, wrapping)."""
    if len(key) != 16:
        raise ValueError("AES-128 key must be 16 bytes")
    nonce = (counter0 % (1 << 128)).to_bytes(16, "big")
    enc = Cipher(algorithms.AES(key), modes.CTR(nonce)).encryptor()
    return enc.update(bytes(nbytes)) + enc.finalize()


def aes_ctr_bits(key: bytes, counter0: int, count: int) -> BitSequence:
    if count < 1:
        raise ValueError("count must be positive")
    stream = aes_ctr_keystream(key, counter0, (count + 7) // 8)
    return BitSequence.from_bits(np.unpackbits(np.frombuffer(stream, dtype=np.uint8), count=count))


@dataclass(frozen=True)
class GeneratorSpec:
    """Identity of a bit source.

    ``kind`` is ``"mt19937"`` (uses ``seed``), ``"aes_ctr"`` (uses ``key`` and
    ``counter``) or ``"file"`` (uses ``path`` and ``file_format``).
    """

    kind: str = "mt19937"
    seed: int = 0
    key: bytes = bytes(16)
    counter: int = 0
    path: Optional[str] = None
    file_format: str = "raw_msb_first"

    def __post_init__(self):
        if self.kind not in ("mt19937", "aes_ctr", "file"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ValueError("file generator needs a path")
        if self.kind == "aes_ctr" and len(self.key) != 16:
            raise ValueError("AES-128 key must be 16 bytes")

    def sequences(self, start: int, count: int, n: int) -> np.ndarray:
        """Bits of sequences ``start .. start + count - 1``, shape ``(count, n)``.

        mt19937: sequence i uses seed ``(seed + i) mod 2^32``.
        aes_ctr: sequence i is the keystream starting at block
            ``counter + i * ceil(n / 128)``, i.e. consecutive slices of one stream.
        file: sequence i is bits ``[i n, (i + 1) n)`` of the file.
        """
        if count < 0 or start < 0 or n < 1:
            raise ValueError("invalid sequence range")
        if self.kind == "mt19937":
            seeds = (self.seed + np.arange(start, start + count, dtype=np.uint64)) % (1 << 32)
            return mt19937_bit_matrix(seeds, n)
        if self.kind == "aes_ctr":
            blocks = (n + 127) // 128
            stream = aes_ctr_keystream(self.key, self.counter + start * blocks, 16 * blocks * count)
            raw = np.frombuffer(stream, dtype=np.uint8).reshape(count, 16 * blocks)
            return np.unpackbits(raw, axis=1)[:, :n]
        return _file_sequences(self.path, self.file_format, start, count, n)


def _file_sequences(path: str, fmt: str, start: int, count: int, n: int) -> np.ndarray:
    if fmt == "raw_msb_first":
        first, last = start * n, (start + count) * n
        byte0 = first // 8
        with open(path, "rb") as fh:
            fh.seek(byte0)
            data = fh.read((last + 7) // 8 - byte0)
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[first - 8 * byte0 :]
    elif fmt == "ascii01":
        with open(path, "rb") as fh:
            buf = np.frombuffer(fh.read(), dtype=np.uint8)
        buf = buf[(buf == ord("0")) | (buf == ord("1"))]
        bits = (buf[start * n : (start + count) * n] - ord("0")).astype(np.uint8)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if bits.size < count * n:
        raise InsufficientDataError(
            f"{os.fspath(path)}: not enough data for sequences {start}..{start + count - 1} of {n} bits"
        )
    return bits[: count * n].reshape(count, n)


@dataclass(frozen=True)
class PeriodicDefect:
    """Overwrite ``x_i = -1`` for ``i = 0 mod 2T`` and ``x_i = +1`` for ``i = T mod 2T``."""

    T: int

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("period parameter T must be >= 1")

    def apply(self, values: np.ndarray) -> np.ndarray:
        """In-place on the last axis of a +/-1 array; returns it."""
        n = values.shape[-1]
        if 2 * self.T > n:
            raise ValueError(f"defect period 2T={2 * self.T} exceeds n={n}")
        values[..., self.T :: 2 * self.T] = 1
        values[..., 0 :: 2 * self.T] = -1
        return values


def inject_periodic(x: PmSequence, T: int) -> PmSequence:
    """Copy of ``x`` with the period-2T defect written in (0-based indices)."""
    return PmSequence(PeriodicDefect(T).apply(x.values.copy()))
