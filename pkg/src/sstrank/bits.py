"""Packed bit rows: packing, unpacking and range popcounts."""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import U64, words_for


def tail_mask(nbits: int) -> np.uint64:
    rem = int(nbits) % 64
    return U64((1 << 64) - 1) if rem == 0 else U64((1 << rem) - 1)


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words, LSB first."""
    dense = np.asarray(dense)
    nbits = dense.shape[-1]
    nw = words_for(nbits)
    packed = np.packbits(dense.astype(bool), axis=-1, bitorder="little")
    pad = nw * 8 - packed.shape[-1]
    if pad:
        packed = np.concatenate(
            [packed, np.zeros(packed.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1
        )
    return np.ascontiguousarray(packed).view("<u8").astype(U64, copy=False)


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns uint8 0/1 with last axis ``nbits``."""
    words = np.ascontiguousarray(np.asarray(words, dtype=U64))
    as_bytes = words.astype("<u8", copy=False).view(np.uint8)
    return np.unpackbits(as_bytes, axis=-1, count=int(nbits), bitorder="little")


def popcount(words: np.ndarray) -> np.ndarray:
    """Set bits per row (sum over the last axis)."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def prefix_table(words: np.ndarray) -> np.ndarray:
    """Cumulative word popcounts with a leading zero: shape ``(..., W + 1)``."""
    counts = np.bitwise_count(words).astype(np.int64)
    out = np.zeros(words.shape[:-1] + (words.shape[-1] + 1,), dtype=np.int64)
    np.cumsum(counts, axis=-1, out=out[..., 1:])
    return out


def prefix_counts(words: np.ndarray, table: np.ndarray, positions) -> np.ndarray:
    """Number of set bits in columns ``[0, pos)`` for each position.

    Result shape is ``words.shape[:-1] + (len(positions),)``.
    """
    pos = np.asarray(positions, dtype=np.int64)
    q = pos // 64
    rem = pos % 64
    base = table[..., q]
    partial = rem > 0
    if np.any(partial):
        qi = q[partial]
        masks = (U64(1) << rem[partial].astype(U64)) - U64(1)
        extra = np.bitwise_count(words[..., qi] & masks).astype(np.int64)
        base = base.copy()
        base[..., partial] += extra
    return base


def segment_counts(words: np.ndarray, table: np.ndarray, bounds) -> np.ndarray:
    """Set bits in each half-open column range ``[bounds[j], bounds[j+1])``."""
    pc = prefix_counts(words, table, bounds)
    return np.diff(pc, axis=-1)


class PackedRows:
    """Immutable packed bit rows of a fixed length with a lazy prefix table."""

    __slots__ = ("words", "nbits", "_table")

    def __init__(self, words: np.ndarray, nbits: int, table: np.ndarray | None = None):
        words = np.asarray(words, dtype=U64)
        if words.shape[-1] != words_for(nbits):
            raise ValueError(
                f"expected {words_for(nbits)} words per row for {nbits} bits, got {words.shape[-1]}"
            )
        words.flags.writeable = False
        self.words = words
        self.nbits = int(nbits)
        self._table = table

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            t = prefix_table(self.words)
            t.flags.writeable = False
            self._table = t
        return self._table

    def __getitem__(self, idx) -> "PackedRows":
        tab = None if self._table is None else self._table[idx]
        return PackedRows(self.words[idx], self.nbits, tab)

    def counts(self) -> np.ndarray:
        return popcount(self.words)

    def segments(self, bounds) -> np.ndarray:
        return segment_counts(self.words, self.table, bounds)

    def dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.nbits)


_M1 = U64(0x5555555555555555)
_M2 = U64(0x3333333333333333)
_M4 = U64(0x0F0F0F0F0F0F0F0F)
_H01 = U64(0x0101010101010101)
_ALL = U64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def _popc(x):
    x = x - ((x >> U64(1)) & _M1)
    x = (x & _M2) + ((x >> U64(2)) & _M2)
    x = (x + (x >> U64(4))) & _M4
    return np.int64((x * _H01) >> U64(56))


@njit(cache=True, nogil=True)
def _segment_diff(xw, yw, bounds, out):
    rows = xw.shape[0]
    nseg = bounds.shape[0] - 1
    for i in range(rows):
        for j in range(nseg):
            a = bounds[j]
            b = bounds[j + 1]
            acc = np.int64(0)
            if b > a:
                wa = a >> 6
                wb = (b - 1) >> 6
                for w in range(wa, wb + 1):
                    m = _ALL
                    if w == wa:
                        m &= _ALL << U64(a - wa * 64)
                    hi = b - w * 64
                    if hi < 64:
                        m &= (U64(1) << U64(hi)) - U64(1)
                    acc += _popc(xw[i, w] & m) - _popc(yw[i, w] & m)
            out[i, j] = acc


def segment_diff(x: PackedRows, y: PackedRows, bounds) -> np.ndarray:
    """Per-segment ``count(x) - count(y)`` over column ranges; shape ``(..., len(bounds)-1)``."""
    bounds = np.ascontiguousarray(bounds, dtype=np.int64)
    lead = x.words.shape[:-1]
    xw = np.ascontiguousarray(x.words.reshape(-1, x.words.shape[-1]))
    yw = np.ascontiguousarray(y.words.reshape(-1, y.words.shape[-1]))
    out = np.empty((xw.shape[0], bounds.size - 1), dtype=np.int64)
    _segment_diff(xw, yw, bounds, out)
    return out.reshape(lead + (bounds.size - 1,))
