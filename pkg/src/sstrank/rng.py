"""Counter-based randomness.

Every random bit in the package is a pure function of a 64-bit key and a
counter, so a trial's samples and coin flips do not depend on how trials are
batched or scheduled. Keys are derived from ``(seed, stream_id)`` and then
split by integer tags.

Auxiliary draws that need a full-featured generator (permutations, vertex
choices) come from ``Stream.generator()``, a Philox generator keyed by the
stream key.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_MASK = (1 << 64) - 1
_GOLDEN_INT = 0x9E3779B97F4A7C15
_TAG_MUL_INT = 0xD6E8FEB86659FD93

GOLDEN = U64(_GOLDEN_INT)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_ALL = U64(_MASK)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_ONE = U64(1)
_ZERO = U64(0)


def mix_int(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, elementwise on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=U64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def derive_keys(base: np.ndarray, tag: int, count: int) -> np.ndarray:
    """Split each base key into ``count`` child keys labelled by ``tag``.

    ``base`` has any shape; the result has shape ``base.shape + (count,)``.
    """
    base = np.asarray(base, dtype=U64)
    salt = mix_array(
        U64((tag * _TAG_MUL_INT) & _MASK) + np.arange(count, dtype=U64) * GOLDEN
    )
    return mix_array(base[..., None] ^ salt)


def coin_bits(base: np.ndarray, tag: int, count: int) -> np.ndarray:
    """Fair 0/1 coins as int64, shape ``base.shape + (count,)``.

    Coin c is bit ``c % 64`` of derived word ``c // 64``.
    """
    base = np.asarray(base, dtype=U64)
    words = derive_keys(base, tag, (count + 63) // 64)
    as_bytes = np.ascontiguousarray(words).astype("<u8", copy=False).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, count=count, bitorder="little")
    return bits.astype(np.int64)


class Stream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    ``child(tag)`` gives an independent sub-stream; the derivation is
    deterministic so the same path of tags always yields the same key.
    """

    __slots__ = ("seed", "stream_id", "key")

    def __init__(self, seed: int, stream_id: int = 0, *, key: int | None = None):
        self.seed = int(seed) & _MASK
        self.stream_id = int(stream_id) & _MASK
        if key is None:
            key = stream_key(self.seed, self.stream_id)
        self.key = int(key) & _MASK

    def child(self, tag: int) -> "Stream":
        k = mix_int(self.key ^ mix_int((tag * _TAG_MUL_INT + 0x5851F42D4C957F2D) & _MASK))
        return Stream(self.seed, self.stream_id, key=k)

    def subkeys(self, tag: int, count: int) -> np.ndarray:
        return derive_keys(np.array([self.key], dtype=U64), tag, count)[0]

    def coins(self, tag: int, count: int) -> np.ndarray:
        return coin_bits(np.array([self.key], dtype=U64), tag, count)[0]

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key))

    def __repr__(self) -> str:
        return f"Stream(seed={self.seed}, stream_id={self.stream_id}, key={self.key:#018x})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Stream) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def stream_key(seed: int, stream_id: int) -> int:
    return mix_int(mix_int(seed ^ 0x2545F4914F6CDD1D) + (stream_id * _GOLDEN_INT))


def stream_keys(seed: int, stream_ids: np.ndarray) -> np.ndarray:
    """Vectorized ``Stream(seed, sid).key`` for an array of stream ids."""
    head = U64(mix_int(seed ^ 0x2545F4914F6CDD1D))
    ids = np.asarray(stream_ids, dtype=U64)
    return mix_array(head + ids * GOLDEN)


def child_keys(keys: np.ndarray, tag: int) -> np.ndarray:
    """Vectorized ``Stream.child(tag).key``."""
    salt = U64(mix_int((tag * _TAG_MUL_INT + 0x5851F42D4C957F2D) & _MASK))
    return mix_array(np.asarray(keys, dtype=U64) ^ salt)


def thresholds(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map probabilities to 64-bit thresholds ``floor(p * 2**64)``.

    Returns ``(threshold, full)``; ``full`` marks p >= 1, whose threshold does
    not fit in 64 bits. The scaling by a power of two is exact in float64.
    """
    p = np.clip(np.asarray(probs, dtype=np.float64), 0.0, 1.0)
    full = p >= 1.0
    scaled = np.floor(np.ldexp(np.where(full, 0.0, p), 64))
    return scaled.astype(U64), full


@njit(cache=True, nogil=True)
def _fill(thr, full, keys, nbits, out):
    rows, nw = out.shape
    tail = nbits - (nw - 1) * 64
    last_mask = _ALL if tail == 64 else (_ONE << U64(tail)) - _ONE
    for i in range(rows):
        t = thr[i]
        if full[i]:
            for w in range(nw):
                out[i, w] = _ALL
            out[i, nw - 1] = last_mask
            continue
        if t == _ZERO:
            for w in range(nw):
                out[i, w] = _ZERO
            continue
        low = 0
        while ((t >> U64(low)) & _ONE) == _ZERO:
            low += 1
        k = keys[i]
        for w in range(nw):
            # Compare 64 uniform 64-bit numbers against t at once, one bit
            # plane per step, most significant first. A lane is decided once
            # its plane bit differs from t's bit.
            und = _ALL
            acc = _ZERO
            ctr = U64(w) * U64(64)
            for b in range(63, low - 1, -1):
                r = _mix(k + (ctr + U64(63 - b)) * GOLDEN)
                if (t >> U64(b)) & _ONE:
                    acc |= und & ~r
                    und &= r
                else:
                    und &= ~r
                if und == _ZERO:
                    break
            out[i, w] = acc
        out[i, nw - 1] &= last_mask


def words_for(nbits: int) -> int:
    return max(1, (int(nbits) + 63) // 64)


def bernoulli_words(probs: np.ndarray, keys: np.ndarray, nbits: int) -> np.ndarray:
    """Packed Bernoulli rows.

    ``probs`` and ``keys`` share a shape ``S``; the result has shape
    ``S + (words_for(nbits),)``. Bit ``c`` of a row lives in word ``c // 64``
    at position ``c % 64``; unused tail bits are zero.
    """
    probs = np.asarray(probs, dtype=np.float64)
    keys = np.asarray(keys, dtype=U64)
    if probs.shape != keys.shape:
        raise ValueError("probs and keys must have the same shape")
    thr, full = thresholds(probs.ravel())
    out = np.empty((probs.size, words_for(nbits)), dtype=U64)
    if probs.size:
        _fill(thr, full, np.ascontiguousarray(keys.ravel()), int(nbits), out)
    return out.reshape(probs.shape + (out.shape[1],))
