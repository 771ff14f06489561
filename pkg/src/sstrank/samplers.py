"""Sample generation for both problems, with hidden ground truth kept apart."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import PackedRows, pack_bits, tail_mask
from .errors import InputShapeError, PreconditionError
from .model import DominationInstance, Permutation, TopKInstance
from .rng import U64, Stream, bernoulli_words, coin_bits, derive_keys, stream_keys

TAG_HIDDEN = 1
TAG_X = 2
TAG_Y = 3
TAG_Z = 4
TAG_PERM = 5


@dataclass(frozen=True, eq=False)
class DominationSamples:
    """Solver-visible data: two packed n x r bit matrices."""

    x: PackedRows
    y: PackedRows

    def __post_init__(self):
        if self.x.words.shape != self.y.words.shape or self.x.nbits != self.y.nbits:
            raise InputShapeError("X and Y must have the same shape")

    @classmethod
    def from_dense(cls, X, Y) -> "DominationSamples":
        X = np.asarray(X)
        Y = np.asarray(Y)
        if X.ndim != 2 or X.shape != Y.shape or X.shape[1] == 0:
            raise InputShapeError("X and Y must be equal-shape n x r arrays with r >= 1")
        if not (np.isin(X, (0, 1)).all() and np.isin(Y, (0, 1)).all()):
            raise InputShapeError("sample entries must be 0 or 1")
        r = X.shape[1]
        return cls(PackedRows(pack_bits(X), r), PackedRows(pack_bits(Y), r))

    @property
    def n(self) -> int:
        return self.x.words.shape[-2]

    @property
    def r(self) -> int:
        return self.x.nbits

    @property
    def X(self) -> np.ndarray:
        return self.x.dense()

    @property
    def Y(self) -> np.ndarray:
        return self.y.dense()

    def batched(self) -> "DominationBatch":
        """View as a batch of one trial."""
        return DominationBatch(self.x[None], self.y[None])

    def swapped(self) -> "DominationSamples":
        return DominationSamples(self.y, self.x)


@dataclass(frozen=True, eq=False)
class DominationBatch:
    """Samples for several trials stacked along a leading axis: words ``(T, n, W)``."""

    x: PackedRows
    y: PackedRows

    @property
    def trials(self) -> int:
        return self.x.words.shape[0]

    @property
    def n(self) -> int:
        return self.x.words.shape[1]

    @property
    def r(self) -> int:
        return self.x.nbits

    def trial(self, t: int) -> DominationSamples:
        return DominationSamples(self.x[t], self.y[t])


@dataclass(frozen=True, eq=False)
class TopKSamples:
    """Packed comparison tensor; ``z.words[i, j]`` holds label i vs label j."""

    z: PackedRows

    @classmethod
    def from_dense(cls, Z) -> "TopKSamples":
        Z = np.asarray(Z)
        if Z.ndim != 3 or Z.shape[0] != Z.shape[1] or Z.shape[2] == 0:
            raise InputShapeError("Z must be an n x n x r array with r >= 1")
        return cls(PackedRows(pack_bits(Z), Z.shape[2]))

    @property
    def n(self) -> int:
        return self.z.words.shape[0]

    @property
    def r(self) -> int:
        return self.z.nbits

    @property
    def Z(self) -> np.ndarray:
        return self.z.dense()


@dataclass(frozen=True, eq=False)
class GroundTruth:
    seed: int
    stream_id: int
    hidden_bit: int | None = None
    permutation: Permutation | None = None

    def __post_init__(self):
        if (self.hidden_bit is None) == (self.permutation is None):
            raise ValueError("exactly one of hidden_bit and permutation must be set")

    def top_set(self, k: int) -> frozenset[int]:
        """Labels (0-based) of the k best-ranked items."""
        return frozenset(int(v) for v in self.permutation.forward[:k])


def _check_r(r: int) -> int:
    if int(r) < 1:
        raise PreconditionError(f"r must be at least 1, got {r}")
    return int(r)


def _domination_words(instance: DominationInstance, r: int, keys: np.ndarray, hidden: np.ndarray):
    n = instance.n
    swap = hidden.astype(bool)[:, None]
    px = np.where(swap, instance.q, instance.p)
    py = np.where(swap, instance.p, instance.q)
    xw = bernoulli_words(px, derive_keys(keys, TAG_X, n), r)
    yw = bernoulli_words(py, derive_keys(keys, TAG_Y, n), r)
    return xw, yw


def sample_domination(
    instance: DominationInstance, r: int, stream: Stream, hidden_bit: int | None = None
) -> tuple[DominationSamples, GroundTruth]:
    """Draw B (unless forced) and the two sample matrices.

    Under B=0, X rows follow p and Y rows follow q; B=1 swaps them.
    """
    r = _check_r(r)
    keys = np.array([stream.key], dtype=U64)
    if hidden_bit is None:
        hidden = coin_bits(keys, TAG_HIDDEN, 1)[:, 0]
    else:
        hidden = np.array([int(hidden_bit)], dtype=np.int64)
    xw, yw = _domination_words(instance, r, keys, hidden)
    samples = DominationSamples(PackedRows(xw[0], r), PackedRows(yw[0], r))
    return samples, GroundTruth(stream.seed, stream.stream_id, hidden_bit=int(hidden[0]))


def sample_domination_batch(
    instance: DominationInstance, r: int, seed: int, stream_ids: np.ndarray
) -> tuple[DominationBatch, np.ndarray]:
    """Trials with ``Stream(seed, sid)`` for each id; bit-identical to per-trial sampling."""
    r = _check_r(r)
    keys = stream_keys(seed, stream_ids)
    hidden = coin_bits(keys, TAG_HIDDEN, 1)[:, 0]
    xw, yw = _domination_words(instance, r, keys, hidden)
    return DominationBatch(PackedRows(xw, r), PackedRows(yw, r)), hidden


def topk_words(entries: np.ndarray, labels_rank: np.ndarray, r: int, key: int) -> np.ndarray:
    """Packed Z for a matrix whose label ``i`` has rank ``labels_rank[i]``.

    The upper triangle is drawn, the lower triangle is its complement and the
    diagonal is fair coins.
    """
    n = entries.shape[0]
    iu, ju = np.triu_indices(n)
    probs = entries[labels_rank[iu], labels_rank[ju]]
    probs = np.where(iu == ju, 0.5, probs)
    all_keys = derive_keys(np.array([key], dtype=U64), TAG_Z, n * n)[0]
    drawn = bernoulli_words(probs, all_keys[iu * n + ju], r)
    words = np.empty((n, n, drawn.shape[-1]), dtype=U64)
    words[iu, ju] = drawn
    off = iu != ju
    comp = ~drawn[off]
    comp[:, -1] &= tail_mask(r)
    words[ju[off], iu[off]] = comp
    return words


def sample_topk(instance: TopKInstance, r: int, stream: Stream) -> tuple[TopKSamples, GroundTruth]:
    r = _check_r(r)
    perm = Permutation.random(instance.n, stream.child(TAG_PERM).generator())
    words = topk_words(instance.matrix.entries, perm.inverse, r, stream.key)
    return TopKSamples(PackedRows(words, r)), GroundTruth(stream.seed, stream.stream_id, permutation=perm)


def dump_samples(samples: DominationSamples | TopKSamples) -> dict:
    """Debug view with hex-encoded packed rows (word order, little-endian words)."""

    def hexrows(words: np.ndarray) -> list:
        flat = words.reshape(-1, words.shape[-1])
        rows = ["".join(f"{int(w):016x}" for w in row) for row in flat]
        return np.array(rows, dtype=object).reshape(words.shape[:-1]).tolist()

    if isinstance(samples, DominationSamples):
        return {"n": samples.n, "r": samples.r, "X": hexrows(samples.x.words), "Y": hexrows(samples.y.words)}
    return {"n": samples.n, "r": samples.r, "Z": hexrows(samples.z.words)}
