"""Top-K selection by randomized tournament over pairwise domination tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bits import PackedRows, pack_bits, unpack_bits
from .bounds import coup_segments
from .errors import InsufficientSamplesError, PreconditionError
from .model import TopKInstance
from .rng import U64, Stream, bernoulli_words, derive_keys
from .samplers import DominationBatch, DominationSamples, TopKSamples
from .solvers import coup_kernel

TAG_TOURNAMENT = 21
TAG_PAIR = 22
TAG_RELABEL = 23
TAG_FRESH = 24
TAG_ALGO = 25

PairOracle = Callable[[int, int], bool]


@dataclass(frozen=True)
class TournamentStats:
    edge_queries: int
    rounds: int
    result: frozenset[int]  # 0-based labels


def tournament_select(oracle: PairOracle, n: int, k: int, stream: Stream) -> TournamentStats:
    """Find the k vertices of largest rank in a tournament given by ``oracle``.

    ``oracle(i, j)`` (called with ``i < j``) returns True when the edge points
    from i to j, i.e. i is judged better. Each unordered pair is queried at
    most once. Each round probes a uniformly random surviving vertex, queries
    all its edges inside the surviving set and keeps the probe only if it
    removes more than a fifth of the survivors.
    """
    if n < 2 or not 1 <= k < n:
        raise PreconditionError(f"need n >= 2 and 1 <= k < n, got n={n}, k={k}")
    rng = stream.child(TAG_TOURNAMENT).generator()
    memo: dict[tuple[int, int], bool] = {}

    def beats(u: int, v: int) -> bool:
        if u < v:
            key = (u, v)
            hit = memo.get(key)
            if hit is None:
                hit = memo[key] = bool(oracle(u, v))
            return hit
        key = (v, u)
        hit = memo.get(key)
        if hit is None:
            hit = memo[key] = bool(oracle(v, u))
        return not hit

    alive = list(range(n))
    need = k
    top: list[int] = []
    rounds = 0
    while 0 < need < len(alive):
        m = len(alive)
        probed: set[int] = set()
        best = None
        while True:
            v = alive[int(rng.integers(m))]
            rounds += 1
            ins, outs = [], []
            for u in alive:
                if u != v:
                    (ins if beats(u, v) else outs).append(u)
            if len(ins) < need:
                # v and everything beating it are in the top set.
                survivors, move = outs, ("top", ins + [v])
            else:
                survivors, move = ins, ("bottom", None)
            if 5 * len(survivors) < 4 * m:
                chosen = (survivors, move)
                break
            if best is None or len(survivors) < len(best[0]):
                best = (survivors, move)
            probed.add(v)
            if len(probed) == m:
                # Only reachable when the oracle is not transitive enough for
                # any probe to shrink the problem; take the best seen.
                chosen = best
                break
        survivors, (side, taken) = chosen
        if side == "top":
            top.extend(taken)
            need -= len(taken)
        alive = survivors
    if need == len(alive):
        top.extend(alive)
    return TournamentStats(len(memo), rounds, frozenset(top))


def _pair_keys(stream: Stream, n: int) -> np.ndarray:
    return derive_keys(np.array([stream.key], dtype=U64), TAG_PAIR, n * n)[0]


def solve_topk(samples: TopKSamples, k: int, alpha: float, stream: Stream) -> tuple[frozenset[int], TournamentStats]:
    """Tournament whose edge (i, j) is the coupling solver run on rows Z[i] and Z[j].

    Each comparison runs at confidence ``1 - alpha / (2 n^2)``; the edge
    points from i to j when that solver answers 0. ``k`` is 1-based in the
    sense of a set size; returned labels are 0-based.
    """
    n, r = samples.n, samples.r
    call_alpha = alpha / (2.0 * n * n)
    ell = coup_segments(n, call_alpha)
    if r < ell:
        raise InsufficientSamplesError(f"Top-K solver needs r >= {ell} at n={n}, alpha={alpha}, got {r}")
    z = samples.z
    keys = _pair_keys(stream, n)

    def oracle(i: int, j: int) -> bool:
        batch = DominationBatch(z[i][None], z[j][None])
        guess, _ = coup_kernel(batch, keys[i * n + j : i * n + j + 1], call_alpha)
        return int(guess[0]) == 0

    stats = tournament_select(oracle, n, k, stream)
    return stats.result, stats


TopKAlgorithm = Callable[[TopKSamples, int, Stream], frozenset[int]]


def reduction_lowerbound(
    topk_algorithm: TopKAlgorithm,
    instance: TopKInstance,
    samples: DominationSamples,
    stream: Stream,
    r: int | None = None,
) -> int:
    """Answer a Domination question with a Top-K algorithm.

    ``samples`` come from rows k and k+1 of ``instance``'s matrix and need at
    least ``2r`` columns. The first r columns fill the comparisons of items k
    and k+1 against everyone else; the last r columns, complemented, fill the
    reverse orientation. Remaining cells are fresh draws from the matrix.
    Labels are then shuffled uniformly and the algorithm is asked for its top
    k. Returns 0 iff the item built from X is reported.
    """
    n, k = instance.n, instance.k
    if samples.n != n:
        raise PreconditionError(f"samples have {samples.n} coordinates, instance has {n}")
    r = samples.r // 2 if r is None else int(r)
    if r < 1 or samples.r < 2 * r:
        raise PreconditionError(f"need at least 2r columns with r >= 1, got {samples.r} columns for r={r}")
    X, Y = samples.X, samples.Y
    a, b = k - 1, k  # 0-based labels of items k and k+1
    P = instance.matrix.entries

    # rank[j]: the matrix row/column that item j stands for.
    others = np.array([j for j in range(n) if j not in (a, b)], dtype=np.int64)
    rank = np.arange(n, dtype=np.int64)
    rank[others] = stream.child(TAG_RELABEL).generator().permutation(others)

    iu, ju = np.triu_indices(n)
    probs = np.where(iu == ju, 0.5, P[rank[iu], rank[ju]])
    fresh_keys = derive_keys(np.array([stream.key], dtype=U64), TAG_FRESH, n * n)[0]
    up = unpack_bits(bernoulli_words(probs, fresh_keys[iu * n + ju], r), r)
    Z = np.empty((n, n, r), dtype=np.uint8)
    Z[iu, ju] = up
    off = iu != ju
    Z[ju[off], iu[off]] = 1 - up[off]

    # Rows of items k and k+1 against everyone else come from the first half.
    Z[a, others] = X[rank[others], :r]
    Z[b, others] = Y[rank[others], :r]
    # The reverse orientation comes from the second half, complemented.
    Z[others, a] = 1 - X[rank[others], r : 2 * r]
    Z[others, b] = 1 - Y[rank[others], r : 2 * r]
    # Item k against item k+1. Diagonal cells keep their fair coins.
    Z[a, b] = X[b, :r]
    Z[b, a] = 1 - Z[a, b]

    relabel = stream.child(TAG_RELABEL + 100).generator().permutation(n)
    shuffled = np.empty_like(Z)
    shuffled[relabel[:, None], relabel[None, :]] = Z
    result = topk_algorithm(TopKSamples(PackedRows(pack_bits(shuffled), r)), k, stream.child(TAG_ALGO))
    return 0 if int(relabel[a]) in result else 1
