"""Domination solvers.

Each rule is written once as a batched kernel over a leading trial axis. The
public ``solve_*`` functions run that kernel on a batch of one. All coins come
from the solver stream's key through the counter-based generator, so a trial
gives the same answer alone or inside a batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .bits import segment_diff, tail_mask
from .bounds import comb_groups, coup_segments
from .errors import InsufficientSamplesError, PreconditionError
from .rng import U64, Stream, bernoulli_words, coin_bits, derive_keys
from .samplers import DominationBatch, DominationSamples

TAG_TIE = 11
TAG_SEGMENT = 12
TAG_MAJORITY = 13
TAG_FINAL = 14
TAG_CUBE = 15


@dataclass(frozen=True)
class SolverOutput:
    guess: int
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.guess not in (0, 1):
            raise ValueError(f"guess must be 0 or 1, got {self.guess}")


def _signed(stat: np.ndarray, coin: np.ndarray) -> np.ndarray:
    """+1/-1 by sign; zeros take the coin (1 -> +1, 0 -> -1)."""
    s = np.sign(stat)
    return s + (s == 0) * (2 * coin - 1)


def _guess_from_sign(stat: np.ndarray, coin: np.ndarray) -> np.ndarray:
    return np.where(stat > 0, 0, np.where(stat < 0, 1, coin))


def _totals(batch: DominationBatch) -> np.ndarray:
    return batch.x.counts() - batch.y.counts()


def _argmax_abs(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.argmax(np.abs(s), axis=-1)  # first maximum, i.e. lowest index
    return idx, np.take_along_axis(s, idx[..., None], axis=-1)[..., 0]


# ---------------------------------------------------------------- kernels


def count_kernel(batch: DominationBatch, keys: np.ndarray):
    z = _totals(batch).sum(axis=-1)
    coin = coin_bits(keys, TAG_TIE, 1)[:, 0]
    return _guess_from_sign(z, coin), {"Z": z}


def max_kernel(batch: DominationBatch, keys: np.ndarray):
    i_star, z = _argmax_abs(_totals(batch))
    coin = coin_bits(keys, TAG_TIE, 1)[:, 0]
    return _guess_from_sign(z, coin), {"Z": z, "i_star": i_star}


def subset_kernel(batch: DominationBatch, keys: np.ndarray, subset: np.ndarray):
    t = _totals(batch)[:, subset].sum(axis=-1)
    return np.where(t >= 0, 0, 1), {"T": t}


def group_bounds(r: int, groups: int) -> np.ndarray:
    """Contiguous equal groups; the remainder joins the last one."""
    size = r // groups
    b = np.arange(groups + 1, dtype=np.int64) * size
    b[-1] = r
    return b


def comb_kernel(batch: DominationBatch, keys: np.ndarray, alpha: float):
    g = comb_groups(alpha)
    if batch.r < 2 * g:
        raise InsufficientSamplesError(f"combined solver needs r >= {2 * g} at alpha={alpha}, got {batch.r}")
    bounds = group_bounds(batch.r, 2 * g)
    d = segment_diff(batch.x, batch.y, bounds)  # (T, n, 2g)
    coins = coin_bits(keys, TAG_TIE, 2 * g)
    count_out = _guess_from_sign(d[:, :, :g].sum(axis=1), coins[:, :g])
    _, zmax = _argmax_abs(np.moveaxis(d[:, :, g:], 1, 2))
    max_out = _guess_from_sign(zmax, coins[:, g:])
    s1 = count_out.sum(axis=-1)
    s2 = max_out.sum(axis=-1)
    # (s1/g + s2/g) / 2 <= 1/2  <=>  s1 + s2 <= g
    guess = np.where(s1 + s2 <= g, 0, 1)
    return guess, {"Z1": s1 / g, "Z2": s2 / g, "groups_per_half": np.full_like(s1, g)}


def _sum_of_cubes(s: np.ndarray, r: int) -> np.ndarray:
    n = s.shape[-1]
    if n * float(r) ** 3 < 2.0**62:
        return (s.astype(np.int64) ** 3).sum(axis=-1)
    obj = s.astype(object)
    return (obj**3).sum(axis=-1)


def cube_kernel(batch: DominationBatch, keys: np.ndarray):
    xw, yw = batch.x.words, batch.y.words
    r = batch.r
    n = batch.n
    pos = np.bitwise_count(xw & ~yw).sum(axis=-1, dtype=np.int64)
    neg = np.bitwise_count(~xw & yw).sum(axis=-1, dtype=np.int64)
    ties_mask = ~(xw ^ yw)
    ties_mask[..., -1] &= tail_mask(r)
    ties = r - pos - neg
    # One fair coin per column; only tied columns read theirs.
    coin_words = bernoulli_words(np.full((len(keys), n), 0.5), derive_keys(keys, TAG_CUBE, n), r)
    heads = np.bitwise_count(coin_words & ties_mask).sum(axis=-1, dtype=np.int64)
    s = pos - neg + 2 * heads - ties
    z = _sum_of_cubes(s, r)
    guess = np.array([0 if v >= 0 else 1 for v in z], dtype=np.int64) if z.dtype == object else np.where(z >= 0, 0, 1)
    return guess, {"Z": z}


def coup_kernel(batch: DominationBatch, keys: np.ndarray, alpha: float):
    n, r = batch.n, batch.r
    ell = coup_segments(n, alpha)
    if r < ell:
        raise InsufficientSamplesError(f"coupling solver needs r >= {ell} at n={n}, alpha={alpha}, got {r}")
    bounds = np.arange(ell + 1, dtype=np.int64) * (r // ell)
    d = segment_diff(batch.x, batch.y, bounds)  # (T, n, ell)
    t = d.shape[0]
    s = _signed(d, coin_bits(keys, TAG_SEGMENT, n * ell).reshape(t, n, ell))
    i_star, z1 = _argmax_abs(s.sum(axis=-1))
    first = 3 * np.abs(z1) >= ell
    tj = _signed(s.sum(axis=1), coin_bits(keys, TAG_MAJORITY, ell))
    z2 = _signed(tj.sum(axis=-1), coin_bits(keys, TAG_FINAL, 1)[:, 0])
    decisive = np.where(first, z1, z2)
    guess = np.where(decisive > 0, 0, 1)
    return guess, {"Z1": z1, "Z2": z2, "i_star": i_star, "branch": np.where(first, 1, 2), "ell": np.full(t, ell)}


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class SolverSpec:
    name: str
    kernel: Callable[..., tuple[np.ndarray, dict]]
    takes_alpha: bool = False
    takes_subset: bool = False
    # Extra word-sized arrays allocated per trial, for chunk sizing.
    scratch_factor: float = 1.0

    def min_r(self, n: int, alpha: float = 0.25) -> int:
        if self.name == "comb":
            return 2 * comb_groups(alpha)
        if self.name == "coup":
            return coup_segments(n, alpha)
        return 1


SOLVERS: dict[str, SolverSpec] = {
    "count": SolverSpec("count", count_kernel),
    "max": SolverSpec("max", max_kernel),
    "comb": SolverSpec("comb", comb_kernel, takes_alpha=True, scratch_factor=2.0),
    "cube": SolverSpec("cube", cube_kernel, scratch_factor=3.0),
    "coup": SolverSpec("coup", coup_kernel, takes_alpha=True, scratch_factor=2.0),
    "subset": SolverSpec("subset", subset_kernel, takes_subset=True),
}


def normalize_subset(subset: Iterable[int], n: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(subset), dtype=np.int64))
    if idx.size == 0:
        raise PreconditionError("subset must be non-empty")
    if idx[0] < 0 or idx[-1] >= n:
        raise PreconditionError(f"subset indices must lie in 0..{n - 1}")
    return idx


def run_kernel(
    name: str,
    batch: DominationBatch,
    keys: np.ndarray,
    alpha: float = 0.25,
    subset: Iterable[int] | None = None,
):
    """Dispatch a batch to a named solver; returns ``(guesses, diagnostics)``."""
    try:
        entry = SOLVERS[name]
    except KeyError:
        raise PreconditionError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}") from None
    keys = np.asarray(keys, dtype=U64)
    if entry.takes_alpha:
        if not 0.0 < alpha < 1.0:
            raise PreconditionError(f"alpha must lie in (0, 1), got {alpha}")
        return entry.kernel(batch, keys, alpha)
    if entry.takes_subset:
        if subset is None:
            raise PreconditionError("subset solver needs an index set")
        return entry.kernel(batch, keys, normalize_subset(subset, batch.n))
    return entry.kernel(batch, keys)


def _scalar(v):
    v = v.item() if isinstance(v, np.generic) else v
    return int(v) if isinstance(v, (bool, np.bool_)) else v


def _single(name: str, samples: DominationSamples, stream: Stream, **kw) -> SolverOutput:
    keys = np.array([stream.key], dtype=U64)
    guess, diag = run_kernel(name, samples.batched(), keys, **kw)
    return SolverOutput(int(guess[0]), {k: _scalar(v[0]) for k, v in diag.items()})


def solve_count(samples: DominationSamples, stream: Stream) -> SolverOutput:
    """Sign of the total head difference; fair coin on zero."""
    return _single("count", samples, stream)


def solve_max(samples: DominationSamples, stream: Stream) -> SolverOutput:
    """Sign of the coordinate with the largest absolute head difference."""
    return _single("max", samples, stream)


def solve_comb(samples: DominationSamples, alpha: float, stream: Stream) -> SolverOutput:
    """Majority vote of count (first half of the groups) and max (second half)."""
    return _single("comb", samples, stream, alpha=alpha)


def solve_cube(samples: DominationSamples, stream: Stream) -> SolverOutput:
    """Sign of the sum of cubed per-coordinate ±1 walks."""
    return _single("cube", samples, stream)


def solve_coup(samples: DominationSamples, alpha: float, stream: Stream) -> SolverOutput:
    """Segment-sign voting: strongest coordinate if decisive, else a two-level majority."""
    return _single("coup", samples, stream, alpha=alpha)


def solve_subset_count(samples: DominationSamples, subset: Iterable[int], stream: Stream | None = None) -> SolverOutput:
    """Counting restricted to ``subset`` (0-based); ``T >= 0`` reads as B = 0."""
    stream = stream if stream is not None else Stream(0)
    return _single("subset", samples, stream, subset=subset)


SINGLE_SOLVERS = {
    "count": lambda s, st, alpha=0.25, subset=None: solve_count(s, st),
    "max": lambda s, st, alpha=0.25, subset=None: solve_max(s, st),
    "comb": lambda s, st, alpha=0.25, subset=None: solve_comb(s, alpha, st),
    "cube": lambda s, st, alpha=0.25, subset=None: solve_cube(s, st),
    "coup": lambda s, st, alpha=0.25, subset=None: solve_coup(s, alpha, st),
    "subset": lambda s, st, alpha=0.25, subset=None: solve_subset_count(s, subset, st),
}
