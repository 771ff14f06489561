"""Instance types for Top-K and Domination and the maps between them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence

import numpy as np
from scipy.special import expit, ndtr

from .errors import EmbeddingError, InputShapeError, InvariantError, PreconditionError

SST_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


class Violation(NamedTuple):
    rule: Literal["diagonal", "skew-symmetry", "row-monotonicity"]
    indices: tuple[int, ...]  # 1-based

    def __str__(self) -> str:
        return f"{self.rule} at ({','.join(map(str, self.indices))})"


@dataclass(frozen=True)
class SSTVerdict:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(str(v) for v in self.violations)


def _check_square(entries) -> np.ndarray:
    a = np.asarray(entries, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InputShapeError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all((a >= 0.0) & (a <= 1.0)):
        raise InputShapeError("matrix entries must lie in [0, 1]")
    return a


def validate_sst(entries, tol: float = SST_TOL) -> SSTVerdict:
    """Check the diagonal, skew-symmetry and row-monotonicity conditions.

    Violations carry 1-based indices. Skew-symmetry failures are reported at
    the lower-triangle cell ``(v, u)`` with ``u < v``; monotonicity failures
    as ``(u, u+1, l)``, which suffices because the order is transitive.
    """
    a = _check_square(entries)
    n = a.shape[0]
    out: list[Violation] = []
    for u in np.flatnonzero(np.abs(np.diag(a) - 0.5) > tol):
        out.append(Violation("diagonal", (int(u) + 1, int(u) + 1)))
    iu, ju = np.triu_indices(n, 1)
    bad = np.abs(a[iu, ju] + a[ju, iu] - 1.0) > tol
    for u, v in zip(iu[bad], ju[bad]):
        out.append(Violation("skew-symmetry", (int(v) + 1, int(u) + 1)))
    if n > 1:
        drops = a[:-1] - a[1:] < -tol
        for u, l in zip(*np.nonzero(drops)):
            out.append(Violation("row-monotonicity", (int(u) + 1, int(u) + 2, int(l) + 1)))
    return SSTVerdict(tuple(out))


class ProbMatrix:
    """Read-only SST comparison matrix; ``entries[u, v]`` is Pr[rank u beats rank v]."""

    __slots__ = ("entries",)

    def __init__(self, entries, *, check: bool = True):
        a = _check_square(entries)
        if check:
            verdict = validate_sst(a)
            if not verdict.ok:
                raise InvariantError(f"not an SST matrix: {verdict}")
        self.entries = _frozen(a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def row(self, rank: int) -> np.ndarray:
        """Row for a 1-based rank."""
        return self.entries[rank - 1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProbMatrix) and np.array_equal(self.entries, other.entries)

    def __repr__(self) -> str:
        return f"ProbMatrix(n={self.n})"


@dataclass(frozen=True, eq=False)
class TopKInstance:
    matrix: ProbMatrix
    k: int

    def __post_init__(self):
        if not isinstance(self.matrix, ProbMatrix):
            object.__setattr__(self, "matrix", ProbMatrix(self.matrix))
        if not 1 <= self.k <= self.matrix.n - 1:
            raise PreconditionError(f"k must satisfy 1 <= k <= n-1, got k={self.k}, n={self.matrix.n}")

    @property
    def n(self) -> int:
        return self.matrix.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TopKInstance) and self.k == other.k and self.matrix == other.matrix


@dataclass(frozen=True, eq=False)
class DominationInstance:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        if p.ndim != 1 or p.shape != q.shape or p.size == 0:
            raise InputShapeError("p and q must be non-empty vectors of equal length")
        if not (np.all(p <= 1.0) and np.all(q >= 0.0) and np.all(p >= q)):
            raise InvariantError("domination order violated: need 1 >= p_i >= q_i >= 0")
        object.__setattr__(self, "p", _frozen(p))
        object.__setattr__(self, "q", _frozen(q))

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DominationInstance)
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.q, other.q)
        )

    def __repr__(self) -> str:
        return f"DominationInstance(n={self.n})"


class Permutation:
    """Bijection on labels. ``forward[rank] = label``, ``inverse[label] = rank``.

    Stored 0-based; ``from_one_based`` and ``one_based`` do the shift.
    """

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: Sequence[int]):
        f = np.asarray(forward, dtype=np.int64)
        n = f.size
        if f.ndim != 1 or not np.array_equal(np.sort(f), np.arange(n)):
            raise InvariantError("not a permutation of 0..n-1")
        inv = np.empty(n, dtype=np.int64)
        inv[f] = np.arange(n)
        f.flags.writeable = False
        inv.flags.writeable = False
        self.forward = f
        self.inverse = inv

    @classmethod
    def from_one_based(cls, mapping: Sequence[int]) -> "Permutation":
        return cls(np.asarray(mapping, dtype=np.int64) - 1)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))

    def one_based(self) -> list[int]:
        return (self.forward + 1).tolist()

    @property
    def n(self) -> int:
        return self.forward.size

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.forward, other.forward)


def sst_from_scores(scores, link: Literal["logistic", "gaussian"] = "logistic") -> ProbMatrix:
    """Matrix ``F(w_u - w_v)`` for a weakly decreasing score vector."""
    w = np.asarray(scores, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise InputShapeError("scores must be a non-empty vector")
    if np.any(np.diff(w) > 0):
        raise PreconditionError("scores must be weakly decreasing")
    gap = w[:, None] - w[None, :]
    if link == "logistic":
        a = expit(gap)
    elif link == "gaussian":
        a = ndtr(gap)
    else:
        raise PreconditionError(f"unknown link {link!r}")
    # Force exact skew-symmetry; the link is only symmetric up to rounding.
    a = np.triu(a, 1) + np.tril(1.0 - a.T, -1)
    np.fill_diagonal(a, 0.5)
    return ProbMatrix(a)


def domination_from_topk(instance: TopKInstance) -> DominationInstance:
    """Rows k and k+1 of the matrix, as the dominating and dominated vectors."""
    k = instance.k
    return DominationInstance(instance.matrix.row(k).copy(), instance.matrix.row(k + 1).copy())


def embed_domination(instance: DominationInstance) -> TopKInstance:
    """Place a Domination instance inside an (n+2)-item SST matrix with k = n+1.

    The first n items are below every other item they are compared with
    through ``p`` and ``q``; items n+1 and n+2 carry ``p`` and ``q`` as rows.
    Requires ``p`` strictly increasing and ``max p < 1/2``.
    """
    p, q = instance.p, instance.q
    n = instance.n
    if np.any(np.diff(p) <= 0):
        raise EmbeddingError("embedding needs p strictly increasing")
    if np.max(p) >= 0.5:
        raise EmbeddingError("embedding needs max p < 1/2")
    m = n + 2
    a = np.full((m, m), 0.5)
    a[n, :n] = p
    a[n + 1, :n] = q
    a[:n, n] = 1.0 - p
    a[:n, n + 1] = 1.0 - q
    verdict = validate_sst(a)
    if not verdict.ok:
        raise EmbeddingError(f"embedded matrix is not SST: {verdict}")
    return TopKInstance(ProbMatrix(a, check=False), n + 1)
