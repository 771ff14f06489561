"""Named instance families: the separating example, solver killers and the hard distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ParameterError, PreconditionError
from .model import DominationInstance, ProbMatrix, TopKInstance
from .rng import Stream


def gen_diag_eps(n: int, k: int, eps: float) -> TopKInstance:
    """Every better-ranked item wins with probability 1/2 + eps."""
    if not 0.0 < eps < 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2), got {eps}")
    if n < 2:
        raise ParameterError("n must be at least 2")
    a = np.full((n, n), 0.5)
    a[np.triu_indices(n, 1)] = 0.5 + eps
    a[np.tril_indices(n, -1)] = 0.5 - eps
    return TopKInstance(ProbMatrix(a), k)


def gen_countingfails(n: int, k: int, eps: float, base=None) -> DominationInstance:
    """Gap eps on coordinates k and k+1 (1-based) only."""
    if not 0.0 < eps < 0.1:
        raise ParameterError(f"eps must lie in (0, 1/10), got {eps}")
    if n < 2 or not 1 <= k <= n - 1:
        raise ParameterError(f"need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")
    b = np.full(n, 0.5) if base is None else np.asarray(base, dtype=np.float64)
    if b.shape != (n,):
        raise ParameterError(f"base must have length {n}")
    q = b.copy()
    q[k - 1 : k + 1] -= eps
    if np.any(b <= 0.25) or np.any(b >= 0.75) or np.any(q <= 0.25):
        raise ParameterError("base and base - eps must stay inside (1/4, 3/4)")
    return DominationInstance(b, q)


def gen_maxfails(n: int, eps: float | None = None) -> DominationInstance:
    """Uniform gap: p_i = 1/2 + eps, q_i = 1/2, with eps = 1/n^2 by default."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    eps = 1.0 / n**2 if eps is None else float(eps)
    if not 0.0 < eps <= 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2], got {eps}")
    return DominationInstance(np.full(n, 0.5 + eps), np.full(n, 0.5))


def gen_countingfails2(n: int, eps: float) -> DominationInstance:
    """One informative coordinate (eps vs 0) among fair coins."""
    if not 0.0 < eps <= 1.0:
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    p = np.full(n, 0.5)
    q = np.full(n, 0.5)
    p[0], q[0] = eps, 0.0
    return DominationInstance(p, q)


def gen_maxfails2(n: int, eps: float) -> DominationInstance:
    """A rare-event coordinate (eps/100 vs 0) plus n-1 coordinates with gap eps."""
    if not 0.0 < eps <= 0.5:
        raise ParameterError(f"eps must lie in (0, 1/2], got {eps}")
    p = np.full(n, 0.5 + eps)
    q = np.full(n, 0.5)
    p[0], q[0] = eps / 100.0, 0.0
    return DominationInstance(p, q)


RScheme = Literal["constant-half", "embedding-ramp"]


@dataclass(frozen=True, eq=False)
class HardDraw:
    instance: DominationInstance
    s_p: np.ndarray  # sorted 0-based indices
    s_q: np.ndarray
    gamma: float
    eps: float
    r_base: np.ndarray

    def meta(self) -> dict:
        return {
            "family": "hard",
            "s_p": (self.s_p + 1).tolist(),
            "s_q": (self.s_q + 1).tolist(),
            "gamma": self.gamma,
            "eps": self.eps,
        }


def base_rates(n: int, scheme: RScheme) -> np.ndarray:
    if scheme == "constant-half":
        return np.full(n, 0.5)
    if scheme == "embedding-ramp":
        return 0.25 + np.arange(1, n + 1) / (8.0 * n)
    raise ParameterError(f"unknown base-rate scheme {scheme!r}")


def draw_hard(
    n: int,
    gamma: float | None = None,
    eps: float | None = None,
    r_scheme: RScheme = "constant-half",
    stream: Stream | None = None,
) -> HardDraw:
    """Sparse multiplicative perturbations of base rates on random index sets."""
    gamma = 1.0 / (100.0 * math.sqrt(n)) if gamma is None else float(gamma)
    eps = 1.0 / (100.0 * n * n) if eps is None else float(eps)
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    base = base_rates(n, r_scheme)
    if r_scheme == "embedding-ramp" and np.any(base[:-1] * (1 + eps) > base[1:] * (1 - eps)):
        raise ParameterError("ramp spacing violated: need R_i(1+eps) <= R_{i+1}(1-eps)")
    if stream is None:
        raise PreconditionError("draw_hard needs a random stream")
    rng = stream.generator()
    in_p = rng.random(n) < gamma
    in_q = rng.random(n) < gamma
    p = np.where(in_p, base * (1 + eps), base)
    q = np.where(in_q, base * (1 - eps), base)
    base.flags.writeable = False
    return HardDraw(
        DominationInstance(p, q),
        np.flatnonzero(in_p),
        np.flatnonzero(in_q),
        gamma,
        eps,
        base,
    )


def draw_hard_conditioned(
    n: int,
    gamma: float | None = None,
    eps: float | None = None,
    r_scheme: RScheme = "constant-half",
    stream: Stream | None = None,
    max_tries: int = 10_000,
) -> HardDraw:
    """Rejection-sample ``draw_hard`` until ``|S_P| >= n * gamma / 10``."""
    if stream is None:
        raise PreconditionError("draw_hard_conditioned needs a random stream")
    for attempt in range(max_tries):
        draw = draw_hard(n, gamma, eps, r_scheme, stream.child(attempt))
        if draw.s_p.size >= n * draw.gamma / 10.0:
            return draw
    raise ParameterError(f"no draw with |S_P| >= n*gamma/10 in {max_tries} tries")
