"""Exact computations for small instances, used as ground truth in tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import convolve
from scipy.special import rel_entr, xlogy
from scipy.stats import binom

from .errors import ResourceError
from .model import DominationInstance
from .rng import Stream
from .samplers import DominationSamples

PMF_MAX_R = 10_000
COUNT_MAX_NR = 100_000
MAX_MAX_N = 16
MAX_MAX_R = 200
ENUM_MAX = 10_000_000
EXACT_MAX_NR = 64


@dataclass(frozen=True, eq=False)
class Pmf:
    """Distribution on the integers ``offset, offset+1, ...``."""

    offset: int
    mass: np.ndarray  # float64, or object array of Fractions in exact mode

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.mass))

    def total(self):
        return sum(self.mass) if self.mass.dtype == object else math.fsum(self.mass.tolist())

    def mean(self):
        xs = self.support
        if self.mass.dtype == object:
            return sum(int(x) * m for x, m in zip(xs, self.mass))
        return math.fsum((xs * self.mass).tolist())


def _binom_pmf(r: int, p: float) -> np.ndarray:
    # scipy's pmf overflows for subnormal p; such p are 0 to working precision.
    p = 0.0 if p < 1e-300 else 1.0 if p > 1.0 - 1e-300 else float(p)
    return binom.pmf(np.arange(r + 1), r, p)


def _binom_exact(r: int, p: Fraction) -> list[Fraction]:
    return [math.comb(r, a) * p**a * (1 - p) ** (r - a) for a in range(r + 1)]


def _conv_exact(a, b) -> np.ndarray:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return np.array(out, dtype=object)


def pmf_coordinate_sum(p: float, q: float, r: int, case_b: int = 0, exact: bool = False) -> Pmf:
    """Distribution of ``sum_j (X_ij - Y_ij)`` for one coordinate.

    Computed as Bin(r, a) - Bin(r, b) with (a, b) = (p, q), swapped when
    ``case_b`` is 1. This equals the r-fold convolution of the per-column
    trinomial because the two binomials are independent.
    """
    if r > PMF_MAX_R:
        raise ResourceError(f"pmf needs r <= {PMF_MAX_R}, got {r}")
    a, b = (p, q) if case_b == 0 else (q, p)
    if exact:
        fa = _binom_exact(r, Fraction(a))
        fb = _binom_exact(r, Fraction(b))
        return Pmf(-r, _conv_exact(fa, fb[::-1]))
    mass = np.convolve(_binom_pmf(r, a), _binom_pmf(r, b)[::-1])
    return Pmf(-r, mass)


def _pmfs(instance: DominationInstance, r: int, exact: bool) -> list[Pmf]:
    if exact and instance.n * r > EXACT_MAX_NR:
        raise ResourceError(f"exact-rational mode needs n*r <= {EXACT_MAX_NR}")
    return [pmf_coordinate_sum(float(p), float(q), r, 0, exact) for p, q in zip(instance.p, instance.q)]


def _half(exact: bool):
    return Fraction(1, 2) if exact else 0.5


def _sum(values, exact: bool):
    return sum(values, Fraction(0)) if exact else math.fsum(np.asarray(values, dtype=float).tolist())


def exact_success_count(instance: DominationInstance, r: int, exact: bool = False):
    """Success probability of counting: Pr[Z > 0] + Pr[Z = 0] / 2 under B = 0."""
    if instance.n * r > COUNT_MAX_NR:
        raise ResourceError(f"count oracle needs n*r <= {COUNT_MAX_NR}")
    pmfs = _pmfs(instance, r, exact)
    mass = pmfs[0].mass
    for f in pmfs[1:]:
        if exact:
            mass = _conv_exact(mass, f.mass)
        else:
            mass = np.clip(convolve(mass, f.mass), 0.0, None)
    zero = instance.n * r  # index of Z = 0
    return _sum(mass[zero + 1 :], exact) + _half(exact) * mass[zero]


def exact_success_max(instance: DominationInstance, r: int, exact: bool = False):
    """Success probability of the max rule with lowest-index tie-breaking."""
    n = instance.n
    if n > MAX_MAX_N or r > MAX_MAX_R:
        raise ResourceError(f"max oracle needs n <= {MAX_MAX_N} and r <= {MAX_MAX_R}")
    pmfs = _pmfs(instance, r, exact)
    dtype = object if exact else np.float64
    # absm[j, m] = Pr[|S_j| = m]; pos[j, m] = Pr[S_j = +m]
    absm = np.zeros((n, r + 1), dtype=dtype)
    pos = np.zeros((n, r + 1), dtype=dtype)
    for j, f in enumerate(pmfs):
        mid = f.mass[r:]
        neg = f.mass[:r][::-1]
        absm[j] = mid
        absm[j, 1:] = absm[j, 1:] + neg
        pos[j] = mid
    if exact:
        absm = absm + Fraction(0)
        pos = pos + Fraction(0)
    below = np.cumsum(absm, axis=1)  # Pr[|S_j| <= m]
    strict = below - absm  # Pr[|S_j| < m]
    terms = []
    for m in range(1, r + 1):
        for i in range(n):
            left = np.prod(strict[:i, m]) if i else 1
            right = np.prod(below[i + 1 :, m]) if i + 1 < n else 1
            terms.append(left * pos[i, m] * right)
    all_zero = np.prod(absm[:, 0])
    return _sum(terms, exact) + _half(exact) * all_zero


def _loglik(a: np.ndarray, b: np.ndarray, r: int, p: np.ndarray, q: np.ndarray) -> float:
    terms = xlogy(a, p) + xlogy(r - a, 1 - p) + xlogy(b, q) + xlogy(r - b, 1 - q)
    return math.fsum(terms.tolist())


def bayes_decide(instance: DominationInstance, samples: DominationSamples, stream: Stream) -> int:
    """MAP estimate of B from the heads counts; fair coin on an exact tie."""
    a = samples.x.counts().astype(np.float64)
    b = samples.y.counts().astype(np.float64)
    r = samples.r
    with np.errstate(divide="ignore", invalid="ignore"):
        l0 = _loglik(a, b, r, instance.p, instance.q)
        l1 = _loglik(a, b, r, instance.q, instance.p)
    if l0 > l1:
        return 0
    if l1 > l0:
        return 1
    return int(stream.coins(1, 1)[0])


def enumeration_size(n: int, r: int) -> int:
    return (r + 1) ** (2 * n)


def _likelihoods(instance: DominationInstance, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Joint likelihood of every heads-count vector under B = 0 and B = 1."""
    size = enumeration_size(instance.n, r)
    if size > ENUM_MAX:
        raise ResourceError(f"enumeration needs (r+1)^(2n) <= {ENUM_MAX}, got {size}")
    l0 = np.ones(1)
    l1 = np.ones(1)
    for p, q in zip(instance.p, instance.q):
        bp, bq = _binom_pmf(r, p), _binom_pmf(r, q)
        l0 = np.multiply.outer(l0, np.outer(bp, bq).ravel()).ravel()
        l1 = np.multiply.outer(l1, np.outer(bq, bp).ravel()).ravel()
    return l0, l1


def exact_success_bayes(instance: DominationInstance, r: int) -> float:
    """Best achievable success probability at r samples per coordinate."""
    l0, l1 = _likelihoods(instance, r)
    return 0.5 * float(np.sum(np.maximum(l0, l1)))


def exact_mutual_information(instance: DominationInstance, r: int) -> float:
    """I(B; X, Y) in bits, over the sufficient statistics."""
    l0, l1 = _likelihoods(instance, r)
    mix = 0.5 * (l0 + l1)
    # Halving a subnormal can round to 0; such cells carry no measurable mass.
    keep = mix > 0
    l0, l1, mix = l0[keep], l1[keep], mix[keep]
    nats = 0.5 * np.sum(rel_entr(l0, mix)) + 0.5 * np.sum(rel_entr(l1, mix))
    return max(0.0, float(nats) / math.log(2.0))


def resource_cost(what: str, n: int, r: int) -> dict:
    """Work measure and cap for each oracle, for reporting."""
    if what == "success-count":
        return {"measure": "n*r", "value": n * r, "cap": COUNT_MAX_NR}
    if what == "success-max":
        return {"measure": "n, r", "value": [n, r], "cap": [MAX_MAX_N, MAX_MAX_R]}
    return {"measure": "(r+1)^(2n)", "value": enumeration_size(n, r), "cap": ENUM_MAX}
