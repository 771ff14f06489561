"""Binary information quantities (in bits) and sample-count lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import entr, rel_entr

from .errors import DomainError
from .model import DominationInstance, TopKInstance, domination_from_topk

LN2 = math.log(2.0)


def _check_prob(*values: float) -> None:
    for v in values:
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"probability {v!r} outside [0, 1]")


def entropy(p: float) -> float:
    """Binary entropy in bits, with 0 log 0 = 0."""
    _check_prob(p)
    return float((entr(p) + entr(1.0 - p)) / LN2)


def kl(a: float, b: float) -> float:
    """Binary KL divergence D(B(a) || B(b)) in bits; ``math.inf`` on disjoint support."""
    _check_prob(a, b)
    return float((rel_entr(a, b) + rel_entr(1.0 - a, 1.0 - b)) / LN2)


def _info_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    x = p * (1.0 - q)
    y = q * (1.0 - p)
    s = x + y
    safe = np.where(s > 0, s, 1.0)
    h = (entr(x / safe) + entr(y / safe)) / LN2
    return np.where(s > 0, s * (1.0 - h), 0.0)


def info_pair(p: float, q: float) -> float:
    """Information about the hidden bit carried by one (X, Y) pair at a coordinate."""
    _check_prob(p, q)
    return float(_info_array(np.float64(p), np.float64(q)))


@dataclass(frozen=True)
class InfoReport:
    per_coordinate: np.ndarray
    total: float
    l1_gap: float
    l2_gap_sq: float
    linf_gap: float


def info_vec(instance: DominationInstance) -> InfoReport:
    per = _info_array(instance.p, instance.q)
    per.flags.writeable = False
    d = instance.p - instance.q
    return InfoReport(
        per_coordinate=per,
        total=math.fsum(per.tolist()),
        l1_gap=math.fsum(np.abs(d).tolist()),
        l2_gap_sq=math.fsum((d * d).tolist()),
        linf_gap=float(np.max(np.abs(d))),
    )


def sanov_exponent(p: float, q: float) -> float:
    """``-2 log2(sqrt(pq) + sqrt((1-p)(1-q)))`` for ``q <= p``."""
    _check_prob(p, q)
    if q > p:
        raise DomainError(f"need q <= p, got p={p}, q={q}")
    if p == q:
        return 0.0
    bc = math.sqrt(p * q) + math.sqrt((1.0 - p) * (1.0 - q))
    if bc <= 0.0:
        return math.inf
    return max(0.0, -2.0 * math.log2(bc))


class LowerBound(NamedTuple):
    """A sample-count lower bound. ``unbounded`` marks zero information."""

    value: float
    unbounded: bool

    def as_json(self) -> float | None:
        return None if self.unbounded else self.value


def _bound(numerator: float, information: float) -> LowerBound:
    if information <= 0.0:
        return LowerBound(math.inf, True)
    return LowerBound(numerator / information, False)


def lb_domination(instance: DominationInstance) -> LowerBound:
    return _bound(0.05, info_vec(instance).total)


def lb_topk(instance: TopKInstance) -> LowerBound:
    return _bound(0.1, info_vec(domination_from_topk(instance)).total)
