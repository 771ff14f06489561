"""Closed-form sample counts at which each solver is guaranteed to succeed.

Logs inside these formulas are natural unless noted; information quantities
are in bits.
"""

from __future__ import annotations

import math

from .info import info_vec
from .model import DominationInstance, TopKInstance, domination_from_topk


def _ceil(x: float) -> int:
    """Ceiling that ignores float noise in the last few ulps."""
    return math.ceil(x * (1.0 - 1e-12))


def comb_groups(alpha: float) -> int:
    """Groups per half for the combined solver."""
    return _ceil(16.0 * math.log(1.0 / alpha))


def coup_segments(n: int, alpha: float) -> int:
    return _ceil(18.0 * math.log(2.0 * n / alpha))


def count_bound(instance: DominationInstance, alpha: float = 0.25) -> int:
    l1 = info_vec(instance).l1_gap
    return _ceil(2 * instance.n * math.log(1.0 / alpha) / l1**2)


def max_bound(instance: DominationInstance, alpha: float = 0.25) -> int:
    linf = info_vec(instance).linf_gap
    return _ceil(8 * math.log(2 * instance.n / alpha) / linf**2)


def comb_bound(instance: DominationInstance, alpha: float = 0.25) -> int:
    """Total columns: 2g groups, each large enough for the better of count and max at 3/4."""
    n = instance.n
    per_group = _ceil(4 * math.sqrt(n * math.log(4) * math.log(8 * n)) / info_vec(instance).l2_gap_sq)
    return 2 * comb_groups(alpha) * per_group


def cube_bound(instance: DominationInstance) -> int:
    return _ceil(max(144 * math.sqrt(instance.n) / info_vec(instance).l2_gap_sq, 8))


def coup_bound(instance: DominationInstance, alpha: float = 0.25) -> int:
    n = instance.n
    return _ceil(2592 * math.sqrt(n) * math.log(2 * n / alpha) / info_vec(instance).total)


def topk_bound(instance: TopKInstance, alpha: float = 0.25) -> int:
    n = instance.n
    info = info_vec(domination_from_topk(instance)).total
    return _ceil(7776 * math.sqrt(n) * math.log2(2 * n / alpha) / info)


def topk_min_columns(n: int, alpha: float) -> int:
    """Smallest r for which every pair comparison in the Top-K solver is defined."""
    return coup_segments(n, alpha / (2 * n * n))


def subset_bound(n: int, eps: float, target: float) -> int:
    return _ceil(32000 * math.log(1.0 / (1.0 - target)) / (math.sqrt(n) * eps**2))
