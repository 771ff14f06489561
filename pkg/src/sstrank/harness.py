"""Monte Carlo success estimation, empirical r_min search and competitive reports."""

from __future__ import annotations

import csv
import inspect
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from .errors import PreconditionError, ResourceError, SSTRankError
from .info import LowerBound, lb_domination, lb_topk
from .model import DominationInstance, TopKInstance
from .oracles import ENUM_MAX, enumeration_size, exact_success_bayes
from .rng import Stream, child_keys, stream_keys, words_for
from .samplers import sample_domination, sample_domination_batch, sample_topk
from .solvers import SOLVERS, SolverOutput, run_kernel
from .topk import solve_topk

TAG_SOLVER = 31
DEFAULT_MEMORY_BUDGET = 256 * 2**20
CSV_HEADER = ["instance", "solver", "target_p", "r_hat", "r_low", "r_high", "trials", "baseline_lb", "ratio"]


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class SuccessEstimate:
    trials: int
    successes: int
    p_hat: float
    wilson_low: float
    wilson_high: float
    seed: int

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int) -> "SuccessEstimate":
        lo, hi = wilson_interval(successes, trials)
        p_hat = successes / trials
        return cls(trials, successes, p_hat, min(lo, p_hat), max(hi, p_hat), seed)


Solver = str | Callable[..., Any]


def solver_stream(seed: int, trial: int) -> Stream:
    """Stream handed to the solver in a given trial."""
    return Stream(seed, trial).child(TAG_SOLVER)


def _chunk_size(instance: DominationInstance, r: int, name: str, budget: int) -> int:
    per_trial = 2 * instance.n * words_for(r) * 8 * (1.0 + SOLVERS[name].scratch_factor)
    return max(1, int(budget // per_trial))


def _batched_successes(name, instance, r, seed, start, stop, alpha, subset) -> int:
    ids = np.arange(start, stop, dtype=np.uint64)
    batch, hidden = sample_domination_batch(instance, r, seed, ids)
    keys = child_keys(stream_keys(seed, ids), TAG_SOLVER)
    try:
        guesses, _ = run_kernel(name, batch, keys, alpha=alpha, subset=subset)
    except SSTRankError as exc:
        raise type(exc)(f"trial {start}: {exc}") from exc
    return int(np.count_nonzero(guesses == hidden))


def _extra_args(solver: Callable, alpha: float, subset) -> dict:
    """Pass ``alpha`` and ``subset`` to callables that declare them."""
    try:
        params = inspect.signature(solver).parameters
    except (TypeError, ValueError):
        return {}
    return {k: v for k, v in (("alpha", alpha), ("subset", subset)) if k in params}


def _trial_success(solver, instance, r, seed, t, alpha, subset) -> bool:
    stream = Stream(seed, t)
    try:
        if isinstance(instance, TopKInstance):
            samples, truth = sample_topk(instance, r, stream)
            if solver == "topk":
                labels, _ = solve_topk(samples, instance.k, alpha, solver_stream(seed, t))
            else:
                labels = solver(samples, instance.k, solver_stream(seed, t))
            return frozenset(labels) == truth.top_set(instance.k)
        samples, truth = sample_domination(instance, r, stream)
        out = solver(samples, solver_stream(seed, t), **_extra_args(solver, alpha, subset))
        guess = out.guess if isinstance(out, SolverOutput) else int(out)
        return guess == truth.hidden_bit
    except SSTRankError as exc:
        raise type(exc)(f"trial {t}: {exc}") from exc


def estimate_success(
    solver: Solver,
    instance: DominationInstance | TopKInstance,
    r: int,
    trials: int,
    seed: int = 0,
    alpha: float = 0.25,
    subset: Iterable[int] | None = None,
    workers: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SuccessEstimate:
    """Run ``trials`` independent trials; trial t uses stream id t.

    ``solver`` is a solver name (``count``, ``max``, ``comb``, ``cube``,
    ``coup``, ``subset``; or ``topk`` for a Top-K instance) or a callable
    taking ``(samples, stream)`` (Domination) or ``(samples, k, stream)``
    (Top-K). Named Domination solvers run vectorized in chunks; results do
    not depend on chunking or ``workers``.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    if isinstance(instance, TopKInstance) and isinstance(solver, str) and solver != "topk":
        raise PreconditionError(f"solver {solver!r} does not apply to a Top-K instance")
    subset = None if subset is None else list(subset)
    if isinstance(solver, str) and isinstance(instance, DominationInstance):
        if solver not in SOLVERS:
            raise PreconditionError(f"unknown solver {solver!r}")
        size = _chunk_size(instance, r, solver, memory_budget)
        spans = [(s, min(s + size, trials)) for s in range(0, trials, size)]
        job = lambda span: _batched_successes(solver, instance, r, seed, span[0], span[1], alpha, subset)
    else:
        spans = [(t, t + 1) for t in range(trials)]
        job = lambda span: int(_trial_success(solver, instance, r, seed, span[0], alpha, subset))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            wins = sum(pool.map(job, spans))
    else:
        wins = sum(job(s) for s in spans)
    return SuccessEstimate.from_counts(wins, trials, seed)


@dataclass(frozen=True)
class RminEstimate:
    solver: str
    instance_id: str
    target_p: float
    r_hat: int | None
    r_low: int
    r_high: int | None
    trials_per_point: int
    decision_rule: str
    reached: bool
    transcript: tuple[dict, ...] = field(default_factory=tuple)


def _solver_id(solver: Solver) -> str:
    return solver if isinstance(solver, str) else getattr(solver, "__name__", "custom")


def _min_r(solver: Solver, instance, alpha: float) -> int:
    if isinstance(solver, str) and solver in SOLVERS and isinstance(instance, DominationInstance):
        return SOLVERS[solver].min_r(instance.n, alpha)
    if solver == "topk":
        from .bounds import topk_min_columns

        return topk_min_columns(instance.n, alpha)
    return 1


def estimate_rmin(
    solver: Solver,
    instance: DominationInstance | TopKInstance,
    target_p: float = 0.75,
    trials_per_point: int = 2000,
    seed: int = 0,
    alpha: float = 0.25,
    subset: Iterable[int] | None = None,
    r_max: int = 2**26,
    r_start: int | None = None,
    rel_width: float = 0.1,
    instance_id: str = "instance",
    workers: int = 1,
) -> RminEstimate:
    """Smallest r whose Wilson lower bound clears ``target_p``.

    Doubles r from the solver's minimum until the criterion holds, then
    bisects until the bracket is within ``rel_width`` of its upper end.
    Every point reuses the same seed, so points differ only through r.
    """
    if not 0.5 < target_p < 1.0:
        raise PreconditionError(f"target_p must lie in (0.5, 1), got {target_p}")
    subset = None if subset is None else list(subset)
    transcript: list[dict] = []
    cache: dict[int, SuccessEstimate] = {}

    def passes(r: int) -> bool:
        if r not in cache:
            est = estimate_success(solver, instance, r, trials_per_point, seed, alpha, subset, workers)
            cache[r] = est
            verdict = "crossed" if est.wilson_low >= target_p else (
                "not-reached" if est.wilson_high < target_p else "inconclusive")
            transcript.append({"r": r, "successes": est.successes, "trials": est.trials,
                               "wilson_low": est.wilson_low, "wilson_high": est.wilson_high,
                               "verdict": verdict})
        return cache[r].wilson_low >= target_p

    rule = f"wilson_low(95%) >= {target_p}"
    start = max(1, r_start or _min_r(solver, instance, alpha))
    if start > r_max:
        raise ResourceError(f"solver needs r >= {start}, above r_max={r_max}")
    lo, r = start - 1, start
    while not passes(r):
        lo = r
        if r >= r_max:
            return RminEstimate(_solver_id(solver), instance_id, target_p, None, lo, None,
                                trials_per_point, rule, False, tuple(transcript))
        r = min(2 * r, r_max)
    hi = r
    while hi - lo > 1 and hi - lo > rel_width * hi:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return RminEstimate(_solver_id(solver), instance_id, target_p, hi, lo, hi,
                        trials_per_point, rule, True, tuple(transcript))


@dataclass(frozen=True)
class CompetitiveReport:
    instance_id: str
    estimates: tuple[RminEstimate, ...]
    baseline: LowerBound
    bayes_rmin: int | None
    ratios: tuple[float | None, ...]

    def to_json(self) -> str:
        doc = {
            "instance": self.instance_id,
            "baseline_lb": self.baseline.as_json(),
            "baseline_unbounded": self.baseline.unbounded,
            "bayes_rmin": self.bayes_rmin,
            "estimates": [asdict(e) for e in self.estimates],
            "ratios": list(self.ratios),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for est, ratio in zip(self.estimates, self.ratios):
            w.writerow([
                self.instance_id, est.solver, repr(est.target_p), _cell(est.r_hat), est.r_low,
                _cell(est.r_high), est.trials_per_point, repr(self.baseline.value), _cell(ratio),
            ])
        return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def read_report_csv(text: str) -> list[dict[str, Any]]:
    """Parse a report CSV back into typed rows."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and list(rows[0].keys()) != CSV_HEADER:
        raise PreconditionError("unexpected CSV header")
    out = []
    for row in rows:
        out.append({
            "instance": row["instance"],
            "solver": row["solver"],
            "target_p": float(row["target_p"]),
            "r_hat": int(row["r_hat"]) if row["r_hat"] else None,
            "r_low": int(row["r_low"]),
            "r_high": int(row["r_high"]) if row["r_high"] else None,
            "trials": int(row["trials"]),
            "baseline_lb": float(row["baseline_lb"]),
            "ratio": float(row["ratio"]) if row["ratio"] else None,
        })
    return out


def bayes_rmin(instance: DominationInstance, target_p: float, r_cap: int = 4096) -> int | None:
    """Smallest r at which the optimal decision rule reaches ``target_p``, if enumerable."""
    r = 1
    while r <= r_cap and enumeration_size(instance.n, r) <= ENUM_MAX:
        if exact_success_bayes(instance, r) >= target_p:
            return r
        r += 1
    return None


def competitive_report(
    instance: DominationInstance | TopKInstance,
    solvers: Sequence[Solver],
    target_p: float = 0.75,
    seed: int = 0,
    trials_per_point: int = 2000,
    alpha: float = 0.25,
    subset: Iterable[int] | None = None,
    instance_id: str = "instance",
    r_max: int = 2**26,
) -> CompetitiveReport:
    baseline = lb_topk(instance) if isinstance(instance, TopKInstance) else lb_domination(instance)
    if baseline.unbounded or baseline.value <= 0:
        raise PreconditionError("no finite lower bound: the instance carries no information")
    estimates = tuple(
        estimate_rmin(s, instance, target_p, trials_per_point, seed, alpha, subset, r_max=r_max,
                      instance_id=instance_id)
        for s in solvers
    )
    ratios = tuple(None if e.r_hat is None else e.r_hat / baseline.value for e in estimates)
    bayes = bayes_rmin(instance, target_p) if isinstance(instance, DominationInstance) else None
    return CompetitiveReport(instance_id, estimates, baseline, bayes, ratios)
