"""Command-line interface: ``sstrank <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import generators as gen
from .codec import dumps_instance, read_instance, read_meta
from .errors import PreconditionError, SSTRankError
from .harness import competitive_report, estimate_rmin, estimate_success
from .info import info_vec, lb_domination
from .model import DominationInstance, TopKInstance, domination_from_topk
from .oracles import (
    exact_mutual_information,
    exact_success_bayes,
    exact_success_count,
    exact_success_max,
    resource_cost,
)
from .rng import Stream
from .samplers import sample_domination, sample_topk
from .solvers import SINGLE_SOLVERS
from .topk import solve_topk

FAMILIES = ["diag", "countingfails", "maxfails", "countingfails2", "maxfails2", "hard"]


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot encode {type(o).__name__}")


def _finite(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def _emit(args, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_subset(text: str | None, path: str) -> list[int] | None:
    """1-based comma list from the flag, else S_P from the file's meta."""
    if text:
        return [int(t) - 1 for t in text.split(",") if t.strip()]
    s_p = read_meta(path).get("s_p")
    return None if s_p is None else [int(i) - 1 for i in s_p]


def _domination(path: str) -> DominationInstance:
    inst = read_instance(path)
    if isinstance(inst, TopKInstance):
        raise PreconditionError("this command needs a domination instance")
    return inst


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> None:
    f = args.family
    meta = {"family": f}
    if f == "diag":
        inst = gen.gen_diag_eps(args.n, args.k, args.eps)
    elif f == "countingfails":
        inst = gen.gen_countingfails(args.n, args.k, args.eps)
    elif f == "maxfails":
        inst = gen.gen_maxfails(args.n, args.eps)
    elif f == "countingfails2":
        inst = gen.gen_countingfails2(args.n, args.eps)
    elif f == "maxfails2":
        inst = gen.gen_maxfails2(args.n, args.eps)
    else:
        stream = Stream(args.seed)
        draw = (gen.draw_hard_conditioned if args.conditioned else gen.draw_hard)(
            args.n, args.gamma, args.eps, args.scheme, stream
        )
        inst, meta = draw.instance, draw.meta()
    _emit(args, dumps_instance(inst, meta))


def cmd_info(args) -> None:
    inst = read_instance(args.instance)
    dom = domination_from_topk(inst) if isinstance(inst, TopKInstance) else inst
    rep = info_vec(dom)
    lbd = lb_domination(dom)
    lbt = math.inf if rep.total <= 0 else 0.1 / rep.total
    _emit(args, {
        "per_coordinate": rep.per_coordinate.tolist(),
        "total_bits": rep.total,
        "l1_gap": rep.l1_gap,
        "l2_gap_sq": rep.l2_gap_sq,
        "linf_gap": rep.linf_gap,
        "lb_domination": lbd.as_json(),
        "lb_topk": _finite(lbt),
        "unbounded": lbd.unbounded,
    })


def cmd_solve_domination(args) -> None:
    inst = _domination(args.instance)
    samples, truth = sample_domination(inst, args.r, Stream(args.seed, 0))
    subset = _parse_subset(args.subset, args.instance) if args.algo == "subset" else None
    out = SINGLE_SOLVERS[args.algo](samples, Stream(args.seed, 0).child(1), alpha=args.alpha, subset=subset)
    _emit(args, {
        "algo": args.algo,
        "r": args.r,
        "guess": out.guess,
        "diagnostics": out.diagnostics,
        "hidden_bit": truth.hidden_bit,
        "correct": out.guess == truth.hidden_bit,
    })


def cmd_solve_topk(args) -> None:
    inst = read_instance(args.instance, "topk")
    samples, truth = sample_topk(inst, args.r, Stream(args.seed, 0))
    labels, stats = solve_topk(samples, inst.k, args.alpha, Stream(args.seed, 0).child(1))
    true_top = truth.top_set(inst.k)
    _emit(args, {
        "labels": sorted(i + 1 for i in labels),
        "edge_queries": stats.edge_queries,
        "rounds": stats.rounds,
        "true_top": sorted(i + 1 for i in true_top),
        "correct": labels == true_top,
    })


def cmd_oracle(args) -> None:
    inst = _domination(args.instance)
    fns = {
        "success-count": lambda: exact_success_count(inst, args.r, exact=args.exact),
        "success-max": lambda: exact_success_max(inst, args.r, exact=args.exact),
        "success-bayes": lambda: exact_success_bayes(inst, args.r),
        "mi": lambda: exact_mutual_information(inst, args.r),
    }
    value = fns[args.what]()
    payload = {"what": args.what, "r": args.r, "value": float(value),
               "resource": resource_cost(args.what, inst.n, args.r)}
    if args.exact and args.what in ("success-count", "success-max"):
        payload["exact"] = str(value)
    _emit(args, payload)


def cmd_estimate_success(args) -> None:
    inst = read_instance(args.instance)
    subset = _parse_subset(args.subset, args.instance) if args.solver == "subset" else None
    est = estimate_success(args.solver, inst, args.r, args.trials, args.seed, args.alpha, subset, args.workers)
    _emit(args, {"solver": args.solver, "r": args.r, **asdict(est)})


def cmd_estimate_rmin(args) -> None:
    inst = read_instance(args.instance)
    subset = _parse_subset(args.subset, args.instance) if args.solver == "subset" else None
    est = estimate_rmin(args.solver, inst, args.target_p, args.trials, args.seed, args.alpha, subset,
                        r_max=args.r_max, instance_id=Path(args.instance).stem, workers=args.workers)
    _emit(args, asdict(est))


def cmd_report(args) -> None:
    inst = read_instance(args.instance)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    subset = _parse_subset(args.subset, args.instance) if "subset" in solvers else None
    rep = competitive_report(inst, solvers, args.target_p, args.seed, args.trials, args.alpha, subset,
                             instance_id=Path(args.instance).stem, r_max=args.r_max)
    _emit(args, rep.to_csv() if args.format == "csv" else rep.to_json())


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit base seed")
    common.add_argument("--trials", type=int, default=2000)
    common.add_argument("--alpha", type=float, default=0.25)
    common.add_argument("--target-p", type=float, default=0.75)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="sstrank", description="Top-K and Domination solvers under SST.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a generated instance")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--eps", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--scheme", choices=["constant-half", "embedding-ramp"], default="constant-half")
    g.add_argument("--conditioned", action="store_true", help="hard family: require |S_P| >= n*gamma/10")
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("info", parents=[common], help="information report for an instance")
    i.add_argument("instance")
    i.set_defaults(func=cmd_info)

    sd = sub.add_parser("solve-domination", parents=[common], help="sample once and run a solver")
    sd.add_argument("instance")
    sd.add_argument("--r", type=int, required=True)
    sd.add_argument("--algo", choices=sorted(SINGLE_SOLVERS), required=True)
    sd.add_argument("--subset", help="1-based comma list for --algo subset (default: S_P from the file)")
    sd.set_defaults(func=cmd_solve_domination)

    st = sub.add_parser("solve-topk", parents=[common], help="sample once and run the Top-K solver")
    st.add_argument("instance")
    st.add_argument("--r", type=int, required=True)
    st.set_defaults(func=cmd_solve_topk)

    o = sub.add_parser("oracle", parents=[common], help="exact small-instance quantities")
    o.add_argument("instance")
    o.add_argument("--what", choices=["success-count", "success-max", "success-bayes", "mi"], required=True)
    o.add_argument("--r", type=int, required=True)
    o.add_argument("--exact", action="store_true", help="rational arithmetic (n*r <= 64)")
    o.set_defaults(func=cmd_oracle)

    solver_names = sorted(SINGLE_SOLVERS) + ["topk"]
    es = sub.add_parser("estimate-success", parents=[common], help="Monte Carlo success probability")
    es.add_argument("instance")
    es.add_argument("--solver", choices=solver_names, required=True)
    es.add_argument("--r", type=int, required=True)
    es.add_argument("--subset")
    es.set_defaults(func=cmd_estimate_success)

    er = sub.add_parser("estimate-rmin", parents=[common], help="empirical minimal sample count")
    er.add_argument("instance")
    er.add_argument("--solver", choices=solver_names, required=True)
    er.add_argument("--r-max", type=int, default=2**26)
    er.add_argument("--subset")
    er.set_defaults(func=cmd_estimate_rmin)

    rp = sub.add_parser("report", parents=[common], help="competitive-ratio report")
    rp.add_argument("instance")
    rp.add_argument("--solvers", default="count,max,cube")
    rp.add_argument("--r-max", type=int, default=2**26)
    rp.add_argument("--subset")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SSTRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
