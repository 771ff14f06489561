"""JSON instance files.

Top-K: ``{"kind":"topk","n":N,"k":K,"P":[[...],...]}`` (k is 1-based).
Domination: ``{"kind":"domination","n":N,"p":[...],"q":[...]}``.
Floats are written with 17 significant digits, which round-trips float64
exactly. An optional ``"meta"`` object is passed through untouched.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvariantError, LoadError, SSTRankError
from .model import DominationInstance, ProbMatrix, TopKInstance, validate_sst

Instance = TopKInstance | DominationInstance


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _vec(v) -> str:
    return "[" + ",".join(_num(x) for x in v) + "]"


def dumps_instance(instance: Instance, meta: dict[str, Any] | None = None) -> str:
    if isinstance(instance, TopKInstance):
        rows = ",\n  ".join(_vec(r) for r in instance.matrix.entries)
        body = f'"kind":"topk","n":{instance.n},"k":{instance.k},"P":[\n  {rows}]'
    elif isinstance(instance, DominationInstance):
        body = f'"kind":"domination","n":{instance.n},"p":{_vec(instance.p)},"q":{_vec(instance.q)}'
    else:
        raise TypeError(f"cannot serialize {type(instance).__name__}")
    if meta:
        body += ',"meta":' + json.dumps(meta, sort_keys=True)
    return "{" + body + "}\n"


def write_instance(instance: Instance, path, meta: dict[str, Any] | None = None) -> None:
    Path(path).write_text(dumps_instance(instance, meta), encoding="utf-8")


def loads_instance(text: str, kind: str | None = None) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise LoadError("instance must be a JSON object with a 'kind' field")
    found = doc["kind"]
    if kind is not None and found != kind:
        raise LoadError(f"expected kind {kind!r}, found {found!r}")
    try:
        n = int(doc["n"])
        if found == "domination":
            p = np.asarray(doc["p"], dtype=np.float64)
            q = np.asarray(doc["q"], dtype=np.float64)
            if p.shape != (n,) or q.shape != (n,):
                raise LoadError(f"p and q must have length n={n}")
            if np.any(q > p) or np.any(p > 1) or np.any(q < 0):
                raise LoadError("domination order violated: need 1 >= p_i >= q_i >= 0")
            return DominationInstance(p, q)
        if found == "topk":
            a = np.asarray(doc["P"], dtype=np.float64)
            if a.shape != (n, n):
                raise LoadError(f"P must be {n}x{n}, got {a.shape}")
            verdict = validate_sst(a)
            if not verdict.ok:
                raise LoadError(f"SST check failed: {verdict}")
            return TopKInstance(ProbMatrix(a, check=False), int(doc["k"]))
    except LoadError:
        raise
    except (KeyError, TypeError, ValueError, InvariantError, SSTRankError) as exc:
        raise LoadError(f"invalid instance: {exc}") from exc
    raise LoadError(f"unknown instance kind {found!r}")


def read_instance(path, kind: str | None = None) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc
    return loads_instance(text, kind)


def read_meta(path) -> dict[str, Any]:
    """The optional ``meta`` object of an instance file (empty if absent)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(str(exc)) from exc
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise LoadError("meta must be an object")
    return meta
