"""Instance files: a single JSON object with exact rational strings.

Example::

    {
      "points": ["a", "b", "c"],
      "metric": [["0", "1", "2"], ["1", "0", "1"], ["2", "1", "0"]],
      "ck": ["3", "1", "0"],
      "problem": {"f": ["b", "c", "c"]}
    }

Numbers are JSON integers or strings ``"p"`` / ``"p/q"``; ``"inf"`` is
allowed in ``ckinf`` and ``ot``.  Decimals and floats are rejected.  At most
one of ``ck``, ``ckinf``, ``ot`` may be given.  Points in the ``problem``
block are referred to by label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .core import (
    ExtScalar,
    FiniteMetricSpace,
    PointId,
    StructureError,
    check_metric_axioms,
    ext_scalar,
    format_ext,
    scalar,
)
from .functions import CkFunction, CkInfFunction, OtFunction

__all__ = ["InstanceFile", "parse_instance", "serialize_instance", "load_instance"]

_TOP_KEYS = ("points", "metric", "ck", "ckinf", "ot", "problem")
_PROBLEM_KEYS = ("f", "F", "psi", "M", "b", "x0", "gamma", "eps", "delta")


@dataclass(frozen=True)
class InstanceFile:
    labels: tuple[str, ...]
    metric: tuple[tuple[Fraction, ...], ...]
    ck: tuple[Fraction, ...] | None = None
    ckinf: tuple[ExtScalar, ...] | None = None
    ot: tuple[tuple[ExtScalar, ...], ...] | None = None
    problem: dict = field(default_factory=dict, compare=True)

    def metric_violations(self):
        return check_metric_axioms(self.metric)

    def space(self) -> FiniteMetricSpace:
        return FiniteMetricSpace(self.labels, self.metric)

    def ck_function(self) -> CkFunction | None:
        return None if self.ck is None else CkFunction(self.ck)

    def ckinf_function(self) -> CkInfFunction | None:
        return None if self.ckinf is None else CkInfFunction(self.ckinf)

    def ot_function(self) -> OtFunction | None:
        return None if self.ot is None else OtFunction(self.ot)


class _Reader:
    def __init__(self, labels):
        self.labels = labels

    def point(self, value, where) -> PointId:
        if not isinstance(value, str) or value not in self.labels:
            raise StructureError(f"{where}: unknown point {value!r}")
        return self.labels.index(value)

    def points(self, value, where) -> tuple[PointId, ...]:
        if not isinstance(value, list):
            raise StructureError(f"{where}: expected a list of point labels")
        return tuple(self.point(v, f"{where}[{i}]") for i, v in enumerate(value))


def _num(value, where, ext=False):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise StructureError(f"{where}: expected an integer or a rational string, got {value!r}")
    try:
        return ext_scalar(value) if ext else scalar(value)
    except StructureError as exc:
        raise StructureError(f"{where}: {exc}") from None


def _vector(value, n, where, ext=False):
    if not isinstance(value, list):
        raise StructureError(f"{where}: expected a list")
    if len(value) != n:
        raise StructureError(f"{where}: dimension mismatch, {len(value)} entries for {n} points")
    return tuple(_num(v, f"{where}[{i}]", ext) for i, v in enumerate(value))


def _matrix(value, n, where, ext=False):
    if not isinstance(value, list):
        raise StructureError(f"{where}: expected a list of rows")
    if len(value) != n:
        raise StructureError(f"{where}: dimension mismatch, {len(value)} rows for {n} points")
    return tuple(_vector(row, n, f"{where}[{i}]", ext) for i, row in enumerate(value))


def parse_instance(text: str) -> InstanceFile:
    """Parse an instance document; every error is a :class:`StructureError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise StructureError("instance must be a single JSON object")
    unknown = sorted(set(doc) - set(_TOP_KEYS))
    if unknown:
        raise StructureError(f"unknown key(s): {', '.join(unknown)}")
    for key in ("points", "metric"):
        if key not in doc:
            raise StructureError(f"missing required key {key!r}")
    labels = doc["points"]
    if not isinstance(labels, list) or not labels or not all(isinstance(s, str) for s in labels):
        raise StructureError("points: expected a nonempty list of string labels")
    if len(set(labels)) != len(labels):
        raise StructureError("points: labels must be distinct")
    labels = tuple(labels)
    n = len(labels)
    present = [k for k in ("ck", "ckinf", "ot") if k in doc]
    if len(present) > 1:
        raise StructureError(f"give at most one of ck/ckinf/ot, found {', '.join(present)}")

    metric = _matrix(doc["metric"], n, "metric")
    ck = _vector(doc["ck"], n, "ck") if "ck" in doc else None
    ckinf = _vector(doc["ckinf"], n, "ckinf", ext=True) if "ckinf" in doc else None
    ot = _matrix(doc["ot"], n, "ot", ext=True) if "ot" in doc else None
    problem = _problem(doc.get("problem", {}), _Reader(labels), n)
    return InstanceFile(labels, metric, ck, ckinf, ot, problem)


def _problem(block, reader: _Reader, n: int) -> dict:
    if not isinstance(block, dict):
        raise StructureError("problem: expected an object")
    unknown = sorted(set(block) - set(_PROBLEM_KEYS))
    if unknown:
        raise StructureError(f"problem: unknown key(s): {', '.join(unknown)}")
    out: dict[str, Any] = {}
    if "f" in block:
        f = reader.points(block["f"], "problem.f")
        if len(f) != n:
            raise StructureError(f"problem.f: dimension mismatch, {len(f)} images for {n} points")
        out["f"] = f
    if "F" in block:
        F = block["F"]
        if not isinstance(F, list) or len(F) != n:
            raise StructureError(f"problem.F: expected {n} lists of point labels")
        imgs = tuple(frozenset(reader.points(s, f"problem.F[{i}]")) for i, s in enumerate(F))
        if not all(imgs):
            raise StructureError("problem.F: every image must be nonempty")
        out["F"] = imgs
    for key in ("psi", "M"):
        if key in block:
            out[key] = frozenset(reader.points(block[key], f"problem.{key}"))
    for key in ("b", "x0"):
        if key in block:
            out[key] = reader.point(block[key], f"problem.{key}")
    for key in ("gamma", "eps", "delta"):
        if key in block:
            out[key] = _num(block[key], f"problem.{key}")
    return out


def serialize_instance(inst: InstanceFile) -> str:
    """Canonical JSON text; ``parse_instance(serialize_instance(i)) == i``."""
    labels = inst.labels
    doc: dict[str, Any] = {
        "points": list(labels),
        "metric": [[str(v) for v in row] for row in inst.metric],
    }
    if inst.ck is not None:
        doc["ck"] = [str(v) for v in inst.ck]
    if inst.ckinf is not None:
        doc["ckinf"] = [format_ext(v) for v in inst.ckinf]
    if inst.ot is not None:
        doc["ot"] = [[format_ext(v) for v in row] for row in inst.ot]
    if inst.problem:
        p = inst.problem
        block: dict[str, Any] = {}
        if "f" in p:
            block["f"] = [labels[y] for y in p["f"]]
        if "F" in p:
            block["F"] = [[labels[y] for y in sorted(s)] for s in p["F"]]
        for key in ("psi", "M"):
            if key in p:
                block[key] = [labels[y] for y in sorted(p[key])]
        for key in ("b", "x0"):
            if key in p:
                block[key] = labels[p[key]]
        for key in ("gamma", "eps", "delta"):
            if key in p:
                block[key] = str(p[key])
        doc["problem"] = block
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_instance(path) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
