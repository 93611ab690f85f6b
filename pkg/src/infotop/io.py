"""JSON documents for spaces, measures, lifted measures, sequences and decision problems."""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Mapping

from .convergence import MeasureSequence
from .decision import DecisionProblem
from .errors import ValidationError
from .lift import LiftedAtom, LiftedMeasure
from .measure import DiscreteMeasure, FiniteMetricSpace, ProductSpace

SIG_DIGITS = 12


def load_json(path) -> Any:
    """Parse a JSON file; syntax errors become validation errors with line and column."""
    text = Path(path).read_text() if str(path) != "-" else sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def rounded(obj, digits: int = SIG_DIGITS):
    """Round every float in a nested document to ``digits`` significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, Mapping):
        return {k: rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v, digits) for v in obj]
    return obj


def fmt(x: float) -> str:
    return f"{float(x):.{SIG_DIGITS}g}"


def _get(doc, key, where):
    if not isinstance(doc, Mapping):
        raise ValidationError(f"{where}: expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise ValidationError(f"{where}: missing field {key!r}")
    return doc[key]


# --- spaces and measures -----------------------------------------------------------


def space_to_doc(ax: FiniteMetricSpace) -> dict:
    points = []
    for p in ax.points:
        d = {"id": p.id}
        if p.coords is not None:
            d["coords"] = list(p.coords)
        points.append(d)
    metric = {"matrix": ax.matrix.tolist()} if ax.kind == "matrix" else ax.kind
    return {"name": ax.name, "points": points, "metric": metric}


def space_from_doc(doc, where: str = "space") -> FiniteMetricSpace:
    name = _get(doc, "name", where)
    pts = _get(doc, "points", where)
    metric = doc.get("metric", "discrete")
    if isinstance(metric, Mapping):
        metric = _get(metric, "matrix", f"{where}.metric")
    if not isinstance(pts, list):
        raise ValidationError(f"{where}.points: expected a list")
    points = []
    for i, p in enumerate(pts):
        if isinstance(p, str):
            points.append(p)
        else:
            points.append({"id": _get(p, "id", f"{where}.points[{i}]"), "coords": p.get("coords")})
    return FiniteMetricSpace(name, points, metric)


def product_from_doc(docs, where: str) -> ProductSpace:
    if not isinstance(docs, list) or not docs:
        raise ValidationError(f"{where}: expected a nonempty list of spaces")
    return ProductSpace([space_from_doc(d, f"{where}[{i}]") for i, d in enumerate(docs)])


def atoms_to_doc(mu: DiscreteMeasure) -> list:
    return [{"point": list(p), "weight": w} for p, w in mu.items()]


def _atoms_from_doc(docs, where):
    if not isinstance(docs, list):
        raise ValidationError(f"{where}: expected a list of atoms")
    out = []
    for i, a in enumerate(docs):
        point = _get(a, "point", f"{where}[{i}]")
        weight = _get(a, "weight", f"{where}[{i}]")
        if not isinstance(point, list) or not all(isinstance(s, str) for s in point):
            raise ValidationError(f"{where}[{i}].point: expected a list of point ids")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise ValidationError(f"{where}[{i}].weight: expected a number")
        out.append((tuple(point), float(weight)))
    return out


def measure_to_doc(mu: DiscreteMeasure) -> dict:
    return {"spaces": [space_to_doc(ax) for ax in mu.space.axes], "atoms": atoms_to_doc(mu)}


def measure_from_doc(doc, where: str = "measure") -> DiscreteMeasure:
    space = product_from_doc(_get(doc, "spaces", where), f"{where}.spaces")
    return DiscreteMeasure(space, _atoms_from_doc(_get(doc, "atoms", where), f"{where}.atoms"))


def load_measure(path) -> DiscreteMeasure:
    try:
        return measure_from_doc(load_json(path), str(path))
    except ValidationError as exc:
        msg = str(exc)
        raise ValidationError(msg if msg.startswith(str(path)) else f"{path}: {msg}") from None


# --- lifted measures -----------------------------------------------------------------


def lifted_to_doc(nu: LiftedMeasure) -> dict:
    atoms = []
    for a in nu.atoms:
        d = {"base": a.base, "inner": {"atoms": atoms_to_doc(a.inner)}, "weight": a.weight}
        if a.rest:
            d["rest"] = list(a.rest)
        atoms.append(d)
    doc = {"base_space": space_to_doc(nu.base_space),
           "inner_spaces": [space_to_doc(ax) for ax in nu.inner_space.axes],
           "inner_metric": nu.inner_metric, "functional": nu.functional, "atoms": atoms}
    if nu.extra is not None:
        doc["extra_spaces"] = [space_to_doc(ax) for ax in nu.extra.axes]
    return doc


def lifted_from_doc(doc, where: str = "lifted") -> LiftedMeasure:
    base = space_from_doc(_get(doc, "base_space", where), f"{where}.base_space")
    inner = product_from_doc(_get(doc, "inner_spaces", where), f"{where}.inner_spaces")
    extra = product_from_doc(doc["extra_spaces"], f"{where}.extra_spaces") if "extra_spaces" in doc else None
    atoms = []
    for i, a in enumerate(_get(doc, "atoms", where)):
        at = f"{where}.atoms[{i}]"
        inner_atoms = _atoms_from_doc(_get(_get(a, "inner", at), "atoms", f"{at}.inner"), f"{at}.inner.atoms")
        atoms.append(LiftedAtom(str(_get(a, "base", at)), DiscreteMeasure(inner, inner_atoms),
                                float(_get(a, "weight", at)), tuple(a.get("rest", ()))))
    return LiftedMeasure(base, inner, atoms, extra=extra, functional=bool(doc.get("functional", False)),
                         inner_metric=doc.get("inner_metric", "w1"))


# --- sequences and problems ------------------------------------------------------------


def sequence_from_doc(doc, where: str = "sequence") -> MeasureSequence:
    limit = measure_from_doc(_get(doc, "limit", where), f"{where}.limit")
    members = _get(doc, "members", where)
    if not isinstance(members, Mapping) or not members:
        raise ValidationError(f"{where}.members: expected a nonempty object keyed by index")
    table = {}
    for k, v in members.items():
        try:
            n = int(k)
        except ValueError:
            raise ValidationError(f"{where}.members: index {k!r} is not an integer") from None
        table[n] = measure_from_doc(v, f"{where}.members[{k}]")
    return MeasureSequence.from_members(table, limit)


def problem_from_doc(doc, where: str = "problem") -> DecisionProblem:
    prior = measure_from_doc(_get(doc, "prior", where), f"{where}.prior")
    entries = _get(doc, "cost", where)
    if not isinstance(entries, list):
        raise ValidationError(f"{where}.cost: expected a list of {{point, value}} entries")
    cost = {}
    for i, e in enumerate(entries):
        point = _get(e, "point", f"{where}.cost[{i}]")
        if not isinstance(point, list) or len(point) != 3:
            raise ValidationError(f"{where}.cost[{i}].point: expected [a, b, c]")
        cost[tuple(str(s) for s in point)] = _get(e, "value", f"{where}.cost[{i}]")
    if "actions" in doc:
        actions = space_from_doc(doc["actions"], f"{where}.actions")
    else:
        ids = sorted({p[2] for p in cost})
        if not ids:
            raise ValidationError(f"{where}: no actions given and the cost list is empty")
        actions = FiniteMetricSpace("C", ids)
    return DecisionProblem(prior, actions, cost)
