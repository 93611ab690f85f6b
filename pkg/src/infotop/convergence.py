"""Sequence diagnostics: distance traces under several metrics, evidence verdicts,
and two finite-support sufficient conditions for convergence in information
(uniform density convergence and pointwise kernel convergence).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .lift import info_distance, inner_distance
from .measure import DiscreteMeasure, align, disintegrate, marginal
from .metrics import RAW, TRUNC, ProductFamily, default_family, prohorov, setwise_gap, tv_distance, wasserstein1

METRICS = ("tv", "setwise", "w1", "prohorov", "info")
CONVERGING = "converging-evidence"
NON_CONVERGING = "non-converging-evidence"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MeasureSequence:
    """Measures mu_n for n in ``indices`` (via ``generator``) and a candidate limit."""

    indices: tuple[int, ...]
    generator: Callable[[int], DiscreteMeasure]
    limit: DiscreteMeasure
    name: str = ""

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValidationError("a sequence needs at least one index")
        if idx[0] < 1 or any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError("indices must be strictly increasing positive integers")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_members(cls, members: Mapping[int, DiscreteMeasure], limit: DiscreteMeasure, name: str = ""):
        table = dict(members)
        return cls(tuple(sorted(table)), table.__getitem__, limit, name)

    def member(self, n: int) -> DiscreteMeasure:
        try:
            mu = self.generator(n)
        except Exception as exc:  # report which index broke
            raise ValidationError(f"sequence generator failed at index {n}: {exc}") from exc
        if not isinstance(mu, DiscreteMeasure):
            raise ValidationError(f"sequence generator returned {type(mu).__name__} at index {n}")
        if mu.axis_names != self.limit.axis_names:
            raise ValidationError(f"member at index {n} has axes {mu.axis_names}, limit has {self.limit.axis_names}")
        return mu

    def with_indices(self, indices: Sequence[int]) -> "MeasureSequence":
        return MeasureSequence(tuple(indices), self.generator, self.limit, self.name)


@dataclass(frozen=True)
class AnalysisParams:
    tol_conv: float = 1e-2
    tol_sep: float = 1e-1
    window: int = 5
    slack: float = 1e-6
    base: str = "w1"
    family: object = None
    info_axes: tuple | None = None

    def describe(self) -> dict:
        fam = self.family
        if fam is None:
            fam_desc = "default (per-index, on the merged space)"
        elif isinstance(fam, ProductFamily):
            fam_desc = fam.describe()
        else:
            fam_desc = {"kind": "list", "sets": len(fam)}
        return {"tol_conv": self.tol_conv, "tol_sep": self.tol_sep, "window": self.window, "slack": self.slack,
                "base": self.base, "family": fam_desc,
                "info_axes": list(self.info_axes) if self.info_axes else None}


@dataclass
class ConvergenceReport:
    traces: dict[str, list[tuple[int, float]]]
    verdicts: dict[str, str]
    params: dict
    notes: list[str] = field(default_factory=list)

    def values(self, metric: str) -> list[float]:
        return [v for _, v in self.traces[metric]]

    def to_dict(self) -> dict:
        return {
            "traces": {m: [[n, v] for n, v in t] for m, t in self.traces.items()},
            "verdicts": dict(self.verdicts),
            "params": self.params,
            "notes": list(self.notes),
        }


def verdict(values: Sequence[float], tol_conv: float = 1e-2, tol_sep: float = 1e-1, window: int = 5,
            slack: float = 1e-6) -> str:
    """Classify a distance trace; the labels are evidence, not proof."""
    vals = [float(v) for v in values]
    if not vals or any(not np.isfinite(v) for v in vals[-window:]):
        return INCONCLUSIVE
    tail = vals[-window:]
    if vals[-1] < tol_conv and all(b <= a + slack for a, b in zip(tail, tail[1:])):
        return CONVERGING
    if min(tail) >= tol_sep:
        return NON_CONVERGING
    return INCONCLUSIVE


def _distance(metric: str, mu: DiscreteMeasure, limit: DiscreteMeasure, params: AnalysisParams) -> float:
    if metric == "tv":
        return tv_distance(mu, limit)
    if metric == "w1":
        return wasserstein1(mu, limit, TRUNC)[0]
    if metric == "prohorov":
        return prohorov(mu, limit, RAW)
    if metric == "setwise":
        return setwise_gap(mu, limit, params.family)
    if metric == "info":
        axes = params.info_axes
        if axes:
            mu, limit = marginal(mu, axes), marginal(limit, axes)
        return info_distance(mu, limit, params.base)
    raise ValidationError(f"unknown metric {metric!r}; choose from {METRICS}")


def analyze(seq: MeasureSequence, metrics: Sequence[str], params: AnalysisParams | None = None,
            **overrides) -> ConvergenceReport:
    """Distance of each member to the limit under each metric, plus a verdict per metric."""
    params = params or AnalysisParams()
    if overrides:
        params = AnalysisParams(**{**params.__dict__, **overrides})
    metrics = list(dict.fromkeys(metrics))
    for m in metrics:
        if m not in METRICS:
            raise ValidationError(f"unknown metric {m!r}; choose from {METRICS}")
    if "info" in metrics and params.base not in ("w1", "prohorov"):
        raise ValidationError(f"info base must be 'w1' or 'prohorov', got {params.base!r}")
    traces = {m: [] for m in metrics}
    for n in seq.indices:
        mu = seq.member(n)
        for m in metrics:
            traces[m].append((n, _distance(m, mu, seq.limit, params)))
    verdicts = {m: verdict([v for _, v in traces[m]], params.tol_conv, params.tol_sep, params.window, params.slack)
                for m in metrics}
    notes = []
    if "setwise" in metrics and params.family is None:
        fam = default_family(align(seq.member(seq.indices[-1]), seq.limit)[0].space)
        notes.append(f"setwise family at the last index: {fam.note} ({len(fam)} sets)")
    return ConvergenceReport(traces, verdicts, params.describe(), notes)


# --- sufficient conditions ------------------------------------------------------


def _densities(mu: DiscreteMeasure) -> tuple[dict, dict, dict]:
    x, y = mu.axis_names
    mx, my = marginal(mu, x), marginal(mu, y)
    return dict(mu.items()), {p[0]: w for p, w in mx.items()}, {p[0]: w for p, w in my.items()}


def _density_at(p, joint, mx, my):
    """Density w.r.t. the product of marginals, or None where that product vanishes."""
    px, py = mx.get(p[0], 0.0), my.get(p[1], 0.0)
    if px <= 0 or py <= 0:
        return None
    return joint.get(p, 0.0) / (px * py)


@dataclass
class CriterionReport:
    criterion: str
    verdict: str
    trace: list
    details: dict
    implied_info_convergence: bool
    info_check: dict
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "verdict": self.verdict, "trace": self.trace, "details": self.details,
                "implied_info_convergence": self.implied_info_convergence, "info_check": self.info_check,
                "notes": list(self.notes)}


def _two_axes(seq: MeasureSequence):
    if len(seq.limit.axis_names) != 2:
        raise ValidationError("criterion needs measures on exactly two axes")


def _info_check(rep: ConvergenceReport, implied: bool) -> dict:
    agrees = (not implied) or rep.verdicts["info"] == CONVERGING
    return {"w1": rep.verdicts["w1"], "info": rep.verdicts["info"], "consistent": agrees}


def density_criterion(seq: MeasureSequence, tol: float | None = None, params: AnalysisParams | None = None
                      ) -> CriterionReport:
    """Uniform convergence of densities against the product of marginals.

    For each index the trace holds ``sup |f_n - f|`` over atoms of either
    support where both densities are defined. Atoms of mu_n's support where
    the limit density is undefined make the criterion inapplicable; atoms of
    the limit's support where f_n is undefined count as a mismatch.
    """
    _two_axes(seq)
    params = params or AnalysisParams()
    tol = params.tol_conv if tol is None else tol
    lim_joint, lim_x, lim_y = _densities(seq.limit)
    trace, undefined_limit, undefined_member = [], {}, {}
    for n in seq.indices:
        joint, mx, my = _densities(seq.member(n))
        gap, miss_lim, miss_mem = 0.0, [], []
        for p in sorted(set(joint) | set(lim_joint)):
            fn = _density_at(p, joint, mx, my)
            f = _density_at(p, lim_joint, lim_x, lim_y)
            if f is None and p in joint:
                miss_lim.append(list(p))
            elif fn is None and p in lim_joint:
                miss_mem.append(list(p))
            elif f is not None and fn is not None:
                gap = max(gap, abs(fn - f))
        trace.append([n, gap])
        if miss_lim:
            undefined_limit[n] = miss_lim
        if miss_mem:
            undefined_member[n] = miss_mem
    tail = seq.indices[-params.window:]
    cross = analyze(seq, ["w1", "info"], params)
    notes = ["finite supports: each joint has a density wherever the product of its marginals is positive"]
    if any(n in undefined_limit for n in tail):
        result = "inapplicable"
        notes.append("the limit density is undefined at atoms charged by late members (supports move)")
    elif trace[-1][1] < tol and not any(n in undefined_member for n in tail) \
            and cross.verdicts["w1"] == CONVERGING:
        result = "satisfied"
    else:
        result = "violated"
    implied = result == "satisfied"
    details = {"tol": tol, "undefined_limit": {str(k): v for k, v in undefined_limit.items()},
               "undefined_member": {str(k): v for k, v in undefined_member.items()}}
    return CriterionReport("density", result, trace, details, implied, _info_check(cross, implied), notes)


def kernel_criterion(seq: MeasureSequence, base: str = "w1", tol: float | None = None,
                     params: AnalysisParams | None = None) -> CriterionReport:
    """Pointwise convergence of conditionals on a fixed first axis.

    Only the discrete reduction is implemented: every member must live on the
    same first-axis points as the limit (a sequence x_n -> x is then
    eventually constant). Traces are per limit-support point x.
    """
    _two_axes(seq)
    params = params or AnalysisParams(base=base)
    tol = params.tol_conv if tol is None else tol
    x_name = seq.limit.axis_names[0]
    x_axis = seq.limit.space.axes[0]
    members = {n: seq.member(n) for n in seq.indices}
    notes = ["discrete reduction: convergent sequences in the first axis are eventually constant"]
    moving = [n for n, mu in members.items() if not mu.space.axes[0].same_as(x_axis)]
    if moving:
        notes.append(f"first-axis points differ from the limit's at indices {moving[:5]}; no finite check applies")
        return CriterionReport("kernel", "inapplicable", [], {"moving_indices": moving}, False,
                               _info_check(analyze(seq, ["w1", "info"], params), False), notes)
    lim_marg, lim_k = disintegrate(seq.limit, x_name)
    traces = {}
    for (x,), _ in lim_marg.items():
        row = []
        for n, mu in members.items():
            marg, k = disintegrate(mu, x_name)
            if (x,) not in k.rows:
                row.append([n, float("nan")])
            else:
                row.append([n, inner_distance(k.rows[(x,)], lim_k.rows[(x,)], base)])
        traces[x] = row
    marg_trace = [wasserstein1(marginal(mu, x_name), lim_marg, TRUNC)[0] for mu in members.values()]
    finals = [t[-1][1] for t in traces.values()]
    ok = all(np.isfinite(v) and v < tol for v in finals) and \
        verdict(marg_trace, params.tol_conv, params.tol_sep, params.window, params.slack) == CONVERGING
    result = "satisfied" if ok else "violated"
    details = {"tol": tol, "base": base, "marginal_w1": [[n, v] for n, v in zip(seq.indices, marg_trace)]}
    trace = [{"x": x, "trace": t} for x, t in traces.items()]
    return CriterionReport("kernel", result, trace, details, ok,
                           _info_check(analyze(seq, ["w1", "info"], params), ok), notes)
