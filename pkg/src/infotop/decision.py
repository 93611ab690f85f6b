"""One-shot decisions under partial observation.

An agent sees a, not b, and picks an action c; ``prior`` is the law of (a, b)
and ``cost(a, b, c)`` is nonnegative. Randomized strategies are kernels from
observations to actions. The relaxed problem splits into one small problem
per observation, each solved at a point mass, so deterministic strategies
lose nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .errors import ValidationError
from .lift import expected_cost, phi
from .measure import DiscreteMeasure, FiniteMetricSpace, Kernel, ProductSpace, disintegrate

TIE_TOL = 1e-12


class DecisionProblem:
    """Prior on A x B, a finite action axis and a cost table over support x actions."""

    def __init__(self, prior: DiscreteMeasure, actions: FiniteMetricSpace, cost):
        if len(prior.axis_names) != 2:
            raise ValidationError("the prior must live on exactly two axes (observation, state)")
        if actions.name in prior.axis_names:
            raise ValidationError(f"action axis name {actions.name!r} clashes with the prior's axes")
        self.prior = prior
        self.actions = actions
        self.obs_name, self.state_name = prior.axis_names
        self.marg, self.posterior = disintegrate(prior, self.obs_name)
        self.observations = tuple(p[0] for p in self.marg.support)
        table = {}
        for (a, b) in prior.support:
            for c in actions.ids:
                if callable(cost):
                    v = cost((a, b, c))
                else:
                    try:
                        v = cost[(a, b, c)]
                    except KeyError:
                        raise ValidationError(f"cost table has no entry for {(a, b, c)}") from None
                v = float(v)
                if not np.isfinite(v) or v < 0:
                    raise ValidationError(f"cost at {(a, b, c)} must be finite and nonnegative, got {v!r}")
                table[(a, b, c)] = v
        self.cost = MappingProxyType(table)

    @property
    def joint_space(self) -> ProductSpace:
        return self.prior.space.concat(ProductSpace([self.actions]))

    def action_costs(self, a: str) -> np.ndarray:
        """Conditional expected cost of each action given the observation a."""
        row = self.posterior[(a,)]
        return np.array([sum(v * self.cost[(a, b, c)] for (b,), v in row.items()) for c in self.actions.ids])


@dataclass(frozen=True)
class Strategy:
    """Either ``rule`` (observation id -> action id) or ``kernel`` (observation -> law on actions)."""

    rule: Mapping[str, str] | None = None
    kernel: Kernel | None = None

    def __post_init__(self):
        if (self.rule is None) == (self.kernel is None):
            raise ValidationError("a strategy is either deterministic (rule) or randomized (kernel)")
        if self.rule is not None:
            object.__setattr__(self, "rule", MappingProxyType(dict(sorted(self.rule.items()))))

    @property
    def deterministic(self) -> bool:
        return self.rule is not None

    def row(self, a: str, actions: FiniteMetricSpace) -> DiscreteMeasure:
        if self.rule is not None:
            return DiscreteMeasure.dirac(ProductSpace([actions]), self.rule[a])
        return self.kernel[(a,)]

    def to_dict(self) -> dict:
        if self.rule is not None:
            return dict(self.rule)
        return {g[0]: {p[0]: w for p, w in row.items()} for g, row in self.kernel.rows.items()}


def randomized(p: DecisionProblem, rows: Mapping[str, Mapping[str, float]]) -> Strategy:
    target = ProductSpace([p.actions])
    built = {(a,): DiscreteMeasure(target, {(c,): w for c, w in row.items()}) for a, row in rows.items()}
    return Strategy(kernel=Kernel(p.marg.space, target, MappingProxyType(dict(sorted(built.items())))))


def _check_domain(p: DecisionProblem, s: Strategy):
    dom = set(s.rule) if s.rule is not None else {g[0] for g in s.kernel.rows}
    if dom != set(p.observations):
        raise ValidationError(f"strategy is defined on {sorted(dom)}, observations are {list(p.observations)}")
    if s.rule is not None:
        for a, c in s.rule.items():
            p.actions.index(c)
    else:
        if s.kernel.target != (p.actions.name,):
            raise ValidationError(f"strategy rows live on {s.kernel.target}, expected ({p.actions.name!r},)")


def action_law(p: DecisionProblem, s: Strategy) -> DiscreteMeasure:
    """The joint law of (observation, action): row(a)(c) times prior^A(a)."""
    _check_domain(p, s)
    atoms = {}
    for (a,), w in p.marg.items():
        for (c,), v in s.row(a, p.actions).items():
            atoms[(a, c)] = w * v
    return DiscreteMeasure(ProductSpace([p.prior.space.axes[0], p.actions]), atoms)


def evaluate(p: DecisionProblem, s: Strategy) -> float:
    _check_domain(p, s)
    if s.deterministic:
        return float(sum(w * p.cost[(a, b, s.rule[a])] for (a, b), w in p.prior.items()))
    return expected_cost(p.cost, p.prior, action_law(p, s))


def induced_joint(p: DecisionProblem, s: Strategy) -> DiscreteMeasure:
    """Law of (observation, state, action) when actions follow the strategy."""
    return phi(p.prior, action_law(p, s))


def _uniform_argmin(q: np.ndarray) -> np.ndarray:
    best = q.min()
    mask = q <= best + TIE_TOL
    return mask / mask.sum()


def solve_randomized(p: DecisionProblem, method: str = "decompose") -> tuple[float, Strategy]:
    """Optimal value over randomized strategies and a strategy attaining it.

    ``decompose`` minimises each observation's conditional cost separately and
    spreads mass evenly over tied actions. ``lp`` solves the joint linear
    program instead, for cross-checking.
    """
    ids = p.actions.ids
    if method == "decompose":
        rows = {}
        for a in p.observations:
            weights = _uniform_argmin(p.action_costs(a))
            rows[a] = {c: float(w) for c, w in zip(ids, weights) if w > 0}
    elif method == "lp":
        obs, k = p.observations, len(ids)
        q = np.concatenate([p.marg.weight((a,)) * p.action_costs(a) for a in obs])
        eq = np.zeros((len(obs), len(obs) * k))
        for i in range(len(obs)):
            eq[i, i * k:(i + 1) * k] = 1.0
        res = linprog(q, A_eq=eq, b_eq=np.ones(len(obs)), bounds=(0, None), method="highs")
        if res.status != 0:
            raise RuntimeError(f"linear program failed: {res.message}")
        x = np.clip(res.x.reshape(len(obs), k), 0.0, None)
        x[x < 1e-12] = 0.0
        rows = {a: {c: float(w) for c, w in zip(ids, r / r.sum()) if w > 0} for a, r in zip(obs, x)}
    else:
        raise ValidationError(f"method must be 'decompose' or 'lp', got {method!r}")
    s = randomized(p, rows)
    return evaluate(p, s), s


def extract_deterministic(p: DecisionProblem, r: Strategy) -> Strategy:
    """Per observation, the cheapest action in the row's support (smallest id on ties)."""
    _check_domain(p, r)
    ids = p.actions.ids
    rule = {}
    for a in p.observations:
        q = p.action_costs(a)
        support = [c for (c,), _ in r.row(a, p.actions).items()]
        best = min(q[ids.index(c)] for c in support)
        rule[a] = min(c for c in support if q[ids.index(c)] <= best + TIE_TOL)
    return Strategy(rule=rule)
