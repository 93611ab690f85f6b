"""Randomized strategies gain nothing over deterministic ones.

Draws random decision problems, solves the relaxed problem, extracts a
deterministic rule and compares both with brute-force enumeration.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from _common import parse_config, save
from infotop.decision import evaluate, extract_deterministic, induced_joint, solve_randomized
from infotop.measure import cond_indep_gap
from infotop.sampling import random_problem


@dataclass
class Config:
    trials: int = 500
    max_size: int = 4
    seed: int = 0
    out: str = ""


def enumerate_rules(p):
    obs, acts = p.observations, p.actions.ids
    best = np.inf
    for choice in itertools.product(acts, repeat=len(obs)):
        rule = dict(zip(obs, choice))
        best = min(best, sum(w * p.cost[(a, b, rule[a])] for (a, b), w in p.prior.items()))
    return float(best)


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    gaps, det_gaps, ci, lp_gaps = [], [], [], []
    t0 = time.perf_counter()
    for i in range(cfg.trials):
        p = random_problem(rng, cfg.max_size, integer_costs=i % 2 == 0)
        best = enumerate_rules(p)
        value, r = solve_randomized(p)
        gaps.append(abs(value - best))
        det_gaps.append(abs(evaluate(p, extract_deterministic(p, r)) - best))
        ci.append(cond_indep_gap(induced_joint(p, r), "A", "B", "C"))
        lp_gaps.append(abs(solve_randomized(p, "lp")[0] - value))
    result = {
        "trials": cfg.trials,
        "max |relaxed - enumerated|": max(gaps),
        "max |extracted - enumerated|": max(det_gaps),
        "max |lp - decompose|": max(lp_gaps),
        "max cond_indep_gap": max(ci),
        "seconds": round(time.perf_counter() - t0, 2),
    }
    for k, v in result.items():
        print(f"{k}: {v}")
    save(result, cfg.out)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
