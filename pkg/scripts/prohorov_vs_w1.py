"""Compare the two weak metrics and their lifted versions on random pairs.

Checks the sandwich P^2 <= W1 <= (1 + diam) P under the truncated ground
metric (diameter 2 on two axes) and that W1 never exceeds its lifted version.
For Prohorov no such domination is claimed; the script only counts how often
the lifted distance is the larger one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from _common import parse_config, save
from infotop.lift import info_distance
from infotop.metrics import RAW, TRUNC, prohorov, w1
from infotop.sampling import random_pair


@dataclass
class Config:
    trials: int = 300
    max_size: int = 4
    seed: int = 1
    out: str = ""


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for _ in range(cfg.trials):
        kinds = [str(k) for k in rng.choice(["discrete", "euclidean"], size=1)] * 2
        mu, nu = random_pair(rng, ("A", "B"), cfg.max_size, kinds)
        rows.append({
            "w1": w1(mu, nu),
            "prohorov_trunc": prohorov(mu, nu, TRUNC),
            "prohorov_raw": prohorov(mu, nu, RAW),
            "info_w1": info_distance(mu, nu, "w1"),
            "info_prohorov": info_distance(mu, nu, "prohorov"),
        })
    w = np.array([r["w1"] for r in rows])
    p = np.array([r["prohorov_trunc"] for r in rows])
    iw = np.array([r["info_w1"] for r in rows])
    ip = np.array([r["info_prohorov"] for r in rows])
    pr = np.array([r["prohorov_raw"] for r in rows])
    # the sum of two truncated axes has diameter 2
    summary = {
        "P^2 <= W1 holds": int(np.sum(p ** 2 <= w + 1e-9)),
        "W1 <= (1 + diam) P holds": int(np.sum(w <= 3 * p + 1e-9)),
        "W1 <= info_w1 holds": int(np.sum(w <= iw + 1e-9)),
        "prohorov_trunc <= info_prohorov count": int(np.sum(p <= ip + 1e-9)),
        "prohorov_raw >= prohorov_trunc holds": int(np.sum(pr >= p - 1e-9)),
        "trials": cfg.trials,
        "median info_w1 - w1": float(np.median(iw - w)),
    }
    for k, v in summary.items():
        print(f"{k}: {v}")
    save({"summary": summary, "rows": rows}, cfg.out)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
