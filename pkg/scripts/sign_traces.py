"""Weak convergence without convergence of information on the sign example.

Prints the W1 and information traces against their closed forms 2/n and
1/4 + 1/n, plus the verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass

from _common import parse_config, save
from infotop.convergence import analyze
from infotop.fixtures import fixture_sequence


@dataclass
class Config:
    n_max: int = 300
    every: int = 25
    out: str = ""


def main(cfg: Config):
    seq, axes = fixture_sequence("sgn", range(1, cfg.n_max + 1))
    rep = analyze(seq, ["w1", "info"], info_axes=axes)
    print(f"{'n':>5} {'w1':>12} {'2/n':>12} {'info':>12} {'1/4+1/n':>12}")
    w1, info = rep.values("w1"), rep.values("info")
    for i, n in enumerate(seq.indices):
        if n <= 3 or n % cfg.every == 0:
            print(f"{n:5d} {w1[i]:12.9f} {2 / n:12.9f} {info[i]:12.9f} {0.25 + 1 / n:12.9f}")
    print("verdicts:", rep.verdicts)
    save(rep.to_dict(), cfg.out)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
