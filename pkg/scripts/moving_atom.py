"""A moving atom breaks convergence of conditionals.

nu_n puts y = 3 at x = 2 + 1/n while the limit puts both y values at x = 2.
The joint converges in W1 at rate 1/(2n); the lift does not, and a bounded
continuous function of the conditional separates the two.
"""
from __future__ import annotations

from dataclasses import dataclass

from _common import parse_config, save
from infotop.convergence import analyze, kernel_criterion
from infotop.fixtures import fixture_jordan, fixture_sequence, jordan_h
from infotop.lift import lifted_expectation, psi


@dataclass
class Config:
    cap: int = 128
    n_max: int = 100
    out: str = ""


def main(cfg: Config):
    seq, _ = fixture_sequence("jordan", range(1, min(cfg.n_max, cfg.cap) + 1), cap=cfg.cap)
    rep = analyze(seq, ["w1", "info", "prohorov"])
    kern = kernel_criterion(seq)
    limit_h = lifted_expectation(jordan_h, psi(seq.limit))
    print(f"h-integral at the limit: {limit_h}")
    print(f"{'n':>4} {'w1':>10} {'info':>10} {'prohorov':>10} {'h-integral':>10}")
    for i, n in enumerate(seq.indices):
        if n <= 4 or n % 20 == 0:
            h_n = lifted_expectation(jordan_h, psi(fixture_jordan(n, cfg.cap)[0]))
            print(f"{n:4d} {rep.values('w1')[i]:10.6f} {rep.values('info')[i]:10.6f} "
                  f"{rep.values('prohorov')[i]:10.6f} {h_n:10.3f}")
    print("verdicts:", rep.verdicts)
    finals = {e["x"]: e["trace"][-1][1] for e in kern.trace}
    print("kernel criterion:", kern.verdict, "final conditional distance per x:", finals)
    save({"report": rep.to_dict(), "kernel": kern.to_dict(), "limit_h": limit_h}, cfg.out)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
