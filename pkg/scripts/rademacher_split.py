"""Setwise convergence that is not convergence of information.

For each n the coarse dyadic family sees no difference between mu_n and the
limit, the full default family sees at most 2^(1-n), while total variation
and the information distance stay at 1 and 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass

from _common import parse_config, save
from infotop.fixtures import coarse_dyadic_family, fixture_rademacher
from infotop.lift import info_distance
from infotop.metrics import default_family, setwise_gap, tv_distance


@dataclass
class Config:
    K: int = 12
    n_max: int = 10
    out: str = ""


def main(cfg: Config):
    rows = []
    print(f"{'n':>3} {'coarse':>8} {'default':>10} {'2^(1-n)':>10} {'tv':>6} {'info':>6}")
    for n in range(1, min(cfg.n_max, cfg.K) + 1):
        mu_n, mu = fixture_rademacher(n, cfg.K)
        row = {
            "n": n,
            "coarse": setwise_gap(mu_n, mu, coarse_dyadic_family(mu.space, n)) if n > 1 else None,
            "default": setwise_gap(mu_n, mu, default_family(mu.space)),
            "tv": tv_distance(mu_n, mu),
            "info": info_distance(mu_n, mu),
        }
        rows.append(row)
        coarse = "-" if row["coarse"] is None else f"{row['coarse']:.3g}"
        print(f"{n:3d} {coarse:>8} {row['default']:10.6f} {2.0 ** (1 - n):10.6f} "
              f"{row['tv']:6.3f} {row['info']:6.3f}")
    save({"K": cfg.K, "rows": rows}, cfg.out)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
