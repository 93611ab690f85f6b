"""Command-line front end.

Exit codes: 0 success, 1 golden mismatch, 2 invalid input, 3 inconsistent marginals.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures as fx
from .convergence import METRICS, AnalysisParams, analyze, density_criterion, kernel_criterion
from .decision import extract_deterministic, solve_randomized
from .errors import InconsistencyError, ValidationError
from .io import (
    dumps,
    fmt,
    lifted_to_doc,
    load_json,
    load_measure,
    measure_to_doc,
    problem_from_doc,
    rounded,
    sequence_from_doc,
)
from .lift import chi1_glue, expected_cost, info_distance, lifted_expectation, phi, psi
from .measure import cond_indep_gap, is_consistent, marginal
from .metrics import GroundMetric, ProductFamily, parse_set, prohorov, setwise_gap, tv_distance, wasserstein1


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _axes(text: str) -> tuple[str, ...]:
    return tuple(s for s in text.split(",") if s)


def _index_range(text: str) -> tuple[int, ...]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise ValidationError(f"--n: expected 'lo:hi' or a comma list of integers, got {text!r}") from None


def _load_sets(path):
    if path is None:
        return None
    doc = load_json(path)
    if isinstance(doc, dict) and "product" in doc:
        return ProductFamily({k: [frozenset(s) for s in v] for k, v in doc["product"].items()})
    if not isinstance(doc, list):
        raise ValidationError(f"{path}: expected a list of sets or {{\"product\": {{axis: [[ids], ...]}}}}")
    return [parse_set(s) for s in doc]


# --- subcommands ------------------------------------------------------------------


def cmd_dist(args) -> int:
    left, right = load_measure(args.left), load_measure(args.right)
    m = args.metric
    if m == "tv":
        value = tv_distance(left, right)
    elif m == "setwise":
        value = setwise_gap(left, right, _load_sets(args.sets))
    elif m == "w1":
        value = wasserstein1(left, right, GroundMetric(args.ground or "trunc"))[0]
    elif m == "prohorov":
        value = prohorov(left, right, GroundMetric(args.ground or "raw"))
    else:
        value = info_distance(left, right, args.base)
    print(fmt(value))
    return 0


def cmd_lift(args) -> int:
    mu = load_measure(args.mu)
    _emit(dumps(lifted_to_doc(psi(mu, args.base_axis, args.inner_metric))), args.out)
    return 0


def cmd_glue(args) -> int:
    mu, nu = load_measure(args.mu), load_measure(args.nu)
    shared = _axes(args.shared) if args.shared else None
    _emit(dumps(measure_to_doc(chi1_glue(mu, nu, shared))), args.out)
    return 0


def cmd_phi(args) -> int:
    mu, nu = load_measure(args.mu), load_measure(args.nu)
    given = _axes(args.given) if args.given else None
    _emit(dumps(measure_to_doc(phi(mu, nu, given))), args.out)
    return 0


def cmd_condind(args) -> int:
    mu = load_measure(args.mu)
    print(fmt(cond_indep_gap(mu, _axes(args.given), _axes(args.b), _axes(args.c))))
    return 0


def cmd_converge(args) -> int:
    if (args.fixture is None) == (args.seq is None):
        raise ValidationError("give exactly one of --fixture or --seq")
    metrics = _axes(args.metrics)
    for m in metrics:
        if m not in METRICS:
            raise ValidationError(f"--metrics: unknown metric {m!r}; choose from {', '.join(METRICS)}")
    info_axes = _axes(args.info_axes) if args.info_axes else None
    if args.fixture is not None:
        indices = _index_range(args.n) if args.n else None
        seq, fixture_axes = fx.fixture_sequence(args.fixture, indices, K=args.K, cap=args.cap)
        info_axes = info_axes or fixture_axes
    else:
        seq = sequence_from_doc(load_json(args.seq), str(args.seq))
        if args.n:
            seq = seq.with_indices([n for n in _index_range(args.n) if n in set(seq.indices)])
    params = AnalysisParams(tol_conv=args.tol_conv, tol_sep=args.tol_sep, window=args.window, base=args.base,
                            family=_load_sets(args.sets), info_axes=info_axes)
    doc = {"sequence": seq.name or str(args.seq), "report": analyze(seq, metrics, params).to_dict()}
    if args.criteria:
        doc["density"] = density_criterion(seq, params=params).to_dict()
        doc["kernel"] = kernel_criterion(seq, base=args.base, params=params).to_dict()
    print(dumps(rounded(doc)))
    return 0


def cmd_solve(args) -> int:
    p = problem_from_doc(load_json(args.problem), str(args.problem))
    value, r = solve_randomized(p, args.method)
    det = extract_deterministic(p, r)
    print(dumps(rounded({"value": value, "deterministic": det.to_dict(), "randomized": r.to_dict()})))
    return 0


def _fixture_values(name: str, args) -> tuple[list[tuple[str, float]], dict]:
    n = args.n
    if name == "hellwig":
        rec = fx.fixture_hellwig()
        return [("lhs", rec.lhs), ("rhs", rec.rhs)], {
            "nu": measure_to_doc(rec.nu), "mu": measure_to_doc(rec.mu), "glued": lifted_to_doc(rec.glued)}
    if name == "sgn":
        mu_n, mu0 = fx.fixture_sgn(n)
        ab = [marginal(m, ("A", "B")) for m in (mu_n, mu0)]
        vals = [("cond_indep_gap_n", cond_indep_gap(mu_n, "A", "B", "C")),
                ("cond_indep_gap_0", cond_indep_gap(mu0, "A", "B", "C")),
                ("w1", wasserstein1(mu_n, mu0)[0]), ("info_AB", info_distance(*ab))]
        return vals, {"mu_n": measure_to_doc(mu_n), "mu_0": measure_to_doc(mu0)}
    if name == "discrete-pair":
        mu_n, nu_n, mu, nu = fx.fixture_discrete_pair(n)
        vals = [("consistency_gap", is_consistent(mu_n, nu_n, "A")[1]),
                ("expected_cost_n", expected_cost(fx.pair_cost_table(mu_n, nu_n), mu_n, nu_n)),
                ("expected_cost_limit", expected_cost(fx.pair_cost_table(mu, nu), mu, nu))]
        return vals, {k: measure_to_doc(m) for k, m in zip(("mu_n", "nu_n", "mu", "nu"), (mu_n, nu_n, mu, nu))}
    if name == "rademacher":
        mu_n, mu = fx.fixture_rademacher(n, args.K)
        vals = [("setwise_coarse", setwise_gap(mu_n, mu, fx.coarse_dyadic_family(mu.space, n))),
                ("setwise_default", setwise_gap(mu_n, mu)), ("info", info_distance(mu_n, mu)),
                ("tv", tv_distance(mu_n, mu))]
        return vals, {"mu_n": measure_to_doc(mu_n), "mu": measure_to_doc(mu)}
    if name == "jordan":
        nu_n, nu = fx.fixture_jordan(n, args.cap)
        vals = [("w1", wasserstein1(nu_n, nu)[0]), ("info", info_distance(nu_n, nu)),
                ("h_integral_n", lifted_expectation(fx.jordan_h, psi(nu_n))),
                ("h_integral_limit", lifted_expectation(fx.jordan_h, psi(nu)))]
        return vals, {"nu_n": measure_to_doc(nu_n), "nu": measure_to_doc(nu)}
    raise ValidationError(f"unknown fixture {name!r}; choose from {', '.join(fx.FIXTURES)}")


def cmd_fixture(args) -> int:
    if args.name == "verify":
        if args.target is None:
            raise ValidationError("usage: infotop fixture verify <name>")
        rows = fx.golden_record(args.target, K=args.K, cap=args.cap).verify()
        bad = 0
        for r in rows:
            status = "ok" if r["ok"] else "MISMATCH"
            bad += not r["ok"]
            print(f"{status} {r['quantity']}: value={fmt(r['value'])} expected={fmt(r['expected'])} "
                  f"tol={fmt(r['tol'])} origin={r['origin']}")
        print(f"{len(rows) - bad}/{len(rows)} golden values reproduced")
        return 1 if bad else 0
    if args.target is not None:
        raise ValidationError(f"unexpected argument {args.target!r}")
    vals, objects = _fixture_values(args.name, args)
    for k, v in vals:
        print(f"{k}={fmt(v)}")
    if args.out:
        Path(args.out).write_text(dumps(objects) + "\n")
    return 0


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infotop", description="Distances, lifts and gluing for finite joint measures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two measures")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--metric", required=True, choices=["tv", "setwise", "w1", "prohorov", "info"])
    p.add_argument("--ground", choices=["raw", "trunc"])
    p.add_argument("--base", choices=["w1", "prohorov"], default="w1")
    p.add_argument("--sets")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("lift", help="lift a two-axis measure to (point, conditional) pairs")
    p.add_argument("mu")
    p.add_argument("--base-axis")
    p.add_argument("--inner-metric", choices=["w1", "prohorov"], default="w1")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("glue", help="glue two measures along shared axes")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--shared")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("phi", help="joint making the two extra axes independent given the shared ones")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--given")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("condind", help="conditional-independence gap")
    p.add_argument("mu")
    p.add_argument("--given", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.set_defaults(func=cmd_condind)

    p = sub.add_parser("converge", help="distance traces of a sequence against its limit")
    p.add_argument("--fixture", choices=["sgn", "discrete-pair", "rademacher", "jordan"])
    p.add_argument("--seq")
    p.add_argument("--n")
    p.add_argument("--metrics", default="w1,info")
    p.add_argument("--base", choices=["w1", "prohorov"], default="w1")
    p.add_argument("--sets")
    p.add_argument("--info-axes")
    p.add_argument("--tol-conv", type=float, default=1e-2)
    p.add_argument("--tol-sep", type=float, default=1e-1)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--criteria", action="store_true", help="also run the density and kernel criteria")
    p.add_argument("--K", type=int, default=12)
    p.add_argument("--cap", type=int, default=128)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("solve", help="optimal strategy for a one-shot decision problem")
    p.add_argument("problem")
    p.add_argument("--method", choices=["decompose", "lp"], default="decompose")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("fixture", help="build a worked example, or 'verify <name>' to replay its golden values")
    p.add_argument("name", choices=list(fx.FIXTURES) + ["verify"])
    p.add_argument("target", nargs="?")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--K", type=int, default=12)
    p.add_argument("--cap", type=int, default=128)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_fixture)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InconsistencyError as exc:
        print(f"inconsistent: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
