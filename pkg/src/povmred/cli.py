"""Command-line interface.

Exit codes: 0 success / property holds, 1 property fails, 2 input or
solver error, 3 borderline or undecided.
"""

import argparse
import logging
import sys

import numpy as np

from povmred import generators, io
from povmred.config import Tolerances
from povmred.divergences import GENERATORS, f_divergence, tv_metric
from povmred.errors import AmbiguousMatching, PovmredError, ToleranceAmbiguity, ValidationError
from povmred.fuzzy_order import equivalent, preceq
from povmred.instruments import (
    check_conservation,
    compose,
    identity_instrument,
    luders_instrument,
)
from povmred.matops import trace_norm
from povmred.povm import outcome_distribution, tomographic_ensemble
from povmred.reduction import reduce, reduce_via_lsb
from povmred.selftest import run_selftest

OK, FAIL, ERROR, BORDERLINE = 0, 1, 2, 3

log = logging.getLogger("povmred")

FIXTURES = {
    "intro-a": lambda: io.povm_to_json(generators.intro_a()),
    "intro-b": lambda: io.povm_to_json(generators.intro_b()),
    "trine": lambda: io.povm_to_json(generators.trine()),
    "pvm2": lambda: io.povm_to_json(generators.computational_pvm(2)),
    "pvm3": lambda: io.povm_to_json(generators.computational_pvm(3)),
    "luders-pvm2": lambda: io.instrument_to_json(luders_instrument(generators.computational_pvm(2))),
    "luders-pvm3": lambda: io.instrument_to_json(luders_instrument(generators.computational_pvm(3))),
    "identity2": lambda: io.instrument_to_json(identity_instrument(2)),
    "ensemble2": lambda: io.ensemble_to_json(tomographic_ensemble(2)),
    "ensemble3": lambda: io.ensemble_to_json(tomographic_ensemble(3)),
    "ensemble4": lambda: io.ensemble_to_json(tomographic_ensemble(4)),
}


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, payload: dict, text: "str | None" = None):
        if self.fmt == "json" or text is None:
            print(io.dumps(payload))
        else:
            print(text)


def _tolerances(args) -> Tolerances:
    overrides = {
        name: getattr(args, f"tol_{name}")
        for name in Tolerances.names()
        if getattr(args, f"tol_{name}", None) is not None
    }
    return Tolerances(**overrides)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    for name in Tolerances.names():
        p.add_argument(f"--tol-{name.replace('_', '-')}", dest=f"tol_{name}", type=float, metavar="FLOAT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "text"], default="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="povmred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a POVM, state or instrument file")
    p.add_argument("path")
    p.add_argument("--kind", choices=["auto", "povm", "state", "instrument"], default="auto")

    p = sub.add_parser("reduce", parents=[common], help="minimal sufficient reduction")
    p.add_argument("path")
    p.add_argument("--via", choices=["proportionality", "lsb"], default="proportionality")

    p = sub.add_parser("order", parents=[common], help="is A a post-processing of B?")
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("equiv", parents=[common], help="are A and B fuzzy equivalent?")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--method", choices=["lp", "reduce"], default="reduce")

    p = sub.add_parser("divergence", parents=[common], help="f-divergence between outcome distributions")
    p.add_argument("povm")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--f", dest="f", choices=sorted(GENERATORS), default="hellinger")

    p = sub.add_parser("compose", parents=[common], help="joint POVM of an instrument then a POVM")
    p.add_argument("instrument")
    p.add_argument("povm")

    p = sub.add_parser("conserve", parents=[common], help="information conservation conditions")
    p.add_argument("instrument")
    p.add_argument("povm")
    p.add_argument("--exhaustive-limit", type=int, default=10**6)

    p = sub.add_parser("gen", parents=[common], help="generate random objects or fixtures")
    p.add_argument("what", choices=["povm", "density", "markov", "split", "instrument", "fixture"])
    p.add_argument("source", nargs="?", help="POVM file (split) or fixture name (fixture)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--outcomes", type=int, default=3)
    p.add_argument("--rows", type=int, default=2)
    p.add_argument("--cols", type=int, default=2)
    p.add_argument("--kraus", type=int, default=1)

    p = sub.add_parser("ensemble", parents=[common], help="tomographic state ensemble")
    p.add_argument("--dim", type=int, default=2)

    p = sub.add_parser("selftest", parents=[common], help="run the seeded property suite")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--inject-lossy", action="store_true", help="negative control: lossy reduction")
    return parser


def _detect_kind(data) -> str:
    if isinstance(data, dict) and "matrix" in data:
        return "state"
    outcomes = data.get("outcomes") if isinstance(data, dict) else None
    if isinstance(outcomes, list) and outcomes and isinstance(outcomes[0], dict) and "kraus" in outcomes[0]:
        return "instrument"
    return "povm"


def cmd_validate(args, tol, out):
    data = io.load_json(args.path)
    kind = _detect_kind(data) if args.kind == "auto" else args.kind
    parse = {"povm": io.povm_from_json, "state": io.state_from_json, "instrument": io.instrument_from_json}
    try:
        obj = parse[kind](data, tol)
    except io.SchemaError:
        raise
    except ValidationError as exc:
        payload = {"valid": False, "kind": kind, "error": type(exc).__name__, "message": str(exc)}
        if exc.magnitude is not None:
            payload["magnitude"] = float(exc.magnitude)
        out.emit(payload, f"invalid {kind}: {exc}")
        return FAIL
    dim = obj.shape[0] if kind == "state" else obj.dim
    count = None if kind == "state" else len(obj)
    out.emit(
        {"valid": True, "kind": kind, "dim": dim, "outcomes": count},
        f"valid {kind} (dim {dim}" + (f", {count} outcomes)" if count else ")"),
    )
    return OK


def cmd_reduce(args, tol, out):
    povm = io.povm_from_json(io.load_json(args.path), tol)
    try:
        report = reduce(povm, tol) if args.via == "proportionality" else reduce_via_lsb(povm, tol=tol)
    except ToleranceAmbiguity as exc:
        out.emit({"error": "tolerance ambiguity", "message": str(exc)}, f"ambiguous: {exc}")
        return BORDERLINE
    lines = [f"{len(povm)} outcomes -> {len(report.reduced)} after reduction"]
    lines += [f"  {x} -> {g}  (h = {report.h[x]:.6g})" for x, g in report.groups.items()]
    if report.dropped:
        lines.append(f"  dropped (vanishing): {', '.join(report.dropped)}")
    out.emit(io.report_to_json(report), "\n".join(lines))
    return OK


def _code(holds: bool, borderline: bool) -> int:
    if holds:
        return OK
    return BORDERLINE if borderline else FAIL


def cmd_order(args, tol, out):
    a = io.povm_from_json(io.load_json(args.a), tol, "a")
    b = io.povm_from_json(io.load_json(args.b), tol, "b")
    v = preceq(a, b, tol)
    word = "A ⪯ B" if v.holds else ("borderline" if v.borderline else "not ⪯")
    out.emit(io.order_to_json(v), f"{word} (residual {v.residual:.3e})")
    return _code(v.holds, v.borderline)


def cmd_equiv(args, tol, out):
    a = io.povm_from_json(io.load_json(args.a), tol, "a")
    b = io.povm_from_json(io.load_json(args.b), tol, "b")
    try:
        eq = equivalent(a, b, args.method, tol)
    except (ToleranceAmbiguity, AmbiguousMatching) as exc:
        out.emit({"error": type(exc).__name__, "message": str(exc)}, f"ambiguous: {exc}")
        return BORDERLINE
    payload = {"equivalent": eq.holds, "method": eq.method, "borderline": eq.borderline}
    if eq.method == "reduce":
        payload["bijection"] = eq.evidence["bijection"]
    else:
        payload["a_from_b"] = io.order_to_json(eq.evidence["a_from_b"])
        payload["b_from_a"] = io.order_to_json(eq.evidence["b_from_a"])
    out.emit(payload, "equivalent" if eq.holds else "not equivalent")
    return _code(eq.holds, eq.borderline)


def cmd_divergence(args, tol, out):
    povm = io.povm_from_json(io.load_json(args.povm), tol)
    rho = io.state_from_json(io.load_json(args.rho), tol, "rho")
    sigma = io.state_from_json(io.load_json(args.sigma), tol, "sigma")
    p, q = outcome_distribution(povm, rho), outcome_distribution(povm, sigma)
    value = f_divergence(args.f, p, q, tol)
    payload = {
        "f": args.f,
        "divergence": io.extended_real(value),
        "tv": tv_metric(p, q),
        "trace_norm": trace_norm(np.asarray(rho) - np.asarray(sigma)),
        "p": [float(x) for x in p],
        "q": [float(x) for x in q],
    }
    out.emit(payload, f"D_{args.f} = {value:.12g}, tv = {payload['tv']:.12g}")
    return OK


def cmd_compose(args, tol, out):
    inst = io.instrument_from_json(io.load_json(args.instrument), tol)
    b = io.povm_from_json(io.load_json(args.povm), tol)
    c = compose(inst, b, tol)
    out.emit(io.povm_to_json(c))
    return OK


def cmd_conserve(args, tol, out):
    inst = io.instrument_from_json(io.load_json(args.instrument), tol)
    b = io.povm_from_json(io.load_json(args.povm), tol)
    v = check_conservation(inst, b, args.exhaustive_limit, tol)
    c1 = v.condition1
    text = (
        f"condition 1: {'unknown' if c1 is None else c1} "
        f"(projection {v.condition1_projection})\ncondition 2: {v.condition2}"
    )
    out.emit(io.conservation_to_json(v), text)
    if v.borderline or c1 is None:
        return BORDERLINE
    return OK if v.condition2 else FAIL


def cmd_gen(args, tol, out):
    seed = args.seed
    if args.what == "povm":
        payload = io.povm_to_json(generators.random_povm(args.dim, args.outcomes, seed))
    elif args.what == "density":
        payload = io.state_to_json(generators.random_density(args.dim, seed))
    elif args.what == "markov":
        payload = io.markov_to_json(generators.random_markov(args.rows, args.cols, seed))
    elif args.what == "split":
        if not args.source:
            raise ValidationError("gen split needs a POVM file")
        povm = io.povm_from_json(io.load_json(args.source), tol)
        kappa = generators.random_markov(args.rows, len(povm), seed)
        payload = io.povm_to_json(generators.split_povm(povm, kappa, seed))
    elif args.what == "instrument":
        inst = generators.random_instrument(args.dim, args.outcomes, args.kraus, seed)
        payload = io.instrument_to_json(inst)
    else:
        if args.source not in FIXTURES:
            raise ValidationError(f"unknown fixture {args.source!r}; choose from {sorted(FIXTURES)}")
        payload = FIXTURES[args.source]()
    out.emit(payload)
    return OK


def cmd_ensemble(args, tol, out):
    ens = tomographic_ensemble(args.dim)
    out.emit(io.ensemble_to_json(ens))
    return OK


def cmd_selftest(args, tol, out):
    results = run_selftest(args.seed, args.trials, tol, args.inject_lossy)
    payload = {"seed": args.seed, "trials": args.trials, "results": [r.to_json() for r in results]}
    text = "\n".join(f"{'PASS' if r.passed else 'FAIL'}  {r.name}" for r in results)
    out.emit(payload, text)
    return OK if all(r.passed for r in results) else FAIL


COMMANDS = {
    "validate": cmd_validate,
    "reduce": cmd_reduce,
    "order": cmd_order,
    "equiv": cmd_equiv,
    "divergence": cmd_divergence,
    "compose": cmd_compose,
    "conserve": cmd_conserve,
    "gen": cmd_gen,
    "ensemble": cmd_ensemble,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.format)
    try:
        tol = _tolerances(args)
        return COMMANDS[args.command](args, tol, out)
    except (PovmredError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
