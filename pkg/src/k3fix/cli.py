"""Command-line front end.

Exit codes: 0 on success (an infeasible scenario is a success with an empty
solution list), 1 on usage errors and malformed input, 2 when an internal
invariant fails or a reproduction differs from its golden output.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from .cyclotomic import euler_phi, mobius, primitive_trace
from .enumeration import SolutionSet, enumerate_configs, verify_equalities
from .errors import InconsistencyError, UnboundedError, UsageError
from .lattice import invariants, parse_lattice
from .lefschetz import G_SUM, build_holomorphic_system, isolated_types
from .linalg import rref
from .reports import describe, to_json_text, to_markdown
from .scenarios import SHIPPED, golden, load_scenario, load_shipped
from .weierstrass import parse_model, verify

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_traces(args: argparse.Namespace) -> int:
    n = args.n
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    value = primitive_trace(n)
    if args.verbose:
        print(f"sum of primitive {n}-th roots of unity = {value} (mu({n}) = {mobius(n)}, phi({n}) = {euler_phi(n)})")
    else:
        print(value)
    return EXIT_OK


def cmd_lattice(args: argparse.Namespace) -> int:
    lat = parse_lattice(args.expr)
    inv = invariants(lat)
    doc = {
        "lattice": lat.name,
        "rank": inv.rank,
        "determinant": inv.determinant,
        "signature": list(inv.signature),
        "nullity": inv.nullity,
        "even": inv.is_even,
        "unimodular": inv.is_unimodular,
    }
    if args.format == "json":
        _emit(json.dumps(doc, indent=2) + "\n", None)
    else:
        for key, value in doc.items():
            print(f"{key}: {value}")
    return EXIT_OK


def default_free(order: int) -> list[str]:
    """Free variables chosen so the highest-``i`` types become the dependent ones."""
    system = build_holomorphic_system(order)
    types = isolated_types(order)
    columns = [system.index(t.label) for t in reversed(types)] + [system.index(G_SUM)]
    _, pivots = rref([list(r.coeffs) + [r.rhs] for r in system.equalities], columns)
    if -1 in pivots:
        raise InconsistencyError(f"holomorphic system of order {order} is inconsistent")
    dependent = {system.variables[p] for p in pivots}
    return [v for v in system.variables if v not in dependent]


def cmd_solve(args: argparse.Namespace) -> int:
    order = args.order
    if order < 3:
        raise UsageError(f"order must be >= 3, got {order}")
    system = build_holomorphic_system(order)
    free = args.free if args.free else default_free(order)
    free = [f if f == G_SUM or f.startswith("m[") else f"m[{f}]" for f in free]
    solved = system.solve_for(free)
    if args.format == "json":
        doc = {
            "order": order,
            "rank": system.equality_rank(),
            "free": free,
            "dependent": {
                v: {"constant": str(e.constant), "coeffs": {k: str(c) for k, c in e.coeffs.items() if c}}
                for v, e in solved.items()
            },
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"order {order}: {len(system.equalities)} equations, rank {system.equality_rank()}, "
        f"{len(system.variables)} unknowns",
        f"free: {', '.join(free)}",
    ]
    lines += [f"{v} = {e}" for v, e in solved.items()]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _render(solutions: SolutionSet, checks, fmt: str) -> str:
    return to_markdown(solutions, checks) if fmt == "markdown" else to_json_text(solutions, checks)


def cmd_enumerate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    solutions = enumerate_configs(scenario, jobs=args.jobs)
    checks = verify_equalities(scenario, solutions) if scenario.expected_equalities else None
    _emit(_render(solutions, checks, args.format), args.out)
    return EXIT_OK


def _weierstrass_models(path: str | None) -> list[dict]:
    if path is None:
        text = resources.files("k3fix").joinpath("scenarios", "weierstrass_examples.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    models = doc.get("models", [doc]) if isinstance(doc, dict) else doc
    if not isinstance(models, list):
        raise UsageError("expected a model object, a list of models or {\"models\": [...]}")
    return models


def cmd_verify_weierstrass(args: argparse.Namespace) -> int:
    reports = [verify(*parse_model(m)) for m in _weierstrass_models(args.file)]
    if args.format == "json":
        _emit(json.dumps([r.to_json() for r in reports], indent=2) + "\n", args.out)
        return EXIT_OK
    lines = []
    for r in reports:
        lines.append(f"{r.equation.name or 'model'}: {r.equation}")
        lines.append(f"  action weights {list(r.action.weights)} mod {r.action.order}")
        if r.common_weight is None:
            listing = ", ".join(f"{m}: {w}" for m, w in r.monomial_weights)
            lines.append(f"  NOT invariant; monomial weights {listing}")
        else:
            lines.append(f"  invariant: every monomial has weight {r.common_weight}")
        unit = "a unit" if r.two_form.is_unit else "not a unit"
        lines.append(f"  2-form weight {r.two_form.weight} ({unit} mod {r.action.order})")
        lines.append(f"  purely non-symplectic of order {r.action.order}: {'yes' if r.non_symplectic else 'no'}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_repro(args: argparse.Namespace) -> int:
    scenario = load_shipped(args.name)
    solutions = enumerate_configs(scenario, jobs=args.jobs)
    checks = verify_equalities(scenario, solutions) if scenario.expected_equalities else None
    if args.format:
        _emit(_render(solutions, checks, args.format), args.out)
    else:
        lines = [f"{args.name}: {len(solutions)} solution(s)"]
        lines += [f"  {describe(c)}, chi={c.euler}" for c in solutions]
        if checks:
            lines += [f"  {chk}" for chk in checks]
        _emit("\n".join(lines) + "\n", args.out)
    expected = golden(args.name)
    actual = solutions.to_json()
    if actual != expected:
        print(f"{args.name}: output differs from the golden solution set", file=sys.stderr)
        print(json.dumps({"expected": expected, "actual": actual}, indent=2), file=sys.stderr)
        return EXIT_INTERNAL
    if checks and not all(chk.holds for chk in checks):
        print(f"{args.name}: expected equalities do not all hold", file=sys.stderr)
        return EXIT_INTERNAL
    print(f"{args.name}: matches golden output", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="k3fix", description="Fixed loci of non-symplectic automorphisms of K3 surfaces.")
    p.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("traces", help="sum of the primitive n-th roots of unity")
    s.add_argument("n", type=int)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_traces)

    s = sub.add_parser("lattice", help="invariants of a direct sum such as U+E8+A6")
    s.add_argument("expr")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("solve", help="reduced holomorphic Lefschetz system of a given order")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--free", nargs="+", metavar="VAR",
                   help="free variables, e.g. m[2,20] or 2,20, and g_sum")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("enumerate", help="enumerate the fixed loci allowed by a scenario file")
    s.add_argument("--scenario", required=True)
    s.add_argument("--format", choices=["json", "markdown"], default="json")
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("verify-weierstrass", help="invariance and 2-form weight of diagonal actions")
    s.add_argument("file", nargs="?", help="model file (default: the bundled examples)")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_weierstrass)

    s = sub.add_parser("repro", help="run a bundled scenario and compare with its golden output")
    s.add_argument("name", choices=SHIPPED)
    s.add_argument("--format", choices=["json", "markdown"])
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_repro)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("k3fix: error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, UnboundedError) as exc:
        print(f"k3fix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"k3fix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"k3fix: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
