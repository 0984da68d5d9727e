"""Command-line entry point: ``permaspin <subcommand> [flags]``.

Every subcommand writes a versioned CSV (or JSON) table to ``--out`` or stdout.
Usage errors exit with status 2, numeric failures with status 1.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from typing import Sequence, TextIO

import numpy as np

from . import lowtemp, meanfield, transfer_1d as t1, verify
from .model_energy import Graph, ModelParams, brute_force_Z
from .montecarlo import sample_observables
from .output import write_json, write_table
from .perm_core import PermaspinSet, StatisticKind, avoiders, cddes_closed_form, enumerate_perms, stat_gf


class UsageError(Exception):
    pass


def parse_sweep(text: str) -> list[float]:
    """``"1.5"`` -> [1.5]; ``"lo:hi:steps"`` -> ``steps`` evenly spaced values from lo to hi."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if not lo < hi:
                raise argparse.ArgumentTypeError(f"sweep needs lo < hi: {text!r}")
            if steps < 1:
                raise argparse.ArgumentTypeError(f"sweep needs steps >= 1: {text!r}")
            return [float(x) for x in np.linspace(lo, hi, steps)]
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a number or lo:hi:steps, got {text!r}")


def spin_set(k: int, avoid: str | None) -> PermaspinSet:
    if avoid is None:
        return enumerate_perms(k)
    pats = [s.strip() for s in avoid.split(",") if s.strip()]
    return avoiders(k, pats)


def graph_of(selector: str, n: int) -> Graph:
    if selector == "ring":
        return Graph.ring(n)
    if selector == "path":
        return Graph.path(n)
    if selector == "complete":
        return Graph.complete(n)
    if selector.startswith("file:"):
        return Graph.from_file(selector[5:], n)
    raise UsageError(f"unknown graph {selector!r}; use ring, path, complete or file:PATH")


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


# subcommands ---------------------------------------------------------------

def cmd_gf(args, out: TextIO) -> int:
    stat = StatisticKind.from_name(args.stat)
    poly = stat_gf(stat, args.k)
    closed = str(cddes_closed_form(args.k) == poly).lower() if stat is StatisticKind.DESTAT else ""
    row = (args.k, stat.value, str(poly), " ".join(str(c) for c in poly.coeffs), closed)
    write_table(("n", "stat", "polynomial", "coefficients", "closed_form_agrees"), [row], out, args.format)
    return 0


EXACT_COLUMNS = ("k", "set", "graph", "n", "beta", "J", "H", "log_Z", "f_finite", "f", "method")


def cmd_exact(args, out: TextIO) -> int:
    P = spin_set(args.k, args.avoid)
    stat = StatisticKind.from_name(args.stat)
    g = graph_of(args.graph, args.n)
    rows = []
    for beta in args.beta:
        p = ModelParams(beta, args.J, args.H, stat)
        if args.graph == "ring":
            rep = t1.ring_Z_for(P, args.n, p)
            f = t1.free_energy_ring(P, p)
        else:
            rep = brute_force_Z(g, P, p)
            f = float("nan")
        rows.append((P.k, P.label(), args.graph, g.n, beta, args.J, args.H, rep.log_Z, rep.free_energy, f, rep.method))
    write_table(EXACT_COLUMNS, rows, out, args.format)
    return 0


def _closed_spectrum(P: PermaspinSet, stat: StatisticKind, tp: t1.TransferParams):
    if stat is not StatisticKind.DESTAT or P.k != 3:
        return None
    closed = {
        avoiders(3, ["123", "321"]).members: t1.eig_closed_41,
        avoiders(3, ["123"]).members: t1.eig_closed_42,
        enumerate_perms(3).members: t1.eig_cubic_43,
    }
    fn = closed.get(P.members)
    return fn(tp) if fn else None


def cmd_spectrum(args, out: TextIO) -> int:
    P = spin_set(args.k, args.avoid)
    stat = StatisticKind.from_name(args.stat)
    results = []
    for beta in args.beta:
        p = ModelParams(beta, args.J, args.H, stat)
        tp = t1.transfer_params(p, P.k)
        params = {"set": P.label(), "stat": stat.value, "beta": beta, "J": args.J, "H": args.H, "a": tp.a, "b": tp.b}
        results.append(t1.eig_numeric(t1.build_transfer(P, stat, tp)).to_json(params))
        closed = _closed_spectrum(P, stat, tp)
        if closed is not None:
            results.append(closed.to_json(params))
    if args.format == "csv":
        rows = [(r["params"]["beta"], r["method"], i, lam) for r in results for i, lam in enumerate(r["eigenvalues"])]
        write_table(("beta", "method", "index", "eigenvalue"), rows, out, "csv")
    else:
        write_json(results, out)
    return 0


def cmd_surfaces(args, out: TextIO) -> int:
    write_table(t1.SURFACE_COLUMNS, t1.surface_grid(steps=args.grid), out, args.format)
    return 0


def cmd_meanfield(args, out: TextIO) -> int:
    rows = [
        meanfield.meanfield_row(meanfield.MeanFieldParams(args.n, args.q, args.J, args.H, beta))
        for beta in args.beta
    ]
    write_table(meanfield.MEANFIELD_COLUMNS, rows, out, args.format)
    return 0


def cmd_lowtemp(args, out: TextIO) -> int:
    rows = lowtemp.comparison_rows(args.n, args.beta, [args.J], [args.H])
    write_table(lowtemp.COMPARISON_COLUMNS, rows, out, args.format)
    return 0


MC_COLUMNS = (
    "set", "graph", "n", "beta", "J", "H", "sweeps", "burn_in", "seed",
    "energy_per_site", "energy_stderr", "order_parameter", "order_stderr", "acceptance",
)


def cmd_mc(args, out: TextIO) -> int:
    P = spin_set(args.k, args.avoid)
    stat = StatisticKind.from_name(args.stat)
    g = graph_of(args.graph, args.n)
    rows = []
    for beta in args.beta:
        rep = sample_observables(g, P, ModelParams(beta, args.J, args.H, stat), args.sweeps, args.burn_in, args.seed)
        rows.append((
            P.label(), args.graph, g.n, beta, args.J, args.H, rep.sweeps, rep.burn_in, rep.seed,
            rep.energy_per_site.mean, rep.energy_per_site.stderr,
            rep.order_parameter.mean, rep.order_parameter.stderr, rep.acceptance,
        ))
    write_table(MC_COLUMNS, rows, out, args.format)
    return 0


def cmd_verify(args, out: TextIO) -> int:
    results = []
    for name, fn in verify.CRITERIA:
        r = verify.run_check(name, fn, args.quick)
        results.append(r)
        print(r.line(), file=sys.stderr)
    rows = [(r.name, r.passed, r.detail, r.seconds) for r in results]
    write_table(("check", "passed", "detail", "seconds"), rows, out, args.format)
    return 0 if all(r.passed for r in results) else 1


# parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permaspin", description=__doc__.splitlines()[0])

    def common(default_format: str = "csv") -> argparse.ArgumentParser:
        # a fresh parent per subcommand: parents share action objects
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--out", help="output file (default stdout)")
        c.add_argument("--format", choices=("csv", "json"), default=default_format)
        return c

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--beta", type=parse_sweep, default=[1.0], help="value or lo:hi:steps")
    model.add_argument("--J", type=float, default=1.0)
    model.add_argument("--H", type=float, default=0.0)

    spins = argparse.ArgumentParser(add_help=False)
    spins.add_argument("--k", type=int, default=3)
    spins.add_argument("--avoid", help="comma-separated patterns, e.g. 123,321")
    spins.add_argument("--stat", choices=("destat", "inv"), default="destat")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gf", parents=[common()], help="generating function of a statistic over S_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--stat", choices=("destat", "inv"), default="destat")
    p.set_defaults(func=cmd_gf)

    p = sub.add_parser("exact", parents=[common(), model, spins], help="Z and f over a beta sweep")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--graph", default="ring", help="ring, path, complete or file:PATH")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("spectrum", parents=[common("json"), model, spins], help="transfer-matrix eigenvalues")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("surfaces", parents=[common()], help="lambda* and discriminant grids over (c, d)")
    p.add_argument("--grid", type=int, default=40, help="points per axis")
    p.set_defaults(func=cmd_surfaces)

    p = sub.add_parser("meanfield", parents=[common(), model], help="mean-field partition function")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--q", type=int, default=2, help="coordination number")
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("lowtemp", parents=[common(), model], help="low-temperature comparison table")
    p.add_argument("--n", type=int, default=5)
    p.set_defaults(func=cmd_lowtemp)

    p = sub.add_parser("mc", parents=[common(), model, spins], help="Metropolis sampler")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--graph", default="ring", help="ring, path, complete or file:PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=1_000)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", parents=[common()], help="run the oracle cross-checks")
    p.add_argument("--quick", action="store_true", help="limit enumerations to n <= 4")
    p.set_defaults(func=cmd_verify)
    return parser


def _validate(args, parser: argparse.ArgumentParser) -> None:
    """Reject bad flag values before any computation starts."""
    try:
        if hasattr(args, "avoid") and args.command not in ("gf",):
            spin_set(args.k, args.avoid)
        if args.command == "gf":
            enumerate_perms(args.k)
        if hasattr(args, "graph"):
            graph_of(args.graph, args.n)
        if args.command == "surfaces" and args.grid < 1:
            raise UsageError("--grid must be >= 1")
        if args.command == "mc" and not (0 <= args.burn_in < args.sweeps):
            raise UsageError("need 0 <= --burn-in < --sweeps")
        if args.command in ("meanfield", "lowtemp") and args.n < 2:
            raise UsageError("--n must be >= 2")
        if hasattr(args, "beta") and any(b < 0 or not math.isfinite(b) for b in args.beta):
            raise UsageError("--beta must be finite and non-negative")
    except (UsageError, ValueError, OSError) as exc:
        parser.error(str(exc))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(args, parser)
    try:
        with _output(args.out) as out:
            return args.func(args, out)
    except (ValueError, ArithmeticError) as exc:
        print(f"permaspin {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
