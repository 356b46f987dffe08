"""Command-line front end.

Every subcommand reads a JSON problem file and writes CSV (default) or JSON
to stdout or ``--output``. Errors go to stderr as one JSON line
``{"code", "message", "context"}`` with exit status 2 (bad input),
3 (numerical failure) or 4 (eta on the spectrum, scan exhausted).
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import fd_oracle, hilbert, resolvent, spectrum
from .characteristic import char_derivative_at_eigenvalue, left_solution
from .errors import SLError
from .hilbert import fmt
from .problem import load_problem
from .targets import parse_builtin

BUILTIN_HELP = ("builtin function: 'poly:[c0,c1,...]x4' (ascending coefficients on every "
                "segment), 'poly:[..];[..];[..];[..]' (one list per segment) or "
                "'gauss:a,b' for exp(-a (x-b)^2)")


class UsageError(SLError, ValueError):
    code = "UsageError"
    exit_code = 2


class IOFailure(SLError, OSError):
    code = "IOError"
    exit_code = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, prog=self.prog)


# -- option checks ---------------------------------------------------------

def _require(cond, message, **context):
    if not cond:
        raise UsageError(message, **context)


def _positive(name, value):
    _require(value >= 1, f"--{name} must be at least 1", **{name: value})


def _finite(name, value):
    _require(value is None or math.isfinite(value), f"--{name} must be finite",
             **{name: value})


def _odd_nodes(value):
    _require(value >= 3 and value % 2 == 1, "--nodes must be odd and at least 3", nodes=value)


def _check_options(args):
    cmd = args.command
    for name in ("count", "index", "terms"):
        if hasattr(args, name):
            _positive(name, getattr(args, name))
    for name in ("start", "eta", "scalar"):
        if hasattr(args, name):
            _finite(name.replace("start", "from"), getattr(args, name))
    if hasattr(args, "nodes"):
        _odd_nodes(args.nodes)
    if cmd == "eigfun":
        _require(args.samples >= 2, "--samples must be at least 2", samples=args.samples)
    if cmd == "compare":
        _require(args.mesh >= fd_oracle.MIN_MESH,
                 f"--mesh must be at least {fd_oracle.MIN_MESH}", mesh=args.mesh)
    if cmd == "expand":
        args.builtin = parse_builtin(args.target)
    if cmd == "resolvent":
        args.builtin = parse_builtin(args.rhs)


# -- output ----------------------------------------------------------------

class Table:
    def __init__(self, columns, rows, meta=None, comment_footer=False):
        self.columns = columns
        self.rows = rows
        self.meta = meta or {}
        self.comment_footer = comment_footer


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def render(table, form):
    buf = io.StringIO()
    if form == "json":
        payload = {"columns": list(table.columns), "rows": table.rows}
        payload.update(table.meta)
        json.dump(_jsonable(payload), buf, indent=1, allow_nan=False)
        buf.write("\n")
        return buf.getvalue()
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    if table.meta and table.comment_footer:
        buf.write("# " + json.dumps(_jsonable(table.meta), sort_keys=True) + "\n")
    return buf.getvalue()


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}", path=str(path)) from None


def _load(path):
    try:
        return load_problem(path)
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror}", path=str(path)) from None


# -- subcommands -----------------------------------------------------------

def cmd_validate(spec, args):
    k = spec.constants
    rows = [["theta", k.theta], ["gamma", k.gamma], ["xi", k.xi], ["rho", k.rho]]
    return Table(("quantity", "value"), rows,
                 {"valid": True, "constants": k._asdict()})


def cmd_spectrum(spec, args):
    roots = spectrum.locate_eigenvalues(spec, args.count, args.start)
    rows = []
    for n, (mu, (lo, hi), scale) in enumerate(roots, start=1):
        w_prime, c1 = char_derivative_at_eigenvalue(spec, mu, scale=scale)
        delta = spectrum.char_value(spec, mu)[0]
        rows.append([n, mu, delta, w_prime, c1, lo, hi])
    return Table(("index", "eigenvalue", "delta_at_root", "w_prime", "c1",
                  "bracket_lo", "bracket_hi"), rows)


def cmd_eigfun(spec, args):
    mu = spectrum.locate_eigenvalues(spec, args.index, args.start)[-1][0]
    grid_phi = left_solution(spec, mu, nodes=hilbert.grid(spec, args.nodes))
    c, _ = spectrum.normalising_factor(spec, grid_phi)
    scalar = c * spec.Nprime(*grid_phi.at_right()[:2])
    nodes = [np.linspace(*spec.segment(i), args.samples) for i in range(4)]
    phi = left_solution(spec, mu, nodes=nodes)
    rows = []
    for i, seg in enumerate(phi.segments):
        for x, u, du in zip(seg.x, seg.u, seg.du):
            rows.append([x, i + 1, c * u, c * du])
    meta = {"scalar": scalar, "eigenvalue": mu, "index": args.index}
    return Table(("x", "segment", "phi", "dphi"), rows, meta, comment_footer=True)


def cmd_expand(spec, args):
    pairs = spectrum.find_eigenvalues(spec, args.terms, args.start, nodes=args.nodes)
    F = args.builtin.element(spec, h=args.scalar, n=args.nodes)
    ex = hilbert.expand(spec, F, pairs)
    rows = [[n + 1, c, r] for n, (c, r) in enumerate(zip(ex.coefficients, ex.residuals))]
    meta = {"norm": ex.norm, "scalar": F.h, "target": args.target}
    return Table(("N", "coefficient", "residual"), rows, meta, comment_footer=True)


def cmd_resolvent(spec, args):
    F = args.builtin.element(spec, h=args.scalar, n=args.nodes)
    sol = resolvent.resolvent_solve(spec, args.eta, F)
    rows = []
    for i in range(4):
        for x, y, dy in zip(sol.y.x[i], sol.y.y[i], sol.y.dy[i]):
            rows.append([x, i + 1, y, dy])
    meta = {"eta": sol.eta, "d": sol.d, "scalar": sol.Y.h, "residual": sol.residual,
            "residual_f": sol.residual_f, "residual_h": sol.residual_h}
    return Table(("x", "segment", "y", "dy"), rows, meta, comment_footer=True)


def cmd_compare(spec, args):
    shoot = [r[0] for r in spectrum.locate_eigenvalues(spec, args.count, args.start)]
    lo = spectrum.resolve_start(spec, args.start)
    hi = spectrum.scan_ceiling(spec, lo, args.count)
    oracle = fd_oracle.oracle_eigenvalues(spec, args.count, args.mesh, lam_range=(lo, hi))
    rows = [[n, s, o, abs(s - o) / max(abs(s), 1e-300)]
            for n, (s, o) in enumerate(zip(shoot, oracle), start=1)]
    return Table(("index", "shooting", "oracle", "rel_diff"), rows)


def cmd_gram(spec, args):
    pairs = spectrum.find_eigenvalues(spec, args.count, args.start, nodes=args.nodes)
    G = hilbert.gram_matrix(spec, pairs)
    rows = [[m + 1, n + 1, G[m, n]] for m in range(len(pairs)) for n in range(len(pairs))]
    return Table(("m", "n", "gram"), rows)


COMMANDS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "eigfun": cmd_eigfun,
    "expand": cmd_expand,
    "resolvent": cmd_resolvent,
    "compare": cmd_compare,
    "gram": cmd_gram,
}


def build_parser():
    parser = _Parser(prog="sltransmit",
                     description="Eigenvalues, eigenfunctions, expansions and resolvents "
                                 "for Sturm-Liouville problems with transmission conditions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("problem", help="JSON problem file")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    def start(p):
        p.add_argument("--from", dest="start", type=float, default=None,
                       help="lower end of the eigenvalue scan (default: automatic)")

    def nodes(p):
        p.add_argument("--nodes", type=int, default=hilbert.DEFAULT_NODES,
                       help="odd number of Simpson nodes per segment")

    add("validate", "check a problem file and report theta, gamma, xi, rho")

    p = add("spectrum", "smallest eigenvalues with certificate data")
    p.add_argument("--count", type=int, default=5)
    start(p)

    p = add("eigfun", "normalised eigenfunction samples")
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--samples", type=int, default=101, help="samples per segment")
    start(p)
    nodes(p)

    p = add("expand", "eigen-expansion coefficients and truncation residuals")
    p.add_argument("--target", required=True, help=BUILTIN_HELP)
    p.add_argument("--terms", type=int, default=40)
    p.add_argument("--scalar", type=float, default=None,
                   help="scalar component h (default: N'(f) at x = 1)")
    start(p)
    nodes(p)

    p = add("resolvent", "solve (A - eta) Y = F on the Simpson grid")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--rhs", required=True, help=BUILTIN_HELP)
    p.add_argument("--scalar", type=float, default=0.0, help="scalar component h")
    nodes(p)

    p = add("compare", "shooting eigenvalues against the finite-difference oracle")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--mesh", type=int, default=2000, help="nodes per segment")
    start(p)

    p = add("gram", "Gram matrix of normalised eigen-elements")
    p.add_argument("--count", type=int, default=8)
    start(p)
    nodes(p)
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    _check_options(args)
    spec = _load(args.problem)
    table = COMMANDS[args.command](spec, args)
    _emit(render(table, args.format), args.output)
    return 0


def _fail(exc):
    sys.stderr.write(json.dumps(_jsonable(exc.as_dict()), default=str) + "\n")
    return exc.exit_code


def main(argv=None):
    try:
        return run(argv)
    except SLError as exc:
        return _fail(exc)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        err = SLError(str(exc) or type(exc).__name__, kind=type(exc).__name__)
        err.code = "NumericalFailure"
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
